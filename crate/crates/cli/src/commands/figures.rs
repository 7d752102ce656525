use abstain_core::exponents::adversarial_exponent;

use super::{csv_artifact, par_map, region, Outcome};
use crate::config::{CommandKind, ModelKind, RunConfig};
use crate::error::Result;
use crate::output::{Artifact, Cell, Header, Table};
use crate::plot::{line_chart, Series};

fn with_plot(cmd: CommandKind, csv: Artifact, svg_name: &str, plot: std::result::Result<String, String>) -> Outcome {
    let mut out = Outcome { artifacts: vec![csv], ..Default::default() };
    match plot {
        Ok(svg) => out.artifacts.push(Artifact { file_name: svg_name.to_owned(), contents: svg }),
        Err(e) => out.warnings.push(format!("{}: plot not rendered: {e}", cmd.name())),
    }
    out
}

/// Region table for the first `eps` without the `eps` column.
pub fn figure4_table(cfg: &RunConfig) -> Result<Table> {
    let v = cfg.validate(CommandKind::Figure4)?;
    let full = region::region_table(cfg, &v, &cfg.eps[..1], &region::sweep(cfg, &v))?;
    let mut t = Table::new(&full.columns[1..]);
    for row in full.rows {
        t.push(row[1..].to_vec());
    }
    Ok(t)
}

/// Trade-off curves: `L01, L10, La01<tag>, La10<tag>`. Defaults are
/// `P0 = Ber(0.1)`, `P1 = Ber(0.5)`, `eps = 0.1`.
pub fn cmd_figure4(cfg: &RunConfig) -> Result<Outcome> {
    let cmd = CommandKind::Figure4;
    let t = figure4_table(cfg)?;
    let csv = csv_artifact(cmd, cfg, "figure4.csv", &t)?;
    let pairs = |x: &str, y: &str| t.numbers(x).into_iter().zip(t.numbers(y)).collect::<Vec<_>>();
    let mut series = vec![Series { label: "non-adversarial".into(), points: pairs("L01", "L10") }];
    for m in &cfg.models {
        series.push(Series {
            label: format!("{} (adversarial)", m.tag()),
            points: pairs(&format!("La01{}", m.tag()), &format!("La10{}", m.tag())),
        });
    }
    let title = format!("Exponent trade-off, eps = {}", cfg.eps[0]);
    let plot = line_chart(&Header::new(cmd, cfg), &title, "lambda_0|1", "lambda_1|0", &series);
    Ok(with_plot(cmd, csv, "figure4.svg", plot))
}

/// `eps`, then `La10<tag>` per model at fixed `lambda01`.
pub fn figure5_table(cfg: &RunConfig) -> Result<Table> {
    let v = cfg.validate(CommandKind::Figure5)?;
    let lambda = cfg.lambda01[0];
    let rows = par_map(&cfg.eps, |&e| -> Result<Vec<Cell>> {
        let mut row = vec![Cell::from(e)];
        for kind in &cfg.models {
            row.push(adversarial_exponent(&kind.model(e)?, &v.p0, &v.p1, lambda, &v.settings)?.value.into());
        }
        Ok(row)
    })?;
    let mut cols = vec!["eps".to_owned()];
    cols.extend(cfg.models.iter().map(|m: &ModelKind| format!("La10{}", m.tag())));
    let mut t = Table::new(&cols);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Adversarial exponent against `eps`. Defaults are `P0 = Ber(0.1)`,
/// `P1 = Ber(0.9)`, `lambda01 = 0.1`, `eps = 0.01, ..., 0.40`.
pub fn cmd_figure5(cfg: &RunConfig) -> Result<Outcome> {
    let cmd = CommandKind::Figure5;
    let t = figure5_table(cfg)?;
    let csv = csv_artifact(cmd, cfg, "figure5.csv", &t)?;
    let series: Vec<Series> = cfg
        .models
        .iter()
        .map(|m| {
            let col = format!("La10{}", m.tag());
            Series { label: m.tag().into(), points: t.numbers("eps").into_iter().zip(t.numbers(&col)).collect() }
        })
        .collect();
    let title = format!("Adversarial exponent, lambda_0|1 = {}", cfg.lambda01[0]);
    let plot = line_chart(&Header::new(cmd, cfg), &title, "eps", "lambda^adv_1|0", &series);
    Ok(with_plot(cmd, csv, "figure5.svg", plot))
}
