use abstain_core::exponents::nonadv_boundary;
use abstain_core::Distribution;

use super::{csv_artifact, par_map, region, solve, Outcome};
use crate::config::{CommandKind, ModelKind, RunConfig};
use crate::error::Result;
use crate::output::{pmf_cell, Cell, Table};

pub const COLUMNS: [&str; 13] =
    ["model", "direction", "eps", "lambda", "value", "nonadv", "zero", "min_slack", "rho", "u", "p", "q", "v"];

struct Task<'a> {
    kind: ModelKind,
    direction: &'static str,
    p: &'a Distribution,
    r: &'a Distribution,
    eps: f64,
    lambda: f64,
}

/// One solver record per model, `eps` and radius. `lambda01` rows are the
/// `1|0` direction; a `lambda10` adds `0|1` rows with the roles swapped.
/// A second table holds the full exponent quadruple per `(eps, lambda01)`.
pub fn cmd_exponent(cfg: &RunConfig) -> Result<Outcome> {
    let v = cfg.validate(CommandKind::Exponent)?;
    let mut tasks = Vec::new();
    for &kind in &cfg.models {
        for &eps in &cfg.eps {
            for &lambda in &cfg.lambda01 {
                tasks.push(Task { kind, direction: "1|0", p: &v.p0, r: &v.p1, eps, lambda });
            }
            if let Some(lambda) = cfg.lambda10 {
                tasks.push(Task { kind, direction: "0|1", p: &v.p1, r: &v.p0, eps, lambda });
            }
        }
    }
    let rows = par_map(&tasks, |t| -> Result<Vec<Cell>> {
        let r = solve(t.kind, t.p, t.r, t.eps, t.lambda, &v.settings)?;
        let nonadv = nonadv_boundary(t.p, t.r, t.lambda)?.value;
        let m = &r.minimizer;
        Ok(vec![
            t.kind.tag().into(),
            t.direction.into(),
            t.eps.into(),
            t.lambda.into(),
            r.value.into(),
            nonadv.into(),
            r.certificate.zero.into(),
            r.certificate.min_slack().into(),
            m.rho.into(),
            pmf_cell(m.u.as_ref()),
            pmf_cell(m.p.as_ref()),
            pmf_cell(m.q.as_ref()),
            pmf_cell(m.v.as_ref()),
        ])
    })?;
    let mut table = Table::new(&COLUMNS);
    rows.into_iter().for_each(|r| table.push(r));

    let adv_eps: Vec<f64> = cfg.eps.iter().copied().filter(|&e| e > 0.0).collect();
    let quad = region::region_table(cfg, &v, &adv_eps, &cfg.lambda01)?;
    Ok(Outcome {
        artifacts: vec![
            csv_artifact(CommandKind::Exponent, cfg, "exponent.csv", &table)?,
            csv_artifact(CommandKind::Exponent, cfg, "exponent_quadruples.csv", &quad)?,
        ],
        ..Default::default()
    })
}
