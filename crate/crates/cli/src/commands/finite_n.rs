use abstain_core::exponents::adversarial_exponent;
use abstain_core::finite_n::{exact_error_report, fit_rate, ErrorReport};
use abstain_core::{ContaminationModel, Error as CoreError};

use super::{csv_artifact, par_map, Outcome};
use crate::config::{CommandKind, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

pub const REPORT_COLUMNS: [&str; 13] = [
    "model",
    "eps",
    "n",
    "status",
    "log2_e_1abs_0",
    "log2_e_0abs_1",
    "log2_e_adv_1_0",
    "log2_e_adv_0_1",
    "rate_1abs_0",
    "rate_0abs_1",
    "rate_adv_1_0",
    "rate_adv_0_1",
    "truncation_log2",
];

pub const SUMMARY_COLUMNS: [&str; 10] = [
    "model",
    "eps",
    "direction",
    "points",
    "asymptote",
    "theory",
    "delta_rel",
    "log_coefficient",
    "inverse_coefficient",
    "rms_residual",
];

fn report_row(m: &ContaminationModel, n: u32, r: &std::result::Result<ErrorReport, CoreError>) -> Vec<Cell> {
    let mut row = vec![m.tag().into(), m.eps().into(), n.into()];
    match r {
        Ok(r) => {
            row.push("ok".into());
            let e = [r.e_1abs_0, r.e_0abs_1, r.e_adv_1_0, r.e_adv_0_1];
            row.extend(e.iter().map(|x| Cell::from(x.log2)));
            row.extend(e.iter().map(|x| Cell::from(x.rate)));
            row.push(r.truncation_log2.into());
        }
        Err(e) => {
            row.push(if matches!(e, CoreError::BudgetExceeded { .. }) { "budget_refused" } else { "error" }.into());
            row.extend(std::iter::repeat(Cell::Empty).take(9));
        }
    }
    row
}

/// Exact error reports over the `n` grid for each model and `eps`, then
/// per direction the fitted asymptotic adversarial rate against the
/// exponent at the detector's radius (`l + delta`). Budget refusals are
/// listed and the remaining grid points still run.
pub fn cmd_finite_n(cfg: &RunConfig) -> Result<Outcome> {
    let cmd = CommandKind::FiniteN;
    let v = cfg.validate(cmd)?;
    let spec = v.detector.clone().expect("validated detector");
    let mut models = Vec::new();
    for &kind in &cfg.models {
        for &e in &cfg.eps {
            models.push(kind.model(e)?);
        }
    }
    let tasks: Vec<(ContaminationModel, u32)> =
        models.iter().flat_map(|m| cfg.n_grid.iter().map(move |&n| (*m, n))).collect();
    let results = par_map(&tasks, |(m, n)| Ok::<_, CliError>(exact_error_report(&spec, m, *n)))?;

    let mut reports = Table::new(&REPORT_COLUMNS);
    let mut refusals = Vec::new();
    for ((m, n), r) in tasks.iter().zip(&results) {
        reports.push(report_row(m, *n, r));
        match r {
            Err(e @ CoreError::BudgetExceeded { .. }) => refusals.push(format!("{} n={n}: {e}", m.tag())),
            Err(e) => return Err(e.clone().into()),
            Ok(_) => {}
        }
    }

    let mut summary = Table::new(&SUMMARY_COLUMNS);
    for m in &models {
        let ok: Vec<&ErrorReport> =
            tasks.iter().zip(&results).filter(|((mm, _), _)| mm == m).filter_map(|(_, r)| r.as_ref().ok()).collect();
        let directions = [
            ("1|0", &v.p0, &v.p1, spec.l01() + spec.delta(), ok.iter().map(|r| (r.n, r.e_adv_1_0.rate)).collect::<Vec<_>>()),
            ("0|1", &v.p1, &v.p0, spec.l10() + spec.delta(), ok.iter().map(|r| (r.n, r.e_adv_0_1.rate)).collect()),
        ];
        for (dir, p, r, radius, points) in directions {
            let theory = adversarial_exponent(m, p, r, radius, &v.settings).ok().map(|s| s.value);
            let mut row = vec![m.tag().into(), m.eps().into(), dir.into(), (points.len() as u32).into()];
            match fit_rate(&points) {
                Ok(fit) => {
                    let delta = theory.filter(|t| *t > 0.0).map(|t| (fit.asymptote - t).abs() / t);
                    row.extend([
                        fit.asymptote.into(),
                        theory.into(),
                        delta.into(),
                        fit.log_coefficient.into(),
                        fit.inverse_coefficient.into(),
                        fit.rms_residual.into(),
                    ]);
                }
                Err(_) => {
                    row.extend([Cell::Empty, theory.into(), Cell::Empty, Cell::Empty, Cell::Empty, Cell::Empty]);
                }
            }
            summary.push(row);
        }
    }
    Ok(Outcome {
        artifacts: vec![
            csv_artifact(cmd, cfg, "finite_n.csv", &reports)?,
            csv_artifact(cmd, cfg, "finite_n_summary.csv", &summary)?,
        ],
        refusals,
        ..Default::default()
    })
}
