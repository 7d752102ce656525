use abstain_core::exponents::{
    rho_form_objective, fixed_weight_exponent, memoryless_exponent, memoryless_exponent_claim1, nonadv_boundary,
    strong_contamination_exponent,
};

use super::{csv_artifact, par_map, Outcome};
use crate::brute::binary_exponent;
use crate::config::{rate, CommandKind, ModelKind, RunConfig, Validated};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

pub const COLUMNS: [&str; 9] = ["check", "model", "eps", "lambda", "lhs", "rhs", "diff", "tolerance", "pass"];

/// A compared pair. `diff` is `|lhs - rhs|` for identities and the excess
/// `max(lhs - rhs, 0)` for orderings `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub model: &'static str,
    pub eps: f64,
    pub lambda: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub diff: f64,
}

fn identity(name: &'static str, model: &'static str, eps: f64, lambda: f64, lhs: f64, rhs: f64) -> Check {
    Check { name, model, eps, lambda, lhs, rhs, diff: (lhs - rhs).abs() }
}

fn ordering(name: &'static str, model: &'static str, eps: f64, lambda: f64, lhs: f64, rhs: f64) -> Check {
    Check { name, model, eps, lambda, lhs, rhs, diff: (lhs - rhs).max(0.0) }
}

fn point_checks(v: &Validated, eps: f64, lambda: f64) -> abstain_core::Result<Vec<Check>> {
    let (p0, p1, s) = (&v.p0, &v.p1, &v.settings);
    let e = rate(eps)?;
    let ber = memoryless_exponent(p0, p1, e, lambda, s)?.value;
    let fw = fixed_weight_exponent(p0, p1, e, lambda, s)?.value;
    let sc = strong_contamination_exponent(p0, p1, e, lambda, s)?.value;
    let nonadv = nonadv_boundary(p0, p1, lambda)?.value;
    let rho_form = memoryless_exponent_claim1(p0, p1, e, lambda, s)?.value;
    let at_eps = rho_form_objective(p0, p1, e, lambda, eps, s)?;
    Ok(vec![
        identity("memoryless-equals-rho-form", "ber", eps, lambda, ber, rho_form),
        identity("rho-at-eps-equals-fixed-weight", "fw", eps, lambda, at_eps, fw),
        ordering("memoryless-below-fixed-weight", "ber", eps, lambda, ber, fw),
        ordering("strong-below-fixed-weight", "adv", eps, lambda, sc, fw),
        ordering("fixed-weight-below-non-adversarial", "fw", eps, lambda, fw, nonadv),
    ])
}

fn oracle_checks(v: &Validated, eps: f64, lambda: f64) -> abstain_core::Result<Vec<Check>> {
    let (a0, a1) = (v.p0.probs()[1], v.p1.probs()[1]);
    let e = rate(eps)?;
    let (p0, p1, s) = (&v.p0, &v.p1, &v.settings);
    let solved = [
        (ModelKind::Ber, memoryless_exponent(p0, p1, e, lambda, s)?.value),
        (ModelKind::Fw, fixed_weight_exponent(p0, p1, e, lambda, s)?.value),
        (ModelKind::Adv, strong_contamination_exponent(p0, p1, e, lambda, s)?.value),
    ];
    Ok(solved
        .into_iter()
        .map(|(kind, value)| identity("grid-search", kind.tag(), eps, lambda, value, binary_exponent(kind, a0, a1, eps, lambda)))
        .collect())
}

/// Runs the identity and ordering checks over the `eps x lambda01` grid,
/// plus grid-search spot checks at the grid corners for binary alphabets.
pub fn run_checks(cfg: &RunConfig) -> Result<Vec<Check>> {
    let v = cfg.validate(CommandKind::Validate)?;
    let grid: Vec<(f64, f64)> = cfg.eps.iter().flat_map(|&e| cfg.lambda01.iter().map(move |&l| (e, l))).collect();
    let mut checks: Vec<Check> =
        par_map(&grid, |&(e, l)| point_checks(&v, e, l).map_err(CliError::from))?.into_iter().flatten().collect();
    if v.p0.alphabet_size() == 2 {
        let (e0, e1) = (cfg.eps[0], cfg.eps[cfg.eps.len() - 1]);
        let (l0, l1) = (cfg.lambda01[0], cfg.lambda01[cfg.lambda01.len() - 1]);
        let mut corners = vec![(e0, l0), (e0, l1), (e1, l0), (e1, l1)];
        corners.dedup();
        let spot = par_map(&corners, |&(e, l)| oracle_checks(&v, e, l).map_err(CliError::from))?;
        checks.extend(spot.into_iter().flatten());
    }
    Ok(checks)
}

/// Writes one row per check. Any failure makes the command exit with the
/// validation status after the report is written.
pub fn cmd_validate(cfg: &RunConfig) -> Result<Outcome> {
    let cmd = CommandKind::Validate;
    let checks = run_checks(cfg)?;
    let mut t = Table::new(&COLUMNS);
    let mut failed = 0;
    for c in &checks {
        let pass = c.diff <= cfg.tolerance;
        failed += usize::from(!pass);
        t.push(vec![
            c.name.into(),
            c.model.into(),
            c.eps.into(),
            c.lambda.into(),
            c.lhs.into(),
            c.rhs.into(),
            c.diff.into(),
            cfg.tolerance.into(),
            Cell::Bool(pass),
        ]);
    }
    Ok(Outcome {
        artifacts: vec![csv_artifact(cmd, cfg, "validate.csv", &t)?],
        checks: Some((failed, checks.len())),
        ..Default::default()
    })
}
