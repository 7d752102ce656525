use abstain_core::exponents::region_point;
use abstain_core::prob::kl_divergence;

use super::{csv_artifact, par_map, Outcome};
use crate::config::{CommandKind, RunConfig, Validated};
use crate::error::Result;
use crate::output::{Cell, Table};

/// `eps, L01, L10`, then `La01<tag>, La10<tag>` per model.
pub fn columns(cfg: &RunConfig) -> Vec<String> {
    let mut c = vec!["eps".to_owned(), "L01".to_owned(), "L10".to_owned()];
    for m in &cfg.models {
        c.push(format!("La01{}", m.tag()));
        c.push(format!("La10{}", m.tag()));
    }
    c
}

/// The `lambda01` sweep: the configured values when there are several,
/// otherwise `points` evenly spaced values inside `(0, D(P0||P1))`.
pub fn sweep(cfg: &RunConfig, v: &Validated) -> Vec<f64> {
    if cfg.lambda01.len() >= 2 {
        return cfg.lambda01.clone();
    }
    let d = kl_divergence(&v.p0, &v.p1).bits();
    (1..=cfg.points).map(|k| d * k as f64 / (cfg.points + 1) as f64).collect()
}

/// One row per `(eps, lambda01)`: the non-adversarial pair and each
/// model's adversarial pair.
pub fn region_table(cfg: &RunConfig, v: &Validated, eps: &[f64], lambdas: &[f64]) -> Result<Table> {
    let tasks: Vec<(f64, f64)> = eps.iter().flat_map(|&e| lambdas.iter().map(move |&l| (e, l))).collect();
    let rows = par_map(&tasks, |&(e, l)| -> Result<Vec<Cell>> {
        let mut row = vec![e.into(), l.into()];
        for (i, kind) in cfg.models.iter().enumerate() {
            let p = region_point(&v.p0, &v.p1, &kind.model(e)?, l, &v.settings)?;
            if i == 0 {
                row.push(p.exponents.lambda_1abs_0.into());
            }
            row.push(p.exponents.lambda_adv_0_1.into());
            row.push(p.exponents.lambda_adv_1_0.into());
        }
        Ok(row)
    })?;
    let mut t = Table::new(&columns(cfg));
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

pub fn cmd_region(cfg: &RunConfig) -> Result<Outcome> {
    let v = cfg.validate(CommandKind::Region)?;
    let table = region_table(cfg, &v, &cfg.eps, &sweep(cfg, &v))?;
    Ok(Outcome { artifacts: vec![csv_artifact(CommandKind::Region, cfg, "region.csv", &table)?], ..Default::default() })
}
