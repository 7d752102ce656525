use abstain_core::adversary::{StrongConverseAttack, DEFAULT_CONVERSE_DELTA};
use abstain_core::finite_n::{monte_carlo_chunk, McAdversary, Tally, MC_CHUNK};
use abstain_core::ContaminationModel;

use super::{csv_artifact, par_map, Outcome};
use crate::config::{rate, AdversaryKind, CommandKind, RunConfig, Validated};
use crate::error::{CliError, Result};
use crate::output::{Cell, Table};

pub const COLUMNS: [&str; 18] = [
    "model",
    "eps",
    "n",
    "adversary",
    "samples",
    "seed",
    "e_1abs_0",
    "e_1abs_0_lo",
    "e_1abs_0_hi",
    "e_0abs_1",
    "e_0abs_1_lo",
    "e_0abs_1_hi",
    "e_adv_1_0",
    "e_adv_1_0_lo",
    "e_adv_1_0_hi",
    "e_adv_0_1",
    "e_adv_0_1_lo",
    "e_adv_0_1_hi",
];

fn adversary(cfg: &RunConfig, v: &Validated, m: &ContaminationModel, n: u32) -> Result<McAdversary> {
    let spec = v.detector.as_ref().expect("validated detector");
    Ok(match cfg.adversary {
        AdversaryKind::Omniscient => McAdversary::Omniscient,
        AdversaryKind::Oblivious => McAdversary::ObliviousIid { u_1_0: v.p1.clone(), u_0_1: v.p0.clone() },
        AdversaryKind::Converse => {
            let e = rate(m.eps())?;
            let d = DEFAULT_CONVERSE_DELTA;
            McAdversary::StrongConverse {
                attack_1_0: StrongConverseAttack::new(&v.p0, &v.p1, e, spec.l01() + spec.delta(), d, n, &v.settings)?,
                attack_0_1: StrongConverseAttack::new(&v.p1, &v.p0, e, spec.l10() + spec.delta(), d, n, &v.settings)?,
            }
        }
    })
}

/// Monte Carlo error frequencies with 99% Wilson intervals. Chunks run in
/// parallel on independent streams and are merged in order, so the result
/// depends only on the seed.
pub fn cmd_simulate(cfg: &RunConfig) -> Result<Outcome> {
    let cmd = CommandKind::Simulate;
    let v = cfg.validate(cmd)?;
    let spec = v.detector.clone().expect("validated detector");
    let full = cfg.samples / MC_CHUNK;
    let rest = cfg.samples % MC_CHUNK;
    let chunks: Vec<(u64, u64)> = (0..full).map(|c| (c, MC_CHUNK)).chain((rest > 0).then_some((full, rest))).collect();
    let mut table = Table::new(&COLUMNS);
    for &kind in &cfg.models {
        for &e in &cfg.eps {
            let m = kind.model(e)?;
            for &n in &cfg.n_grid {
                let adv = adversary(cfg, &v, &m, n)?;
                let tallies = par_map(&chunks, |&(c, len)| {
                    monte_carlo_chunk(&spec, &m, n, &adv, cfg.seed, c, len).map_err(CliError::from)
                })?;
                let mut total = Tally::default();
                tallies.iter().for_each(|t| total.merge(t));
                let r = total.report(n, &m, cfg.seed);
                let name = match cfg.adversary {
                    AdversaryKind::Omniscient => "omniscient",
                    AdversaryKind::Oblivious => "oblivious",
                    AdversaryKind::Converse => "converse",
                };
                let mut row: Vec<Cell> =
                    vec![kind.tag().into(), e.into(), n.into(), name.into(), cfg.samples.into(), cfg.seed.into()];
                let counts = [total.e_1abs_0, total.e_0abs_1, total.e_adv_1_0, total.e_adv_0_1];
                for (est, k) in [r.e_1abs_0, r.e_0abs_1, r.e_adv_1_0, r.e_adv_0_1].into_iter().zip(counts) {
                    let (lo, hi) = est.interval.expect("monte carlo interval");
                    row.extend([(k as f64 / total.samples as f64).into(), lo.into(), hi.into()]);
                }
                table.push(row);
            }
        }
    }
    Ok(Outcome { artifacts: vec![csv_artifact(cmd, cfg, "simulate.csv", &table)?], ..Default::default() })
}
