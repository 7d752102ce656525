use alloc::vec::Vec;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{ErrorEstimate, ErrorReport, Method};
use crate::adversary::{
    apply_replacement, oblivious_iid_attack, omniscient_best_response, sample_mask, StrongConverseAttack,
};
use crate::detector::{Decision, DetectorSpec};
use crate::prob::Distribution;
use crate::{ContaminationModel, Error, Hypothesis, Result};

/// Samples per chunk. Chunk `i` draws from its own ChaCha stream, so chunks
/// can be run in any order or in parallel and merged.
pub const MC_CHUNK: u64 = 4096;

/// Two-sided 99% normal quantile.
pub const WILSON_Z_99: f64 = 2.575_829_303_548_900_4;

/// The adversary used for the contaminated runs.
#[derive(Debug, Clone, PartialEq)]
pub enum McAdversary {
    /// Sees samples and mask and aims at the wrong decision.
    Omniscient,
    /// Replaces exposed samples by i.i.d. draws, `u_1_0` under `H0` and
    /// `u_0_1` under `H1`. Under strong contamination the first
    /// `floor(n * eps)` positions are replaced.
    ObliviousIid { u_1_0: Distribution, u_0_1: Distribution },
    /// The converse attack, one instance per direction (the `0|1` one built
    /// with the hypotheses swapped). The contamination model is ignored.
    StrongConverse { attack_1_0: StrongConverseAttack, attack_0_1: StrongConverseAttack },
}

/// Error counts over a batch of simulated experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub samples: u64,
    pub e_1abs_0: u64,
    pub e_0abs_1: u64,
    pub e_adv_1_0: u64,
    pub e_adv_0_1: u64,
}

impl Tally {
    pub fn merge(&mut self, other: &Tally) {
        self.samples += other.samples;
        self.e_1abs_0 += other.e_1abs_0;
        self.e_0abs_1 += other.e_0abs_1;
        self.e_adv_1_0 += other.e_adv_1_0;
        self.e_adv_0_1 += other.e_adv_0_1;
    }
}

/// Wilson score interval for `successes` out of `trials`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * libm::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    let lo = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

fn contaminate(
    spec: &DetectorSpec,
    model: &ContaminationModel,
    adversary: &McAdversary,
    x: &[usize],
    h: Hypothesis,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let n = x.len();
    let target = Decision::wrong_for(h);
    let mask = |rng: &mut ChaCha8Rng| -> Result<Vec<bool>> {
        match model {
            ContaminationModel::StrongContamination(e) => {
                let b = ContaminationModel::strong_budget(n as u32, e.value()) as usize;
                Ok((0..n).map(|i| i < b).collect())
            }
            _ => sample_mask(model, n, rng),
        }
    };
    Ok(match adversary {
        McAdversary::Omniscient => {
            let z = match model {
                ContaminationModel::StrongContamination(_) => Vec::new(),
                _ => sample_mask(model, n, rng)?,
            };
            omniscient_best_response(model, spec, x, &z, target)?.y
        }
        McAdversary::ObliviousIid { u_1_0, u_0_1 } => {
            let u = if h == Hypothesis::H0 { u_1_0 } else { u_0_1 };
            let z = mask(rng)?;
            let r = oblivious_iid_attack(u, n, rng);
            apply_replacement(x, &z, &r).y
        }
        McAdversary::StrongConverse { attack_1_0, attack_0_1 } => {
            let a = if h == Hypothesis::H0 { attack_1_0 } else { attack_0_1 };
            a.attack(x, rng)?.y
        }
    })
}

/// Runs samples `chunk * MC_CHUNK ..` up to `len` of them, on stream `chunk`
/// of the generator seeded with `seed`.
#[allow(clippy::too_many_arguments)]
pub fn monte_carlo_chunk(
    spec: &DetectorSpec,
    model: &ContaminationModel,
    n: u32,
    adversary: &McAdversary,
    seed: u64,
    chunk: u64,
    len: u64,
) -> Result<Tally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let w0 = WeightedIndex::new(spec.p0().probs()).map_err(|_| Error::NotNormalized(0.0))?;
    let w1 = WeightedIndex::new(spec.p1().probs()).map_err(|_| Error::NotNormalized(0.0))?;
    let mut t = Tally::default();
    for _ in 0..len {
        for h in [Hypothesis::H0, Hypothesis::H1] {
            let w = if h == Hypothesis::H0 { &w0 } else { &w1 };
            let x: Vec<usize> = (0..n).map(|_| w.sample(&mut rng)).collect();
            let clean = spec.decide_sequence(&x)?;
            let y = contaminate(spec, model, adversary, &x, h, &mut rng)?;
            let dirty = spec.decide_sequence(&y)?;
            match h {
                Hypothesis::H0 => {
                    t.e_1abs_0 += (clean != Decision::Zero) as u64;
                    t.e_adv_1_0 += (dirty == Decision::One) as u64;
                }
                Hypothesis::H1 => {
                    t.e_0abs_1 += (clean != Decision::One) as u64;
                    t.e_adv_0_1 += (dirty == Decision::Zero) as u64;
                }
            }
        }
        t.samples += 1;
    }
    Ok(t)
}

/// Chunk lengths covering `samples`.
pub(crate) fn chunks(samples: u64) -> impl Iterator<Item = (u64, u64)> {
    let full = samples / MC_CHUNK;
    let rest = samples % MC_CHUNK;
    (0..full).map(|c| (c, MC_CHUNK)).chain((rest > 0).then_some((full, rest)))
}

impl Tally {
    /// The report for these counts.
    pub fn report(&self, n: u32, model: &ContaminationModel, seed: u64) -> ErrorReport {
        let est = |k: u64| {
            let p = k as f64 / self.samples as f64;
            let log2 = if k == 0 { f64::NEG_INFINITY } else { libm::log2(p) };
            ErrorEstimate { log2, rate: -log2 / n as f64, interval: Some(wilson_interval(k, self.samples, WILSON_Z_99)) }
        };
        ErrorReport {
            n,
            model: *model,
            e_1abs_0: est(self.e_1abs_0),
            e_0abs_1: est(self.e_0abs_1),
            e_adv_1_0: est(self.e_adv_1_0),
            e_adv_0_1: est(self.e_adv_0_1),
            method: Method::MonteCarlo { samples: self.samples, seed },
            truncation_log2: f64::NEG_INFINITY,
        }
    }
}

/// Simulates `samples` experiments under each hypothesis and reports the
/// four error frequencies with 99% Wilson intervals. Deterministic given
/// `seed`; equal to merging [`monte_carlo_chunk`] over all chunks.
pub fn monte_carlo_errors(
    spec: &DetectorSpec,
    model: &ContaminationModel,
    n: u32,
    samples: u64,
    seed: u64,
    adversary: &McAdversary,
) -> Result<ErrorReport> {
    if samples < 1000 {
        return Err(Error::OutOfRange { name: "samples", value: samples as f64, lower: 1000.0, upper: f64::INFINITY });
    }
    if n == 0 {
        return Err(Error::EmptyType);
    }
    let mut total = Tally::default();
    for (c, len) in chunks(samples) {
        total.merge(&monte_carlo_chunk(spec, model, n, adversary, seed, c, len)?);
    }
    Ok(total.report(n, model, seed))
}
