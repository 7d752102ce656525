//! Exact finite-sample error probabilities, their rates, and a seeded Monte
//! Carlo estimate of the same quantities.
//!
//! The exact evaluators work on types, never on sequences: the detector only
//! sees the type of what it observes, and an omniscient adversary only needs
//! to know whether some admissible type lands in the wrong decision region.
//! Probabilities are carried as `log2` values and summed with
//! [`numeric::log2_sum`] in a fixed order, so results do not depend on how
//! the work is scheduled.

mod monte_carlo;
mod rates;

use alloc::vec;
use alloc::vec::Vec;

pub use monte_carlo::{
    monte_carlo_chunk, monte_carlo_errors, wilson_interval, McAdversary, Tally, MC_CHUNK, WILSON_Z_99,
};
pub use rates::{fit_rate, rate_convergence_study, RateFit, RateStudy};

use crate::detector::{Decision, DecisionRegion, DetectorSpec};
use crate::numeric;
use crate::prob::{self, log2_probs, CompositionIter, LogFactorials};
use crate::{ContaminationModel, Hypothesis, Result};

/// How an [`ErrorReport`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// One error probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorEstimate {
    /// `log2` of the probability; `-inf` when it is zero.
    pub log2: f64,
    /// `-log2 / n`.
    pub rate: f64,
    /// 99% Wilson interval on the probability, for Monte Carlo estimates.
    pub interval: Option<(f64, f64)>,
}

impl ErrorEstimate {
    pub(crate) fn exact(log2: f64, n: u32) -> Self {
        Self { log2, rate: -log2 / n as f64, interval: None }
    }

    pub fn probability(&self) -> f64 {
        libm::exp2(self.log2)
    }
}

/// The four error probabilities of a detector at sample size `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub n: u32,
    pub model: ContaminationModel,
    /// Clean `P0`, decision other than `0`.
    pub e_1abs_0: ErrorEstimate,
    /// Clean `P1`, decision other than `1`.
    pub e_0abs_1: ErrorEstimate,
    /// Contaminated `P0`, decision `1`.
    pub e_adv_1_0: ErrorEstimate,
    /// Contaminated `P1`, decision `0`.
    pub e_adv_0_1: ErrorEstimate,
    pub method: Method,
    /// `log2` upper bound on probability mass left out of the exact sums.
    pub truncation_log2: f64,
}

/// Relative mass below which memoryless binomial terms are dropped.
pub const TRUNCATION_RELATIVE: f64 = 1e-15;

fn log2_mass_where<F: Fn(Decision) -> bool>(region: &DecisionRegion, lp: &[f64], table: &LogFactorials, keep: F) -> f64 {
    let terms: Vec<f64> = CompositionIter::new(region.n(), region.alphabet_size())
        .zip(region.decisions())
        .filter(|(_, &d)| keep(d))
        .map(|(c, _)| table.log2_type_probability(&c, lp))
        .collect();
    numeric::log2_sum(&terms)
}

/// Exact `log2` probabilities of the two clean-sample errors:
/// `P0(decision != 0)` and `P1(decision != 1)`.
pub fn exact_nonadv_errors(spec: &DetectorSpec, n: u32) -> Result<(f64, f64)> {
    let region = spec.decision_region(n)?;
    let table = LogFactorials::new(n);
    let e10 = log2_mass_where(&region, &log2_probs(spec.p0()), &table, |d| d != Decision::Zero);
    let e01 = log2_mass_where(&region, &log2_probs(spec.p1()), &table, |d| d != Decision::One);
    Ok((e10, e01))
}

/// Exact `log2` probability of each decision under clean `h`, in the order
/// `[Zero, One, Abstain]`.
pub fn exact_decision_masses(spec: &DetectorSpec, n: u32, h: Hypothesis) -> Result<[f64; 3]> {
    let region = spec.decision_region(n)?;
    let table = LogFactorials::new(n);
    let lp = log2_probs(spec.hypothesis(h));
    Ok([Decision::Zero, Decision::One, Decision::Abstain].map(|d| log2_mass_where(&region, &lp, &table, |x| x == d)))
}

/// Exact `log2` of the worst-case probability that contaminated samples
/// from `h` are misclassified (decision `1` under `H0`, `0` under `H1`).
///
/// The adversary is omniscient: it sees the clean samples and the mask.
/// Conditioned on the mask weight `k`, it succeeds exactly when the clean
/// part has a type `c` in `Delta_{n-k}` for which some completion `c + v`,
/// `v in Delta_k`, is decided wrongly. Strong contamination succeeds when
/// some wrongly decided type is within `floor(n * eps)` single-sample edits
/// of the clean type.
pub fn exact_worstcase_adv_error(spec: &DetectorSpec, model: &ContaminationModel, n: u32, h: Hypothesis) -> Result<f64> {
    exact_worstcase_adv_error_with_bound(spec, model, n, h).map(|(v, _)| v)
}

/// [`exact_worstcase_adv_error`] together with a `log2` upper bound on the
/// mass dropped by the memoryless truncation (`-inf` when nothing is dropped).
pub fn exact_worstcase_adv_error_with_bound(
    spec: &DetectorSpec,
    model: &ContaminationModel,
    n: u32,
    h: Hypothesis,
) -> Result<(f64, f64)> {
    let region = spec.decision_region(n)?;
    let wrong = Decision::wrong_for(h);
    let lp = log2_probs(spec.hypothesis(h));
    let table = LogFactorials::new(n);
    let k = spec.alphabet_size();
    match model {
        ContaminationModel::StrongContamination(e) => {
            let budget = ContaminationModel::strong_budget(n, e.value());
            let reach = within_edits(&region, wrong, budget);
            let terms: Vec<f64> = CompositionIter::new(n, k)
                .zip(&reach)
                .filter(|(_, &r)| r)
                .map(|(c, _)| table.log2_type_probability(&c, &lp))
                .collect();
            Ok((numeric::log2_sum(&terms), f64::NEG_INFINITY))
        }
        ContaminationModel::FixedWeightUniform(e) => {
            let free = ContaminationModel::fixed_weight_count(n, e.value());
            let mut layers = CompletionLayers::new(&region, wrong);
            Ok((layers.clean_mass(free, &lp, &table), f64::NEG_INFINITY))
        }
        ContaminationModel::MemorylessIngress(e) => memoryless_adv(&region, wrong, e.value(), &lp, &table),
    }
}

fn memoryless_adv(region: &DecisionRegion, wrong: Decision, eps: f64, lp: &[f64], table: &LogFactorials) -> Result<(f64, f64)> {
    let n = region.n();
    let (le, l1e) = (libm::log2(eps), libm::log2(1.0 - eps));
    let weight: Vec<f64> = (0..=n).map(|k| table.log2_binomial(n, k) + k as f64 * le + (n - k) as f64 * l1e).collect();
    let mut order: Vec<usize> = (0..=n as usize).collect();
    order.sort_by(|&a, &b| weight[b].partial_cmp(&weight[a]).unwrap_or(core::cmp::Ordering::Equal).then(a.cmp(&b)));
    // tail[i] = log2 of the binomial mass of order[i..]
    let mut tail = vec![f64::NEG_INFINITY; order.len() + 1];
    for i in (0..order.len()).rev() {
        tail[i] = numeric::log2_add(tail[i + 1], weight[order[i]]);
    }
    let mut layers = CompletionLayers::new(region, wrong);
    let mut terms: Vec<(usize, f64)> = Vec::new();
    let mut running = f64::NEG_INFINITY;
    let threshold = libm::log2(TRUNCATION_RELATIVE);
    let mut dropped = f64::NEG_INFINITY;
    for (i, &k) in order.iter().enumerate() {
        if running > f64::NEG_INFINITY && tail[i] < running + threshold {
            dropped = tail[i];
            break;
        }
        let cond = layers.clean_mass(k as u32, lp, table);
        let term = weight[k] + cond;
        running = numeric::log2_add(running, term);
        terms.push((k, term));
    }
    terms.sort_by_key(|&(k, _)| k);
    let values: Vec<f64> = terms.into_iter().map(|(_, t)| t).collect();
    Ok((numeric::log2_sum(&values), dropped))
}

/// For each type of `Delta_n`, whether some type decided `target` is within
/// `budget` single-sample edits.
fn within_edits(region: &DecisionRegion, target: Decision, budget: u32) -> Vec<bool> {
    let n = region.n();
    let k = region.alphabet_size();
    let dec = region.decisions();
    if k == 2 {
        // rank of (n - ones, ones) is n - ones
        let hit: Vec<u32> = (0..=n).map(|ones| (dec[(n - ones) as usize] == target) as u32).collect();
        let prefix = prefix_sums(&hit);
        return (0..=n)
            .map(|r| {
                let ones = n - r;
                let lo = ones.saturating_sub(budget);
                let hi = (ones + budget).min(n);
                prefix[hi as usize + 1] > prefix[lo as usize]
            })
            .collect();
    }
    // Breadth-first search from the target region over single-sample moves.
    let total = dec.len();
    let mut dist = vec![u32::MAX; total];
    let mut frontier: Vec<Vec<u32>> = Vec::new();
    for (c, &d) in CompositionIter::new(n, k).zip(dec) {
        if d == target {
            dist[prob::type_rank(&c)] = 0;
            frontier.push(c);
        }
    }
    let mut level = 0;
    while !frontier.is_empty() && level < budget {
        level += 1;
        let mut next = Vec::new();
        for c in &frontier {
            for a in 0..k {
                if c[a] == 0 {
                    continue;
                }
                for b in 0..k {
                    if a == b {
                        continue;
                    }
                    let mut m = c.clone();
                    m[a] -= 1;
                    m[b] += 1;
                    let r = prob::type_rank(&m);
                    if dist[r] == u32::MAX {
                        dist[r] = level;
                        next.push(m);
                    }
                }
            }
        }
        frontier = next;
    }
    dist.into_iter().map(|d| d <= budget).collect()
}

fn prefix_sums(x: &[u32]) -> Vec<u32> {
    let mut p = Vec::with_capacity(x.len() + 1);
    p.push(0);
    let mut acc = 0;
    for &v in x {
        acc += v;
        p.push(acc);
    }
    p
}

/// Layer `j` records, for every type `c` of `Delta_{n-j}`, whether some
/// completion `c + v` with `v in Delta_j` is decided `target`. Layers are
/// built incrementally: `c` qualifies iff `c + e_s` qualifies one layer down
/// for some symbol `s`.
struct CompletionLayers<'a> {
    region: &'a DecisionRegion,
    target: Decision,
    binary_prefix: Option<Vec<u32>>,
    layers: Vec<Vec<bool>>,
}

impl<'a> CompletionLayers<'a> {
    fn new(region: &'a DecisionRegion, target: Decision) -> Self {
        let n = region.n();
        let binary_prefix = (region.alphabet_size() == 2).then(|| {
            let dec = region.decisions();
            let hit: Vec<u32> = (0..=n).map(|ones| (dec[(n - ones) as usize] == target) as u32).collect();
            prefix_sums(&hit)
        });
        Self { region, target, binary_prefix, layers: Vec::new() }
    }

    fn layer(&mut self, j: u32) -> &[bool] {
        let n = self.region.n();
        let k = self.region.alphabet_size();
        if self.layers.is_empty() {
            self.layers.push(self.region.decisions().iter().map(|&d| d == self.target).collect());
        }
        while self.layers.len() <= j as usize {
            let m = n - self.layers.len() as u32;
            let prev = self.layers.last().unwrap();
            let cur: Vec<bool> = CompositionIter::new(m, k)
                .map(|c| {
                    (0..k).any(|s| {
                        let mut up = c.clone();
                        up[s] += 1;
                        prev[prob::type_rank(&up)]
                    })
                })
                .collect();
            self.layers.push(cur);
        }
        &self.layers[j as usize]
    }

    /// `log2 P(clean type of n - free samples admits a wrong completion)`.
    fn clean_mass(&mut self, free: u32, lp: &[f64], table: &LogFactorials) -> f64 {
        let n = self.region.n();
        let m = n - free;
        if let Some(prefix) = &self.binary_prefix {
            let terms: Vec<f64> = (0..=m)
                .rev()
                .filter(|&c1| prefix[(c1 + free) as usize + 1] > prefix[c1 as usize])
                .map(|c1| table.log2_type_probability(&[m - c1, c1], lp))
                .collect();
            return numeric::log2_sum(&terms);
        }
        let k = self.region.alphabet_size();
        let layer = self.layer(free).to_vec();
        let terms: Vec<f64> = CompositionIter::new(m, k)
            .zip(&layer)
            .filter(|(_, &ok)| ok)
            .map(|(c, _)| table.log2_type_probability(&c, lp))
            .collect();
        numeric::log2_sum(&terms)
    }
}

/// All four exact error probabilities in one report.
pub fn exact_error_report(spec: &DetectorSpec, model: &ContaminationModel, n: u32) -> Result<ErrorReport> {
    let (e10, e01) = exact_nonadv_errors(spec, n)?;
    let (a10, t10) = exact_worstcase_adv_error_with_bound(spec, model, n, Hypothesis::H0)?;
    let (a01, t01) = exact_worstcase_adv_error_with_bound(spec, model, n, Hypothesis::H1)?;
    Ok(ErrorReport {
        n,
        model: *model,
        e_1abs_0: ErrorEstimate::exact(e10, n),
        e_0abs_1: ErrorEstimate::exact(e01, n),
        e_adv_1_0: ErrorEstimate::exact(a10, n),
        e_adv_0_1: ErrorEstimate::exact(a01, n),
        method: Method::Exact,
        truncation_log2: numeric::log2_add(t10, t01),
    })
}
