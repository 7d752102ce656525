//! Contamination masks and adversaries that act on sample paths.
//!
//! Randomness always comes from a caller-supplied generator; seed a
//! [`ChaCha8Rng`] (see [`seeded_rng`]) for reproducible runs.

use alloc::vec;
use alloc::vec::Vec;

use rand::distributions::{Distribution as _, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

use crate::detector::{Decision, DetectorSpec};
use crate::exponents::{strong_contamination_exponent, SolverSettings};
use crate::numeric;
use crate::prob::{self, BernoulliRate, Distribution, LogFactorials};
use crate::{ContaminationModel, Error, Result};

/// A deterministic generator for a 64-bit seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// What happened to a sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackStatus {
    /// The best response reached the requested decision.
    Success,
    /// No admissible replacement reaches the requested decision.
    Failure,
    /// The converse attack edited the sequence onto its target type.
    Attacked,
    /// The converse attack left the sequence alone because its type was
    /// outside the trigger ball.
    NotTriggered,
    /// The converse attack was triggered but could not reach its target
    /// within budget, or `n` is too small for the target to be close enough.
    Declined,
}

/// An observed sequence `y`, the mask `z` of positions the adversary had
/// access to (or, for strong contamination, edited), and `wt(z)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackOutcome {
    pub y: Vec<usize>,
    pub z: Vec<bool>,
    pub replaced_count: usize,
    pub status: AttackStatus,
}

fn check_symbols(x: &[usize], k: usize) -> Result<()> {
    match x.iter().find(|&&s| s >= k) {
        Some(&symbol) => Err(Error::SymbolOutOfRange { symbol, alphabet: k }),
        None => Ok(()),
    }
}

fn counts_of(x: &[usize], k: usize) -> Vec<u32> {
    let mut c = vec![0u32; k];
    for &s in x {
        c[s] += 1;
    }
    c
}

/// A contamination mask of length `n`: i.i.d. `Ber(eps)` entries for
/// memoryless ingress, a uniformly random set of `ceil(n * eps)` positions
/// for fixed-weight ingress.
///
/// Strong contamination has no random mask and yields [`Error::NotApplicable`].
pub fn sample_mask<R: Rng + ?Sized>(model: &ContaminationModel, n: usize, rng: &mut R) -> Result<Vec<bool>> {
    match model {
        ContaminationModel::MemorylessIngress(e) => {
            let eps = e.value();
            Ok((0..n).map(|_| rng.gen::<f64>() < eps).collect())
        }
        ContaminationModel::FixedWeightUniform(e) => {
            let k = ContaminationModel::fixed_weight_count(n as u32, e.value()) as usize;
            let mut z = vec![false; n];
            for i in rand::seq::index::sample(rng, n, k) {
                z[i] = true;
            }
            Ok(z)
        }
        ContaminationModel::StrongContamination(_) => {
            Err(Error::NotApplicable("strong contamination has no random mask; the adversary picks positions"))
        }
    }
}

/// Writes the block `block` into the masked positions of `x`, in order.
fn fill_mask(x: &[usize], z: &[bool], block: &[usize]) -> Vec<usize> {
    let mut y = x.to_vec();
    let mut it = block.iter();
    for (yi, &zi) in y.iter_mut().zip(z) {
        if zi {
            *yi = *it.next().expect("block shorter than mask");
        }
    }
    y
}

/// Expands a count vector into a sorted symbol block.
fn block_of(counts: &[u32]) -> Vec<usize> {
    counts.iter().enumerate().flat_map(|(s, &c)| core::iter::repeat(s).take(c as usize)).collect()
}

/// The adversary that sees `x` (and the mask) and tries to make `spec`
/// output `target`.
///
/// For the two ingress models the replaced block ranges over all types of
/// `Delta_k`, `k = wt(mask)`, in enumeration order; the first one that works
/// is written into the masked positions in sorted order. On failure `y = x`
/// and the mask is returned unchanged.
///
/// For strong contamination `mask` is ignored. The adversary looks for the
/// type `p` in `Delta_n` with decision `target` that needs the fewest
/// single-sample edits, provided that number is at most `floor(n * eps)`.
/// The earliest over-represented positions are rewritten, so the result is
/// deterministic. On failure `y = x` and `z` is all zeros.
pub fn omniscient_best_response(
    model: &ContaminationModel,
    spec: &DetectorSpec,
    x: &[usize],
    mask: &[bool],
    target: Decision,
) -> Result<AttackOutcome> {
    let k = spec.alphabet_size();
    check_symbols(x, k)?;
    if x.is_empty() {
        return Err(Error::EmptyType);
    }
    match model {
        ContaminationModel::StrongContamination(e) => strong_best_response(spec, x, e.value(), target),
        _ => {
            if mask.len() != x.len() {
                return Err(Error::OutOfRange {
                    name: "mask length",
                    value: mask.len() as f64,
                    lower: x.len() as f64,
                    upper: x.len() as f64,
                });
            }
            let free = mask.iter().filter(|&&b| b).count();
            let mut clean = vec![0u32; k];
            for (&s, &m) in x.iter().zip(mask) {
                if !m {
                    clean[s] += 1;
                }
            }
            let mut total = clean.clone();
            for v in prob::CompositionIter::new(free as u32, k) {
                for i in 0..k {
                    total[i] = clean[i] + v[i];
                }
                if spec.decide_counts(&total) == target {
                    let y = fill_mask(x, mask, &block_of(&v));
                    return Ok(AttackOutcome { y, z: mask.to_vec(), replaced_count: free, status: AttackStatus::Success });
                }
            }
            Ok(AttackOutcome { y: x.to_vec(), z: mask.to_vec(), replaced_count: free, status: AttackStatus::Failure })
        }
    }
}

/// Number of single-sample edits turning counts `from` into `to`.
pub fn edit_distance(from: &[u32], to: &[u32]) -> u32 {
    from.iter().zip(to).map(|(&a, &b)| a.saturating_sub(b)).sum()
}

/// Rewrites the earliest surplus positions of `x` so that its counts become
/// `target`. Returns `(y, z)`.
fn edit_to_type(x: &[usize], target: &[u32]) -> (Vec<usize>, Vec<bool>) {
    let k = target.len();
    let mut cur = counts_of(x, k);
    let mut y = x.to_vec();
    let mut z = vec![false; x.len()];
    let mut deficit: Vec<usize> = Vec::new();
    for s in 0..k {
        for _ in cur[s]..target[s].max(cur[s]) {
            deficit.push(s);
        }
    }
    let mut next = deficit.into_iter();
    for i in 0..y.len() {
        let s = y[i];
        if cur[s] > target[s] {
            let Some(d) = next.next() else { break };
            cur[s] -= 1;
            cur[d] += 1;
            y[i] = d;
            z[i] = true;
        }
    }
    (y, z)
}

fn strong_best_response(spec: &DetectorSpec, x: &[usize], eps: f64, target: Decision) -> Result<AttackOutcome> {
    let k = spec.alphabet_size();
    let n = x.len() as u32;
    let budget = ContaminationModel::strong_budget(n, eps);
    let t = counts_of(x, k);
    let mut best: Option<(u32, Vec<u32>)> = None;
    if k == 2 {
        let lo = t[1].saturating_sub(budget);
        let hi = (t[1] + budget).min(n);
        for ones in lo..=hi {
            let p = vec![n - ones, ones];
            let cost = edit_distance(&t, &p);
            if spec.decide_counts(&p) == target && best.as_ref().map_or(true, |(c, _)| cost < *c) {
                best = Some((cost, p));
            }
        }
    } else {
        for p in prob::enumerate_types(n, k)? {
            let cost = edit_distance(&t, p.counts());
            if cost <= budget
                && spec.decide(&p) == target
                && best.as_ref().map_or(true, |(c, _)| cost < *c)
            {
                best = Some((cost, p.counts().to_vec()));
            }
        }
    }
    match best {
        Some((cost, p)) => {
            let (y, z) = edit_to_type(x, &p);
            Ok(AttackOutcome { y, z, replaced_count: cost as usize, status: AttackStatus::Success })
        }
        None => Ok(AttackOutcome {
            y: x.to_vec(),
            z: vec![false; x.len()],
            replaced_count: 0,
            status: AttackStatus::Failure,
        }),
    }
}

/// `n` i.i.d. draws from `u`, the replacement stream of an adversary that
/// sees neither the samples nor the mask.
pub fn oblivious_iid_attack<R: Rng + ?Sized>(u: &Distribution, n: usize, rng: &mut R) -> Vec<usize> {
    let w = WeightedIndex::new(u.probs()).expect("a distribution has positive total mass");
    (0..n).map(|_| w.sample(rng)).collect()
}

/// Composes a replacement stream with a mask: `y_i = r_i` where `z_i` is set.
pub fn apply_replacement(x: &[usize], z: &[bool], replacement: &[usize]) -> AttackOutcome {
    let y = x
        .iter()
        .zip(z)
        .zip(replacement)
        .map(|((&xi, &zi), &ri)| if zi { ri } else { xi })
        .collect();
    let replaced_count = z.iter().filter(|&&b| b).count();
    AttackOutcome { y, z: z.to_vec(), replaced_count, status: AttackStatus::Attacked }
}

/// The type in `Delta_n` closest to `p` in `D(. || p)`, ties broken towards
/// the lexicographically smallest counts.
pub fn nearest_type(p: &Distribution, n: u32) -> Result<Vec<u32>> {
    let k = p.alphabet_size();
    let mut best: Option<(f64, Vec<u32>)> = None;
    for t in prob::enumerate_types(n, k)? {
        let d = prob::kl_divergence(&t, p).bits();
        if best.as_ref().map_or(true, |(b, _)| d < *b) {
            best = Some((d, t.counts().to_vec()));
        }
    }
    best.map(|(_, c)| c).ok_or(Error::EmptyType)
}

/// The strong-contamination converse adversary.
///
/// It solves the strong-contamination program with both radii shrunk by
/// `delta`, giving `(p*, q*)`, and targets `p_n*`, the type nearest to `p*`.
/// It attacks exactly when the clean type lies within total variation
/// `delta / 2` of `q*`, and then moves one sample at a time from an
/// over-represented symbol to an under-represented one, choosing the sample
/// uniformly among the positions holding that symbol. The observed sequence
/// is therefore uniform over its type class whenever `x` is.
#[derive(Debug, Clone, PartialEq)]
pub struct StrongConverseAttack {
    n: u32,
    budget: u32,
    delta: f64,
    p_star: Distribution,
    q_star: Distribution,
    target: Vec<u32>,
    target_gap: f64,
}

/// Default back-off of the converse attack, in bits and in total variation.
pub const DEFAULT_CONVERSE_DELTA: f64 = 0.02;

impl StrongConverseAttack {
    /// Requires `0 < delta < min(eps, lambda_opposite)`.
    pub fn new(
        p0: &Distribution,
        p1: &Distribution,
        eps: BernoulliRate,
        lambda_opposite: f64,
        delta: f64,
        n: u32,
        s: &SolverSettings,
    ) -> Result<Self> {
        let e = eps.value();
        let cap = e.min(lambda_opposite);
        if !(delta > 0.0 && delta < cap) {
            return Err(Error::OutOfRange { name: "delta", value: delta, lower: 0.0, upper: cap });
        }
        if n == 0 {
            return Err(Error::EmptyType);
        }
        let sol = strong_contamination_exponent(p0, p1, BernoulliRate::new(e - delta)?, lambda_opposite - delta, s)?;
        let p_star = sol.minimizer.p.expect("strong solver returns p");
        let q_star = sol.minimizer.q.expect("strong solver returns q");
        let target = nearest_type(&p_star, n)?;
        let target_gap = numeric::tv(&freqs(&target), p_star.probs());
        Ok(Self { n, budget: ContaminationModel::strong_budget(n, e), delta, p_star, q_star, target, target_gap })
    }

    pub fn p_star(&self) -> &Distribution {
        &self.p_star
    }

    pub fn q_star(&self) -> &Distribution {
        &self.q_star
    }

    /// Counts of `p_n*`.
    pub fn target_type(&self) -> &[u32] {
        &self.target
    }

    /// `floor(n * eps)`.
    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Whether `TV(p_n*, p*) <= delta / 2`, i.e. `n` is large enough for the
    /// budget argument to go through.
    pub fn meets_threshold(&self) -> bool {
        self.target_gap <= self.delta / 2.0
    }

    /// Whether a clean type triggers the attack: `TV(t, q*) <= delta / 2`.
    pub fn triggers(&self, counts: &[u32]) -> bool {
        numeric::tv(&freqs(counts), self.q_star.probs()) <= self.delta / 2.0
    }

    /// Runs the attack on `x`.
    pub fn attack<R: Rng + ?Sized>(&self, x: &[usize], rng: &mut R) -> Result<AttackOutcome> {
        let k = self.target.len();
        check_symbols(x, k)?;
        if x.len() != self.n as usize {
            return Err(Error::OutOfRange {
                name: "sequence length",
                value: x.len() as f64,
                lower: self.n as f64,
                upper: self.n as f64,
            });
        }
        let mut cur = counts_of(x, k);
        let untouched = |status| AttackOutcome { y: x.to_vec(), z: vec![false; x.len()], replaced_count: 0, status };
        if !self.triggers(&cur) {
            return Ok(untouched(AttackStatus::NotTriggered));
        }
        if !self.meets_threshold() || edit_distance(&cur, &self.target) > self.budget {
            return Ok(untouched(AttackStatus::Declined));
        }
        let mut y = x.to_vec();
        let mut z = vec![false; x.len()];
        let mut edits = 0;
        loop {
            let over = (0..k).find(|&s| cur[s] > self.target[s]);
            let under = (0..k).find(|&s| cur[s] < self.target[s]);
            let (Some(from), Some(to)) = (over, under) else { break };
            let slot = rng.gen_range(0..cur[from] as usize);
            let i = y.iter().enumerate().filter(|(_, &s)| s == from).nth(slot).map(|(i, _)| i).unwrap();
            y[i] = to;
            z[i] = true;
            cur[from] -= 1;
            cur[to] += 1;
            edits += 1;
        }
        Ok(AttackOutcome { y, z, replaced_count: edits, status: AttackStatus::Attacked })
    }

    /// Exact `log2 P(the attack triggers)` when the clean samples are
    /// i.i.d. `p`.
    pub fn trigger_log2_probability(&self, p: &Distribution) -> Result<f64> {
        let table = LogFactorials::new(self.n);
        let lp = prob::log2_probs(p);
        let terms: Vec<f64> = prob::enumerate_types(self.n, p.alphabet_size())?
            .filter(|t| self.triggers(t.counts()))
            .map(|t| table.log2_type_probability(t.counts(), &lp))
            .collect();
        Ok(numeric::log2_sum(&terms))
    }
}

fn freqs(counts: &[u32]) -> Vec<f64> {
    let n: u32 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / n as f64).collect()
}

/// One-shot form of [`StrongConverseAttack`].
#[allow(clippy::too_many_arguments)]
pub fn strong_converse_attack<R: Rng + ?Sized>(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    delta: f64,
    x: &[usize],
    rng: &mut R,
    s: &SolverSettings,
) -> Result<AttackOutcome> {
    let a = StrongConverseAttack::new(p0, p1, eps, lambda_opposite, delta, x.len() as u32, s)?;
    a.attack(x, rng)
}
