//! Finite-alphabet probability primitives: distributions, empirical types,
//! divergences and exact multinomial type probabilities.
//!
//! Every divergence is reported in bits. A divergence against a reference
//! with a zero where the argument is positive is [`Divergence::Infinite`],
//! which orders above every finite value.

use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::{self, LN_2};
use crate::{Error, Result};

/// Largest number of types [`enumerate_types`] will produce.
pub const ENUMERATION_BUDGET: u128 = 5_000_000;

const SUM_TOLERANCE: f64 = 1e-12;

/// Read access to a probability mass function over `0..alphabet_size()`.
pub trait Pmf {
    fn alphabet_size(&self) -> usize;
    fn mass(&self, x: usize) -> f64;

    fn masses(&self) -> Vec<f64> {
        (0..self.alphabet_size()).map(|x| self.mass(x)).collect()
    }
}

/// A probability vector over a finite alphabet of at least two symbols.
///
/// [`Distribution::new`] insists on full support and is meant for the two
/// hypotheses. [`Distribution::relaxed`] admits zeros, for replacement laws
/// and mixtures that may sit on the boundary of the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let d = Self::relaxed(probs)?;
        match d.probs.iter().position(|&p| p <= 0.0) {
            Some(i) => Err(Error::NotFullSupport(i)),
            None => Ok(d),
        }
    }

    pub fn relaxed(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::AlphabetTooSmall(probs.len()));
        }
        for (index, &value) in probs.iter().enumerate() {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::InvalidProbability { index, value });
            }
        }
        let sum: f64 = probs.iter().sum();
        if libm::fabs(sum - 1.0) > SUM_TOLERANCE {
            return Err(Error::NotNormalized(sum));
        }
        Ok(Self { probs })
    }

    /// `Ber(p)` on `{0, 1}`, i.e. `[1 - p, p]`. Requires `0 < p < 1`.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfRange { name: "bernoulli parameter", value: p, lower: 0.0, upper: 1.0 });
        }
        Self::new(vec![1.0 - p, p])
    }

    pub fn uniform(alphabet_size: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::AlphabetTooSmall(alphabet_size));
        }
        Ok(Self { probs: vec![1.0 / alphabet_size as f64; alphabet_size] })
    }

    pub fn point_mass(alphabet_size: usize, symbol: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::AlphabetTooSmall(alphabet_size));
        }
        if symbol >= alphabet_size {
            return Err(Error::SymbolOutOfRange { symbol, alphabet: alphabet_size });
        }
        let mut probs = vec![0.0; alphabet_size];
        probs[symbol] = 1.0;
        Ok(Self { probs })
    }

    /// Builds a distribution from solver output: clamps rounding negatives and
    /// renormalises.
    pub(crate) fn from_raw(mut probs: Vec<f64>) -> Self {
        for p in probs.iter_mut() {
            if p.is_nan() || *p <= 0.0 {
                *p = 0.0;
            }
        }
        let s: f64 = probs.iter().sum();
        if s > 0.0 {
            probs.iter_mut().for_each(|p| *p /= s);
        }
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn is_full_support(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub(crate) fn check_same_alphabet(&self, other: &Distribution) -> Result<()> {
        if self.probs.len() != other.probs.len() {
            return Err(Error::AlphabetMismatch(self.probs.len(), other.probs.len()));
        }
        Ok(())
    }
}

impl Pmf for Distribution {
    fn alphabet_size(&self) -> usize {
        self.probs.len()
    }
    fn mass(&self, x: usize) -> f64 {
        self.probs[x]
    }
    fn masses(&self) -> Vec<f64> {
        self.probs.clone()
    }
}

impl Pmf for [f64] {
    fn alphabet_size(&self) -> usize {
        self.len()
    }
    fn mass(&self, x: usize) -> f64 {
        self[x]
    }
}

/// A parameter in `[0, 1]`: a Bernoulli mean or a contamination level.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BernoulliRate(f64);

impl BernoulliRate {
    pub fn new(value: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::OutOfRange { name: "rate", value, lower: 0.0, upper: 1.0 });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// A KL divergence in bits, or the infinite divergence.
///
/// `Finite(_) < Infinite` under the derived ordering.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub enum Divergence {
    Finite(f64),
    Infinite,
}

impl Divergence {
    fn from_bits(v: f64) -> Self {
        if v.is_finite() {
            Divergence::Finite(v.max(0.0))
        } else {
            Divergence::Infinite
        }
    }

    /// The value in bits, `f64::INFINITY` for the infinite divergence.
    pub fn bits(self) -> f64 {
        match self {
            Divergence::Finite(v) => v,
            Divergence::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Divergence::Finite(v) => Some(v),
            Divergence::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Divergence::Finite(_))
    }
}

/// `D(p || r) = sum_x p(x) log2(p(x) / r(x))`, in bits.
///
/// # Panics
/// If the alphabets differ.
pub fn kl_divergence<P: Pmf + ?Sized>(p: &P, r: &Distribution) -> Divergence {
    assert_eq!(p.alphabet_size(), r.alphabet_size(), "alphabet mismatch");
    let v: f64 = (0..r.alphabet_size()).map(|x| numeric::plogq(p.mass(x), r.probs[x])).sum();
    Divergence::from_bits(v)
}

/// `D2(rho || eps)`, the KL divergence between `Ber(rho)` and `Ber(eps)`, in bits.
pub fn binary_kl(rho: BernoulliRate, eps: BernoulliRate) -> Divergence {
    Divergence::from_bits(numeric::d2(rho.0, eps.0))
}

/// Total variation distance `(1/2) sum_x |p(x) - q(x)|`.
///
/// # Panics
/// If the alphabets differ.
pub fn tv_distance<P: Pmf + ?Sized, Q: Pmf + ?Sized>(p: &P, q: &Q) -> f64 {
    assert_eq!(p.alphabet_size(), q.alphabet_size(), "alphabet mismatch");
    0.5 * (0..p.alphabet_size()).map(|x| libm::fabs(p.mass(x) - q.mass(x))).sum::<f64>()
}

/// The mixture `(1 - w) a + w b`.
///
/// # Panics
/// If the alphabets differ or `w` is outside `[0, 1]`.
pub fn mix(a: &Distribution, b: &Distribution, w: f64) -> Distribution {
    assert_eq!(a.alphabet_size(), b.alphabet_size(), "alphabet mismatch");
    assert!((0.0..=1.0).contains(&w), "mixture weight outside [0, 1]");
    let probs = a.probs.iter().zip(&b.probs).map(|(&x, &y)| (1.0 - w) * x + w * y).collect();
    Distribution { probs }
}

/// The empirical type of a length-`n` sequence: symbol counts summing to `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TypeClass {
    counts: Vec<u32>,
    n: u32,
}

impl TypeClass {
    pub fn new(counts: Vec<u32>) -> Result<Self> {
        if counts.len() < 2 {
            return Err(Error::AlphabetTooSmall(counts.len()));
        }
        let n: u32 = counts.iter().sum();
        if n == 0 {
            return Err(Error::EmptyType);
        }
        Ok(Self { counts, n })
    }

    pub fn from_sequence(seq: &[usize], alphabet_size: usize) -> Result<Self> {
        if alphabet_size < 2 {
            return Err(Error::AlphabetTooSmall(alphabet_size));
        }
        let mut counts = vec![0u32; alphabet_size];
        for &s in seq {
            if s >= alphabet_size {
                return Err(Error::SymbolOutOfRange { symbol: s, alphabet: alphabet_size });
            }
            counts[s] += 1;
        }
        Self::new(counts)
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn frequencies(&self) -> Vec<f64> {
        let n = self.n as f64;
        self.counts.iter().map(|&c| c as f64 / n).collect()
    }

    /// The type as a (possibly non-full-support) distribution.
    pub fn to_distribution(&self) -> Distribution {
        Distribution { probs: self.frequencies() }
    }
}

impl Pmf for TypeClass {
    fn alphabet_size(&self) -> usize {
        self.counts.len()
    }
    fn mass(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.n as f64
    }
}

/// `C(m, r)` saturating at `u128::MAX`.
pub fn binomial_u128(m: u64, r: u64) -> u128 {
    if r > m {
        return 0;
    }
    let r = r.min(m - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        // acc * (m - i) / (i + 1) stays integral at every step.
        acc = match acc.checked_mul((m - i) as u128) {
            Some(v) => v / (i + 1) as u128,
            None => return u128::MAX,
        };
    }
    acc
}

/// `|Delta_n|` for an alphabet of `k` symbols: `C(n + k - 1, k - 1)`.
pub fn count_types(n: u32, alphabet_size: usize) -> u128 {
    if alphabet_size == 0 {
        return 0;
    }
    binomial_u128(n as u64 + alphabet_size as u64 - 1, alphabet_size as u64 - 1)
}

/// Fails with [`Error::BudgetExceeded`] if `Delta_n` is larger than the budget.
pub fn check_budget(n: u32, alphabet_size: usize) -> Result<u128> {
    let required = count_types(n, alphabet_size);
    if required > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded { required, budget: ENUMERATION_BUDGET });
    }
    Ok(required)
}

/// Every type of length `n` over `alphabet_size` symbols, in lexicographic
/// order of the count vectors, each exactly once.
pub fn enumerate_types(n: u32, alphabet_size: usize) -> Result<TypeIter> {
    if alphabet_size < 2 {
        return Err(Error::AlphabetTooSmall(alphabet_size));
    }
    if n == 0 {
        return Err(Error::EmptyType);
    }
    check_budget(n, alphabet_size)?;
    Ok(TypeIter::new(n, alphabet_size))
}

/// Lexicographic iterator over compositions of `n` into `k` non-negative parts.
///
/// Unlike [`enumerate_types`] this also accepts `n = 0` (yielding the single
/// all-zero composition) and performs no budget check.
#[derive(Debug, Clone)]
pub struct CompositionIter {
    next: Option<Vec<u32>>,
}

impl CompositionIter {
    pub fn new(n: u32, k: usize) -> Self {
        if k == 0 {
            return Self { next: None };
        }
        let mut first = vec![0u32; k];
        first[k - 1] = n;
        Self { next: Some(first) }
    }
}

impl Iterator for CompositionIter {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let k = current.len();
        let mut succ = current.clone();
        // Rightmost position (before the last) with mass to its right.
        let mut right = succ[k - 1];
        let mut i = k - 1;
        let mut found = false;
        while i > 0 {
            i -= 1;
            if right > 0 {
                succ[i] += 1;
                let rest = right - 1;
                for c in succ.iter_mut().skip(i + 1) {
                    *c = 0;
                }
                succ[k - 1] = rest;
                found = true;
                break;
            }
            right += succ[i];
        }
        if found {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Iterator returned by [`enumerate_types`].
#[derive(Debug, Clone)]
pub struct TypeIter {
    inner: CompositionIter,
    n: u32,
}

impl TypeIter {
    fn new(n: u32, k: usize) -> Self {
        Self { inner: CompositionIter::new(n, k), n }
    }
}

impl Iterator for TypeIter {
    type Item = TypeClass;

    fn next(&mut self) -> Option<TypeClass> {
        let counts = self.inner.next()?;
        Some(TypeClass { counts, n: self.n })
    }
}

/// Position of a composition in the lexicographic order of
/// [`CompositionIter`] / [`enumerate_types`].
pub fn type_rank(counts: &[u32]) -> usize {
    let k = counts.len();
    let mut rem: u64 = counts.iter().map(|&c| c as u64).sum();
    let mut rank: u128 = 0;
    for (i, &c) in counts.iter().enumerate().take(k.saturating_sub(1)) {
        let parts_after = (k - i - 1) as u64;
        let c = c as u64;
        // sum_{v < c} C(rem - v + parts_after - 1, parts_after - 1), by the hockey stick
        rank += binomial_u128(rem + parts_after, parts_after) - binomial_u128(rem - c + parts_after, parts_after);
        rem -= c;
    }
    rank as usize
}

/// Table of `ln(k!)` computed with the log-gamma function.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    ln_fact: Vec<f64>,
}

impl LogFactorials {
    pub fn new(max_n: u32) -> Self {
        let ln_fact = (0..=max_n).map(|k| libm::lgamma(k as f64 + 1.0)).collect();
        Self { ln_fact }
    }

    /// `log2` of the multinomial coefficient `n! / prod_x counts[x]!`.
    pub fn log2_multinomial(&self, counts: &[u32]) -> f64 {
        let n: u32 = counts.iter().sum();
        let mut ln = self.ln_fact[n as usize];
        for &c in counts {
            ln -= self.ln_fact[c as usize];
        }
        ln / LN_2
    }

    /// `log2 C(n, k)`.
    pub fn log2_binomial(&self, n: u32, k: u32) -> f64 {
        (self.ln_fact[n as usize] - self.ln_fact[k as usize] - self.ln_fact[(n - k) as usize]) / LN_2
    }

    /// Exact `log2 P(type = counts)` for i.i.d. draws with per-symbol `log2p`.
    pub fn log2_type_probability(&self, counts: &[u32], log2p: &[f64]) -> f64 {
        let mut acc = self.log2_multinomial(counts);
        for (&c, &lp) in counts.iter().zip(log2p) {
            if c > 0 {
                if lp == f64::NEG_INFINITY {
                    return f64::NEG_INFINITY;
                }
                acc += c as f64 * lp;
            }
        }
        acc
    }
}

/// Per-symbol `log2 p(x)`.
pub fn log2_probs(p: &Distribution) -> Vec<f64> {
    p.probs.iter().map(|&x| if x > 0.0 { libm::log2(x) } else { f64::NEG_INFINITY }).collect()
}

/// `log2` of the exact probability that `n` i.i.d. draws from `p` have type `t`:
/// `log2 multinomial(n; counts) + sum_x counts[x] log2 p(x)`.
///
/// # Panics
/// If the alphabets differ.
pub fn log_type_probability(t: &TypeClass, p: &Distribution) -> f64 {
    assert_eq!(t.alphabet_size(), p.alphabet_size(), "alphabet mismatch");
    let table = LogFactorials::new(t.n);
    table.log2_type_probability(&t.counts, &log2_probs(p))
}
