//! The type-based detector with abstention.
//!
//! A sequence is judged only through its type `t`: decide `0` if
//! `D(t || P0) <= l10 + delta`, decide `1` if `D(t || P1) <= l01 + delta`,
//! and abstain otherwise. The two balls must be disjoint, which is checked
//! when the spec is built, so the rule never has to break a tie.

use alloc::vec::Vec;

use crate::exponents::check_disjoint;
use crate::prob::{self, log2_probs, CompositionIter, Distribution, TypeClass};
use crate::{Error, Hypothesis, Result};

/// Back-off added to both radii when none is given, in bits.
pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    Zero,
    One,
    Abstain,
}

impl Decision {
    /// The decision that counts as a misclassification under `h`.
    pub fn wrong_for(h: Hypothesis) -> Self {
        match h {
            Hypothesis::H0 => Decision::One,
            Hypothesis::H1 => Decision::Zero,
        }
    }

    /// The decision that is correct under `h`.
    pub fn right_for(h: Hypothesis) -> Self {
        match h {
            Hypothesis::H0 => Decision::Zero,
            Hypothesis::H1 => Decision::One,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorSpec {
    p0: Distribution,
    p1: Distribution,
    l10: f64,
    l01: f64,
    delta: f64,
    log2_p0: Vec<f64>,
    log2_p1: Vec<f64>,
}

impl DetectorSpec {
    /// Radii `l10`, `l01` in bits, back-off `delta >= 0`.
    ///
    /// Fails with [`Error::OverlappingBalls`] if `B_KL(P0, l10 + delta)` and
    /// `B_KL(P1, l01 + delta)` intersect.
    pub fn new(p0: Distribution, p1: Distribution, l10: f64, l01: f64, delta: f64) -> Result<Self> {
        p0.check_same_alphabet(&p1)?;
        for d in [&p0, &p1] {
            if !d.is_full_support() {
                let at = d.probs().iter().position(|&x| x <= 0.0).unwrap_or(0);
                return Err(Error::NotFullSupport(at));
            }
        }
        for (name, v) in [("l10", l10), ("l01", l01)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::OutOfRange { name, value: v, lower: 0.0, upper: f64::INFINITY });
            }
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::OutOfRange { name: "delta", value: delta, lower: 0.0, upper: f64::INFINITY });
        }
        let (r0, r1) = (l10 + delta, l01 + delta);
        if !check_disjoint(&p0, &p1, r0, r1) {
            return Err(Error::OverlappingBalls { l10: r0, l01: r1 });
        }
        let log2_p0 = log2_probs(&p0);
        let log2_p1 = log2_probs(&p1);
        Ok(Self { p0, p1, l10, l01, delta, log2_p0, log2_p1 })
    }

    /// [`DetectorSpec::new`] with `delta =` [`DEFAULT_DELTA`].
    pub fn with_default_delta(p0: Distribution, p1: Distribution, l10: f64, l01: f64) -> Result<Self> {
        Self::new(p0, p1, l10, l01, DEFAULT_DELTA)
    }

    pub fn p0(&self) -> &Distribution {
        &self.p0
    }

    pub fn p1(&self) -> &Distribution {
        &self.p1
    }

    pub fn l10(&self) -> f64 {
        self.l10
    }

    pub fn l01(&self) -> f64 {
        self.l01
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn alphabet_size(&self) -> usize {
        self.p0.alphabet_size()
    }

    /// The hypothesis distribution of `h`.
    pub fn hypothesis(&self, h: Hypothesis) -> &Distribution {
        match h {
            Hypothesis::H0 => &self.p0,
            Hypothesis::H1 => &self.p1,
        }
    }

    /// The same spec with another back-off.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.p0.clone(), self.p1.clone(), self.l10, self.l01, delta)
    }

    fn divergence(counts: &[u32], n: f64, log2_p: &[f64]) -> f64 {
        counts
            .iter()
            .zip(log2_p)
            .filter(|(&c, _)| c > 0)
            .map(|(&c, &lp)| {
                let f = c as f64 / n;
                f * (libm::log2(f) - lp)
            })
            .sum()
    }

    /// Decision for a raw count vector.
    ///
    /// # Panics
    /// If the length differs from the alphabet size or all counts are zero.
    pub fn decide_counts(&self, counts: &[u32]) -> Decision {
        assert_eq!(counts.len(), self.alphabet_size(), "alphabet mismatch");
        let n: u32 = counts.iter().sum();
        assert!(n > 0, "empty type");
        let n = n as f64;
        if Self::divergence(counts, n, &self.log2_p0) <= self.l10 + self.delta {
            Decision::Zero
        } else if Self::divergence(counts, n, &self.log2_p1) <= self.l01 + self.delta {
            Decision::One
        } else {
            Decision::Abstain
        }
    }

    /// # Panics
    /// If `t` is over a different alphabet.
    pub fn decide(&self, t: &TypeClass) -> Decision {
        self.decide_counts(t.counts())
    }

    /// Decision for a sequence of symbols.
    pub fn decide_sequence(&self, seq: &[usize]) -> Result<Decision> {
        let t = TypeClass::from_sequence(seq, self.alphabet_size())?;
        Ok(self.decide(&t))
    }

    /// Decisions for every type in `Delta_n`, indexed by [`prob::type_rank`].
    pub fn decision_region(&self, n: u32) -> Result<DecisionRegion> {
        decision_region(self, n)
    }
}

/// The partition of `Delta_n` induced by a detector. Types are stored in
/// the order of [`prob::enumerate_types`].
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRegion {
    n: u32,
    alphabet_size: usize,
    decisions: Vec<Decision>,
}

impl DecisionRegion {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Decisions indexed by type rank.
    pub fn decisions(&self) -> &[Decision] {
        &self.decisions
    }

    /// Decision of the type with the given counts.
    pub fn decision_of(&self, counts: &[u32]) -> Decision {
        self.decisions[prob::type_rank(counts)]
    }

    /// `(|Zero|, |One|, |Abstain|)`.
    pub fn cardinalities(&self) -> (usize, usize, usize) {
        let mut c = (0, 0, 0);
        for d in &self.decisions {
            match d {
                Decision::Zero => c.0 += 1,
                Decision::One => c.1 += 1,
                Decision::Abstain => c.2 += 1,
            }
        }
        c
    }

    /// The types assigned `d`, in enumeration order.
    pub fn members(&self, d: Decision) -> impl Iterator<Item = Vec<u32>> + '_ {
        CompositionIter::new(self.n, self.alphabet_size)
            .zip(self.decisions.iter())
            .filter(move |(_, &x)| x == d)
            .map(|(c, _)| c)
    }
}

/// See [`DetectorSpec::decision_region`].
pub fn decision_region(spec: &DetectorSpec, n: u32) -> Result<DecisionRegion> {
    let k = spec.alphabet_size();
    let decisions = prob::enumerate_types(n, k)?.map(|t| spec.decide(&t)).collect();
    Ok(DecisionRegion { n, alphabet_size: k, decisions })
}
