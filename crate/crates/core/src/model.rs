use crate::prob::BernoulliRate;
use crate::{Error, Result};

/// Which hypothesis generated the clean samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    H0,
    H1,
}

impl Hypothesis {
    pub fn index(self) -> usize {
        match self {
            Hypothesis::H0 => 0,
            Hypothesis::H1 => 1,
        }
    }

    pub fn other(self) -> Self {
        match self {
            Hypothesis::H0 => Hypothesis::H1,
            Hypothesis::H1 => Hypothesis::H0,
        }
    }
}

/// A contamination model and its corruption level `eps in (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContaminationModel {
    /// Each position is independently exposed to the adversary with probability `eps`.
    MemorylessIngress(BernoulliRate),
    /// A uniformly random set of `ceil(n * eps)` positions is exposed.
    FixedWeightUniform(BernoulliRate),
    /// The adversary edits up to `floor(n * eps)` positions of its choice.
    StrongContamination(BernoulliRate),
}

impl ContaminationModel {
    fn checked(eps: f64) -> Result<BernoulliRate> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::OutOfRange { name: "eps", value: eps, lower: 0.0, upper: 1.0 });
        }
        BernoulliRate::new(eps)
    }

    pub fn memoryless(eps: f64) -> Result<Self> {
        Ok(Self::MemorylessIngress(Self::checked(eps)?))
    }

    pub fn fixed_weight(eps: f64) -> Result<Self> {
        Ok(Self::FixedWeightUniform(Self::checked(eps)?))
    }

    pub fn strong(eps: f64) -> Result<Self> {
        Ok(Self::StrongContamination(Self::checked(eps)?))
    }

    pub fn eps(&self) -> f64 {
        match self {
            Self::MemorylessIngress(e) | Self::FixedWeightUniform(e) | Self::StrongContamination(e) => {
                e.value()
            }
        }
    }

    /// The same model at a different corruption level.
    pub fn with_eps(&self, eps: f64) -> Result<Self> {
        match self {
            Self::MemorylessIngress(_) => Self::memoryless(eps),
            Self::FixedWeightUniform(_) => Self::fixed_weight(eps),
            Self::StrongContamination(_) => Self::strong(eps),
        }
    }

    /// Short tag used in file columns: `ber`, `fw` or `adv`.
    pub fn tag(&self) -> &'static str {
        match self {
            Self::MemorylessIngress(_) => "ber",
            Self::FixedWeightUniform(_) => "fw",
            Self::StrongContamination(_) => "adv",
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::MemorylessIngress(_) => "memoryless",
            Self::FixedWeightUniform(_) => "fixed-weight",
            Self::StrongContamination(_) => "strong",
        }
    }

    /// Number of exposed positions for the fixed-weight model, `ceil(n * eps)`.
    pub fn fixed_weight_count(n: u32, eps: f64) -> u32 {
        // nudge so that e.g. 30 * 0.1 = 3.0000000000000004 is not rounded up
        let k = libm::ceil(n as f64 * eps - 1e-9);
        (k.max(0.0) as u32).min(n)
    }

    /// Edit budget for strong contamination, `floor(n * eps)`.
    pub fn strong_budget(n: u32, eps: f64) -> u32 {
        let k = libm::floor(n as f64 * eps + 1e-9);
        (k.max(0.0) as u32).min(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets_round_the_right_way() {
        assert_eq!(ContaminationModel::fixed_weight_count(10, 0.25), 3);
        assert_eq!(ContaminationModel::strong_budget(10, 0.25), 2);
        assert_eq!(ContaminationModel::fixed_weight_count(30, 0.1), 3);
        assert_eq!(ContaminationModel::strong_budget(30, 0.1), 3);
        assert_eq!(ContaminationModel::fixed_weight_count(12, 0.25), 3);
        assert_eq!(ContaminationModel::strong_budget(12, 0.25), 3);
        assert_eq!(ContaminationModel::strong_budget(7, 0.1), 0);
    }

    #[test]
    fn eps_must_be_interior() {
        assert!(ContaminationModel::memoryless(0.0).is_err());
        assert!(ContaminationModel::strong(1.0).is_err());
        assert_eq!(ContaminationModel::fixed_weight(0.2).unwrap().eps(), 0.2);
    }
}
