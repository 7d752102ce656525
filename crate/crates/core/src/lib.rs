//! Error-exponent trade-offs for binary hypothesis testing with abstention.
//!
//! A detector observes `n` samples that were drawn i.i.d. from `P0` or `P1`
//! and possibly tampered with by an adversary. It may decide `0`, decide `1`,
//! or abstain. Abstaining is only free when the samples were contaminated;
//! on clean samples it counts as an error. This crate computes the optimal
//! trade-off between the four resulting error exponents under three
//! contamination models and checks them against exact finite-sample error
//! probabilities.
//!
//! | Model | Who picks the corrupted positions | Budget |
//! |-------|-----------------------------------|--------|
//! | [`ContaminationModel::MemorylessIngress`] | nature, each position i.i.d. `Ber(eps)` | random |
//! | [`ContaminationModel::FixedWeightUniform`] | nature, uniform over weight `ceil(n*eps)` masks | `ceil(n*eps)` |
//! | [`ContaminationModel::StrongContamination`] | the adversary | `floor(n*eps)` |
//!
//! All divergences, exponents and log-probabilities are in **bits** (base 2).
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! file system, threads or the command line lives in the companion
//! `abstain-ht` crate.
//!
//! ## Modules
//!
//! - [`prob`]: distributions, types, divergences and exact multinomial masses.
//! - [`exponents`]: the divergence programs that bound the adversarial exponents.
//! - [`detector`]: the type-based abstaining detector.
//! - [`adversary`]: contamination masks, best responses and converse attacks.
//! - [`finite_n`]: exact worst-case error probabilities and a Monte Carlo cross-check.
#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adversary;
pub mod detector;
mod error;
pub mod exponents;
pub mod finite_n;
mod model;
pub mod numeric;
pub mod prob;

pub use detector::{Decision, DecisionRegion, DetectorSpec};
pub use error::{Error, Result};
pub use exponents::{ExponentQuadruple, SolverResult, SolverSettings};
pub use model::{ContaminationModel, Hypothesis};
pub use prob::{BernoulliRate, Distribution, Divergence, TypeClass};
