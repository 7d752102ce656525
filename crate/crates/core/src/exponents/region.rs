use alloc::vec::Vec;

use super::{adversarial_exponent, nonadv_boundary, ExponentQuadruple, SolverSettings};
use crate::model::ContaminationModel;
use crate::prob::Distribution;
use crate::Result;

/// The swept variable of a region curve.
#[derive(Debug, Clone, PartialEq)]
pub enum Sweep {
    /// `lambda_0abs_1` over the given values, at the model's `eps`.
    Lambda01 { values: Vec<f64> },
    /// `eps` over the given values, at a fixed `lambda_0abs_1`.
    Eps { lambda01: f64, values: Vec<f64> },
}

impl Sweep {
    pub fn len(&self) -> usize {
        match self {
            Sweep::Lambda01 { values } | Sweep::Eps { values, .. } => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionPoint {
    pub eps: f64,
    pub exponents: ExponentQuadruple,
}

/// One point of the trade-off: given `lambda_0abs_1`, the boundary value of
/// `lambda_1abs_0` and the two adversarial exponents (the second with the
/// roles of the hypotheses swapped).
pub fn region_point(
    p0: &Distribution,
    p1: &Distribution,
    model: &ContaminationModel,
    lambda01: f64,
    s: &SolverSettings,
) -> Result<RegionPoint> {
    let lambda10 = nonadv_boundary(p0, p1, lambda01)?.value;
    let adv10 = adversarial_exponent(model, p0, p1, lambda01, s)?.value;
    let adv01 = adversarial_exponent(model, p1, p0, lambda10, s)?.value;
    Ok(RegionPoint {
        eps: model.eps(),
        exponents: ExponentQuadruple {
            lambda_1abs_0: lambda10,
            lambda_0abs_1: lambda01,
            lambda_adv_1_0: adv10,
            lambda_adv_0_1: adv01,
        },
    })
}

/// The sequence of [`region_point`]s along `sweep`, in sweep order.
///
/// Points are independent of each other; callers that want parallelism can
/// map [`region_point`] over the sweep themselves.
pub fn region_curve(
    p0: &Distribution,
    p1: &Distribution,
    model: &ContaminationModel,
    sweep: &Sweep,
    s: &SolverSettings,
) -> Result<Vec<RegionPoint>> {
    s.validate()?;
    match sweep {
        Sweep::Lambda01 { values } => values.iter().map(|&l| region_point(p0, p1, model, l, s)).collect(),
        Sweep::Eps { lambda01, values } => values
            .iter()
            .map(|&e| region_point(p0, p1, &model.with_eps(e)?, *lambda01, s))
            .collect(),
    }
}
