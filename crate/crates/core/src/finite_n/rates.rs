use alloc::vec::Vec;

use super::exact_worstcase_adv_error;
use crate::detector::DetectorSpec;
use crate::{ContaminationModel, Error, Hypothesis, Result};

/// Least-squares fit of `rate(n) = asymptote + a log2(n) / n + b / n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub asymptote: f64,
    pub log_coefficient: f64,
    pub inverse_coefficient: f64,
    /// Root mean square of the residuals.
    pub rms_residual: f64,
    pub max_residual: f64,
}

impl RateFit {
    pub fn predict(&self, n: f64) -> f64 {
        self.asymptote + self.log_coefficient * libm::log2(n) / n + self.inverse_coefficient / n
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateStudy {
    /// `(n, -log2(E(n)) / n)` in grid order.
    pub points: Vec<(u32, f64)>,
    pub fit: RateFit,
}

/// Fits the asymptotic rate to `(n, rate)` pairs. Needs at least three
/// points with distinct `n`.
pub fn fit_rate(points: &[(u32, f64)]) -> Result<RateFit> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { need: 3, got: points.len() });
    }
    let rows: Vec<[f64; 3]> = points
        .iter()
        .map(|&(n, _)| {
            let n = n as f64;
            [1.0, libm::log2(n) / n, 1.0 / n]
        })
        .collect();
    let mut ata = [[0.0; 3]; 3];
    let mut atb = [0.0; 3];
    for (row, &(_, y)) in rows.iter().zip(points) {
        for i in 0..3 {
            atb[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let coef = solve3(ata, atb).ok_or(Error::NotApplicable("rate fit is singular; use distinct sample sizes"))?;
    let fit = RateFit {
        asymptote: coef[0],
        log_coefficient: coef[1],
        inverse_coefficient: coef[2],
        rms_residual: 0.0,
        max_residual: 0.0,
    };
    let residuals: Vec<f64> = points.iter().map(|&(n, y)| y - fit.predict(n as f64)).collect();
    let rms = libm::sqrt(residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64);
    let max = residuals.iter().map(|r| libm::fabs(*r)).fold(0.0, f64::max);
    Ok(RateFit { rms_residual: rms, max_residual: max, ..fit })
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| libm::fabs(a[i][col]).total_cmp(&libm::fabs(a[j][col])))?;
        if libm::fabs(a[pivot][col]) < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = a[row][col] / a[col][col];
            let pivot_row = a[col];
            for (x, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Exact worst-case adversarial rates over `n_grid` and their fitted
/// asymptote, for contaminated samples from `h`.
pub fn rate_convergence_study(
    spec: &DetectorSpec,
    model: &ContaminationModel,
    h: Hypothesis,
    n_grid: &[u32],
) -> Result<RateStudy> {
    if n_grid.len() < 3 {
        return Err(Error::TooFewPoints { need: 3, got: n_grid.len() });
    }
    let points = n_grid
        .iter()
        .map(|&n| Ok((n, -exact_worstcase_adv_error(spec, model, n, h)? / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_rate(&points)?;
    Ok(RateStudy { points, fit })
}
