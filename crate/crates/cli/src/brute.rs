//! Grid-search reference values for binary alphabets, used by `validate`
//! as spot checks on the solvers. Slow and approximate by design.

use crate::config::ModelKind;

fn d2(a: f64, b: f64) -> f64 {
    let t = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    t(a, b) + t(1.0 - a, 1.0 - b)
}

/// Minimum of `f` over `[0, 1]^2`: a `steps x steps` grid, then four zooms
/// of ten around every cell tied with the best. `None` marks infeasible
/// points.
pub fn grid_min<F: Fn(f64, f64) -> Option<f64>>(f: F, steps: usize) -> f64 {
    let scan = |centres: &[(f64, f64)], half: f64, k: usize| {
        let mut cells = Vec::new();
        for &(ca, cb) in centres {
            for i in 0..=k {
                for j in 0..=k {
                    let a = (ca - half + 2.0 * half * i as f64 / k as f64).clamp(0.0, 1.0);
                    let b = (cb - half + 2.0 * half * j as f64 / k as f64).clamp(0.0, 1.0);
                    if let Some(v) = f(a, b) {
                        cells.push((v, a, b));
                    }
                }
            }
        }
        let best = cells.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let ties: Vec<(f64, f64)> = cells.iter().filter(|c| c.0 <= best + 1e-12).map(|c| (c.1, c.2)).collect();
        let stride = ties.len().div_ceil(16).max(1);
        let mut keep: Vec<(f64, f64)> = ties.iter().step_by(stride).copied().collect();
        keep.extend(ties.last());
        (best, keep)
    };
    let (mut best, mut centres) = scan(&[(0.5, 0.5)], 0.5, steps);
    let mut half = 2.0 / steps as f64;
    for _ in 0..4 {
        let (b, c) = scan(&centres, half, 40);
        best = best.min(b);
        centres = c;
        half /= 10.0;
    }
    best
}

/// Adversarial exponent for `P0 = Ber(a0)`, `P1 = Ber(a1)` by grid search
/// over the two scalar parameters of each program.
pub fn binary_exponent(kind: ModelKind, a0: f64, a1: f64, eps: f64, lambda: f64) -> f64 {
    let ball = |x: f64| d2(x, a1) <= lambda;
    match kind {
        ModelKind::Ber => grid_min(|u, p| ball(p).then(|| d2(p, (1.0 - eps) * a0 + eps * u)), 1000),
        ModelKind::Fw => grid_min(|q, u| ball((1.0 - eps) * q + eps * u).then(|| (1.0 - eps) * d2(q, a0)), 1000),
        ModelKind::Adv => grid_min(|p, q| (ball(p) && (p - q).abs() <= eps).then(|| d2(q, a0)), 1000),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_a_known_minimum() {
        let v = grid_min(|a, b| (a + b >= 0.5).then(|| (a - 0.3).powi(2) + b * b), 200);
        // minimum of (a - 0.3)^2 + b^2 on a + b >= 0.5 is at (0.4, 0.1)
        assert!((v - 0.02).abs() < 1e-8, "{v}");
    }
}
