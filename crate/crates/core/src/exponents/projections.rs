//! Closed-form inner problems. Each is a small convex program whose KKT
//! conditions reduce to a water level found by sorting.

use alloc::vec;
use alloc::vec::Vec;

use crate::numeric::{self, argsort_desc, bisect, kl_bits};

const BISECT_ITERS: usize = 200;

/// `argmin_{m >= floor, sum m = 1} D(p || m)` for a floor with total mass
/// at most one: `m_x = max(floor_x, p_x / mu)`.
pub(crate) fn mixture_projection(p: &[f64], floor: &[f64]) -> Vec<f64> {
    let k = p.len();
    let floor_mass: f64 = floor.iter().sum();
    if floor_mass <= 0.0 {
        return p.to_vec();
    }
    if floor_mass >= 1.0 - 1e-15 {
        return floor.to_vec();
    }
    let ratio: Vec<f64> = p
        .iter()
        .zip(floor)
        .map(|(&a, &f)| if f > 0.0 { a / f } else { f64::INFINITY })
        .collect();
    let order = argsort_desc(&ratio);
    let mut sp = 0.0;
    let mut rest = floor_mass;
    for (j, &i) in order.iter().enumerate() {
        sp += p[i];
        rest -= floor[i];
        let denom = 1.0 - rest;
        if denom <= 0.0 {
            continue;
        }
        let mu = sp / denom;
        let inside_ok = ratio[i] >= mu;
        let outside_ok = j + 1 == k || ratio[order[j + 1]] <= mu;
        if inside_ok && outside_ok && mu > 0.0 {
            let mut m = floor.to_vec();
            for &s in &order[..=j] {
                m[s] = p[s] / mu;
            }
            return m;
        }
    }
    // Only reachable through rounding when p and the floor nearly coincide.
    let mut m: Vec<f64> = p.iter().zip(floor).map(|(&a, &f)| a.max(f)).collect();
    let s: f64 = m.iter().sum();
    m.iter_mut().for_each(|x| *x /= s);
    m
}

/// `argmin_{m >= floor, sum m = 1} D(m || r)`: `m_x = max(floor_x, s r_x)`.
pub(crate) fn floor_information_projection(r: &[f64], floor: &[f64]) -> Vec<f64> {
    let k = r.len();
    let ratio: Vec<f64> = floor.iter().zip(r).map(|(&f, &x)| f / x).collect();
    // Floor-bound symbols are those with the largest floor/r ratio.
    let order = argsort_desc(&ratio);
    let mut bound_floor = 0.0;
    let mut free_r: f64 = r.iter().sum();
    for j in 0..=k {
        if j > 0 {
            let i = order[j - 1];
            bound_floor += floor[i];
            free_r -= r[i];
        }
        if j == k {
            break;
        }
        let s = (1.0 - bound_floor) / free_r;
        let bound_ok = j == 0 || ratio[order[j - 1]] >= s;
        let free_ok = ratio[order[j]] <= s;
        if bound_ok && free_ok && s > 0.0 {
            let mut m = floor.to_vec();
            for &i in &order[j..] {
                m[i] = s * r[i];
            }
            return m;
        }
    }
    let s: f64 = floor.iter().sum();
    floor.iter().map(|&f| f / s).collect()
}

/// `argmin_{q <= caps, sum q = 1} D(q || r)` for caps with total mass at
/// least one: `q_x = min(caps_x, s r_x)`.
pub(crate) fn capped_projection(caps: &[f64], r: &[f64]) -> Vec<f64> {
    let k = caps.len();
    let ratio: Vec<f64> = caps.iter().zip(r).map(|(&c, &x)| c / x).collect();
    // Capped symbols are those with the smallest caps/r ratio.
    let mut order = argsort_desc(&ratio);
    order.reverse();
    let mut capped = 0.0;
    let mut free_r: f64 = r.iter().sum();
    for j in 0..k {
        if j > 0 {
            let i = order[j - 1];
            capped += caps[i];
            free_r -= r[i];
        }
        let s = (1.0 - capped) / free_r;
        let capped_ok = j == 0 || ratio[order[j - 1]] <= s;
        let free_ok = ratio[order[j]] >= s;
        if capped_ok && free_ok && s >= 0.0 {
            let mut q = caps.to_vec();
            for &i in &order[j..] {
                q[i] = s * r[i];
            }
            return q;
        }
    }
    let s: f64 = caps.iter().sum();
    caps.iter().map(|&c| c / s).collect()
}

/// `argmin_{TV(q, p) <= eps} D(q || r)`: `q = clamp(p, lo * r, hi * r)` with
/// levels chosen so that exactly `eps` of mass is moved.
pub(crate) fn tv_projection(p: &[f64], r: &[f64], eps: f64) -> Vec<f64> {
    if numeric::tv(p, r) <= eps {
        return r.to_vec();
    }
    let k = p.len();
    let ratio: Vec<f64> = p.iter().zip(r).map(|(&a, &b)| a / b).collect();
    let desc = argsort_desc(&ratio);

    let mut hi = ratio[desc[0]];
    let (mut sp, mut sr) = (0.0, 0.0);
    for j in 0..k {
        let i = desc[j];
        sp += p[i];
        sr += r[i];
        let h = (sp - eps) / sr;
        let next = if j + 1 < k { ratio[desc[j + 1]] } else { f64::NEG_INFINITY };
        if h <= ratio[i] && h >= next {
            hi = h;
            break;
        }
    }

    let mut lo = ratio[desc[k - 1]];
    let (mut sp, mut sr) = (0.0, 0.0);
    for j in 0..k {
        let i = desc[k - 1 - j];
        sp += p[i];
        sr += r[i];
        let l = (sp + eps) / sr;
        let next = if j + 1 < k { ratio[desc[k - 2 - j]] } else { f64::INFINITY };
        if l >= ratio[i] && l <= next {
            lo = l;
            break;
        }
    }

    let q: Vec<f64> = p
        .iter()
        .zip(r)
        .map(|(&a, &b)| a.clamp(lo * b, hi.max(lo) * b))
        .collect();
    let s: f64 = q.iter().sum();
    q.into_iter().map(|x| x / s).collect()
}

/// Normalised geometric mixture `y^(1-t) r^t`.
pub(crate) fn geometric_mixture(y: &[f64], r: &[f64], t: f64) -> Vec<f64> {
    let logs: Vec<f64> = y
        .iter()
        .zip(r)
        .map(|(&a, &b)| {
            if a <= 0.0 && t < 1.0 {
                f64::NEG_INFINITY
            } else {
                (1.0 - t) * libm::log2(a.max(f64::MIN_POSITIVE)) + t * libm::log2(b)
            }
        })
        .collect();
    let z = numeric::log2_sum(&logs);
    logs.iter().map(|&l| libm::exp2(l - z)).collect()
}

/// `argmin_{D(p || r) <= radius} D(p || y)`, which lies on the geometric
/// path from `y` to `r`. The returned point is on the feasible side.
pub(crate) fn kl_ball_projection(y: &[f64], r: &[f64], radius: f64) -> Vec<f64> {
    if kl_bits(y, r) <= radius {
        return y.to_vec();
    }
    let (_, t) = bisect(|t| kl_bits(&geometric_mixture(y, r, t), r) - radius, 0.0, 1.0, BISECT_ITERS);
    geometric_mixture(y, r, t)
}

/// Interval `[lo, hi]` of the mean `x` with `D2(x || centre) <= radius`.
pub(crate) fn binary_ball(centre: f64, radius: f64) -> (f64, f64) {
    let lo = if numeric::d2(0.0, centre) <= radius {
        0.0
    } else {
        bisect(|x| numeric::d2(x, centre) - radius, 0.0, centre, BISECT_ITERS).1
    };
    let hi = if numeric::d2(1.0, centre) <= radius {
        1.0
    } else {
        bisect(|x| numeric::d2(x, centre) - radius, 1.0, centre, BISECT_ITERS).1
    };
    (lo, hi)
}

pub(crate) fn binary(x: f64) -> Vec<f64> {
    vec![1.0 - x, x]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn mixture_projection_kkt() {
        let p = [0.6, 0.3, 0.1];
        let floor = [0.45, 0.27, 0.18];
        let m = mixture_projection(&p, &floor);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!(m.iter().zip(&floor).all(|(a, b)| *a >= b - 1e-15));
        // p already dominates floor -> unconstrained optimum m = p
        let m = mixture_projection(&[0.5, 0.5], &[0.1, 0.2]);
        assert!(close(&m, &[0.5, 0.5], 1e-15));
    }

    #[test]
    fn capped_projection_respects_caps() {
        let r = [0.7, 0.2, 0.1];
        let caps = [0.5, 0.6, 0.9];
        let q = capped_projection(&caps, &r);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        assert!((q[0] - 0.5).abs() < 1e-15);
        assert!((q[1] / q[2] - 2.0).abs() < 1e-12);
        let q = capped_projection(&[1.0, 1.0, 1.0], &r);
        assert!(close(&q, &r, 1e-15));
    }

    #[test]
    fn tv_projection_moves_exactly_eps() {
        let p = [0.1, 0.2, 0.7];
        let r = [0.6, 0.3, 0.1];
        let q = tv_projection(&p, &r, 0.15);
        assert!((numeric::tv(&p, &q) - 0.15).abs() < 1e-14);
        assert!((q.iter().sum::<f64>() - 1.0).abs() < 1e-14);
        let q = tv_projection(&p, &r, 0.9);
        assert!(close(&q, &r, 1e-15));
    }

    #[test]
    fn ball_projection_lands_on_boundary() {
        let y = [0.8, 0.1, 0.1];
        let r = [0.2, 0.3, 0.5];
        let p = kl_ball_projection(&y, &r, 0.1);
        let d = kl_bits(&p, &r);
        assert!(d <= 0.1 && d > 0.1 - 1e-12);
    }

    #[test]
    fn binary_ball_edges() {
        let (lo, hi) = binary_ball(0.5, 0.05);
        assert!(numeric::d2(lo, 0.5) <= 0.05 && numeric::d2(hi, 0.5) <= 0.05);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert_eq!(binary_ball(0.5, 2.0), (0.0, 1.0));
    }
}
