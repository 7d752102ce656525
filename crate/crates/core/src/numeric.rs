//! Scalar numerics shared by the solvers and the exact evaluators.
//!
//! Everything here is base 2. `0 * log(0/x)` is taken as `0`, and a positive
//! mass against a zero reference gives `f64::INFINITY`.

use alloc::vec::Vec;

pub const LN_2: f64 = core::f64::consts::LN_2;

/// `p * log2(p / q)` with the usual conventions at zero.
#[inline]
pub fn plogq(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * libm::log2(p / q)
    }
}

/// KL divergence of two probability slices in bits.
pub fn kl_bits(p: &[f64], r: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), r.len());
    p.iter().zip(r).map(|(&a, &b)| plogq(a, b)).sum()
}

/// Binary KL divergence `D2(rho || eps)` in bits.
#[inline]
pub fn d2(rho: f64, eps: f64) -> f64 {
    plogq(rho, eps) + plogq(1.0 - rho, 1.0 - eps)
}

/// Total variation distance of two probability slices.
pub fn tv(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    0.5 * p.iter().zip(q).map(|(&a, &b)| libm::fabs(a - b)).sum::<f64>()
}

/// `log2(2^a + 2^b)` without overflow.
#[inline]
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + libm::log2(1.0 + libm::exp2(lo - hi))
}

/// `log2(sum_i 2^terms[i])`, reduced over a fixed pairwise tree so the result
/// depends only on the order of `terms`.
pub fn log2_sum(terms: &[f64]) -> f64 {
    const LEAF: usize = 8;
    match terms.len() {
        0 => f64::NEG_INFINITY,
        1 => terms[0],
        n if n <= LEAF => {
            let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == f64::NEG_INFINITY {
                return max;
            }
            let s: f64 = terms.iter().map(|&t| libm::exp2(t - max)).sum();
            max + libm::log2(s)
        }
        n => {
            let (a, b) = terms.split_at(n / 2);
            log2_add(log2_sum(a), log2_sum(b))
        }
    }
}

/// Pairwise sum of plain reals (fixed reduction tree).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Bisection for a sign change of a monotone function on `[lo, hi]`. The signs
/// of `f(lo)` and `f(hi)` are assumed to differ. Returns the final bracket
/// `(a, b)`, where `f(a)` has the sign of `f(lo)`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let lo_sign = f(lo) < 0.0;
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) < 0.0) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Golden-section search for the minimum of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`. The endpoints are compared too, so a minimum at the
/// boundary of the bracket is found.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut guard = 0;
    while b - a > tol && guard < 200 {
        guard += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mut best = if fc <= fd { (c, fc) } else { (d, fd) };
    for x in [lo, hi] {
        let fx = f(x);
        if fx < best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Grid scan followed by golden-section refinement around the best grid point.
/// Suited to convex (or unimodal) functions on an interval.
pub fn scan_and_refine<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    grid: usize,
    tol: f64,
) -> (f64, f64) {
    if hi <= lo {
        return (lo, f(lo));
    }
    let grid = grid.max(2);
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best_i = 0;
    let mut best_v = f64::INFINITY;
    for i in 0..grid {
        let x = if i + 1 == grid { hi } else { lo + step * i as f64 };
        let v = f(x);
        if v < best_v {
            best_v = v;
            best_i = i;
        }
    }
    let a = if best_i == 0 { lo } else { lo + step * (best_i - 1) as f64 };
    let b = if best_i + 1 >= grid { hi } else { lo + step * (best_i + 1) as f64 };
    let (x, v) = golden_section(&mut f, a, b.min(hi), tol);
    if v <= best_v {
        (x, v)
    } else {
        let x = if best_i + 1 == grid { hi } else { lo + step * best_i as f64 };
        (x, best_v)
    }
}

/// Indices of `keys` sorted descending (stable, NaN-free input assumed).
pub(crate) fn argsort_desc(keys: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&i, &j| keys[j].partial_cmp(&keys[i]).unwrap_or(core::cmp::Ordering::Equal));
    idx
}
