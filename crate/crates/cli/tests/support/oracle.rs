//! Reference values for binary alphabets by nested one-dimensional scans.
//!
//! Every program is reduced to an outer scalar scanned on a 1e-4 grid over
//! its feasible interval, refined by golden section around the best grid
//! point. Inner minimisations are convex in one variable and solved by
//! golden section over explicit intervals.

pub const STEP: f64 = 1e-4;

pub fn d2(a: f64, b: f64) -> f64 {
    let t = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    t(a, b) + t(1.0 - a, 1.0 - b)
}

/// Minimum of a unimodal `f` on `[lo, hi]`.
pub fn golden<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return f(lo);
    }
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if b - a < 1e-15 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    f(lo).min(f(hi)).min(fc).min(fd)
}

/// Scan `f` over `[lo, hi]` on a `STEP` grid, then refine around the best
/// point.
pub fn scan<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> f64 {
    if hi < lo {
        return f64::INFINITY;
    }
    let steps = ((hi - lo) / STEP).ceil().max(1.0) as usize;
    let x = |i: usize| (lo + (hi - lo) * i as f64 / steps as f64).min(hi);
    let (mut best, mut at) = (f64::INFINITY, 0);
    for i in 0..=steps {
        let v = f(x(i));
        if v < best {
            best = v;
            at = i;
        }
    }
    let a = x(at.saturating_sub(1));
    let b = x((at + 1).min(steps));
    best.min(golden(&f, a, b))
}

/// Endpoints of `{x : d2(x, c) <= r}` by bisection on each side of `c`.
pub fn ball(c: f64, r: f64) -> (f64, f64) {
    let edge = |inside: f64, outside: f64| {
        let (mut i, mut o) = (inside, outside);
        if d2(o, c) <= r {
            return o;
        }
        for _ in 0..200 {
            let m = 0.5 * (i + o);
            if d2(m, c) <= r {
                i = m;
            } else {
                o = m;
            }
        }
        i
    };
    (edge(c, 0.0), edge(c, 1.0))
}

pub fn nonadv(a0: f64, a1: f64, lambda: f64) -> f64 {
    let (a, b) = ball(a1, lambda);
    scan(|q| d2(q, a0), a, b)
}

/// Outer: the adversary's distribution `u`. Inner: the closest point of the
/// ball to the mixture.
pub fn memoryless(a0: f64, a1: f64, eps: f64, lambda: f64) -> f64 {
    let (a, b) = ball(a1, lambda);
    scan(|u| golden(|p| d2(p, (1.0 - eps) * a0 + eps * u), a, b), 0.0, 1.0)
}

/// Feasible `q` for weight `w`: some `u` puts `(1 - w) q + w u` in `[a, b]`.
fn weighted_interval(a: f64, b: f64, w: f64) -> (f64, f64) {
    (((a - w) / (1.0 - w)).max(0.0), (b / (1.0 - w)).min(1.0))
}

/// Outer: the clean component `q` over its feasibility interval.
pub fn fixed_weight(a0: f64, a1: f64, eps: f64, lambda: f64) -> f64 {
    let (a, b) = ball(a1, lambda);
    let (lo, hi) = weighted_interval(a, b, eps);
    scan(|q| (1.0 - eps) * d2(q, a0), lo, hi)
}

/// Outer: the observed `p` in the ball. Inner: the clean `q` within total
/// variation `eps` of it.
pub fn strong(a0: f64, a1: f64, eps: f64, lambda: f64) -> f64 {
    let (a, b) = ball(a1, lambda);
    scan(|p| golden(|q| d2(q, a0), (p - eps).max(0.0), (p + eps).min(1.0)), a, b)
}

/// Outer: the realised weight `rho`. Inner: the clean component.
pub fn rho_form(a0: f64, a1: f64, eps: f64, lambda: f64) -> f64 {
    let (a, b) = ball(a1, lambda);
    let g = |rho: f64| {
        let (lo, hi) = weighted_interval(a, b, rho);
        if hi < lo {
            return f64::INFINITY;
        }
        d2(rho, eps) + (1.0 - rho) * golden(|q| d2(q, a0), lo, hi)
    };
    scan(g, 0.0, 1.0 - 1e-9)
}
