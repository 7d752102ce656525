//! Optimal exponent trade-offs as divergence programs.
//!
//! Every adversarial exponent here has the form `min_{p in B} h(p)`, where
//! `B = {p : D(p || P1) <= lambda}` is the KL ball around the alternative and
//! `h` is convex. The inner function `h` is solved in closed form for each
//! model (see [`projections`]), so only the outer search over the ball is
//! iterative:
//!
//! - binary alphabets: the ball is an interval, searched by a grid scan
//!   followed by golden-section refinement;
//! - larger alphabets: entropic mirror descent with an exact KL projection
//!   back onto the ball and a backtracking step size.
//!
//! When some `p` in the ball has `h(p) = 0` the exponent is reported as `0`
//! and [`Certificate::zero`] is set.
//!
//! All values are in bits.

mod projections;
mod region;

use alloc::vec::Vec;

pub use region::{region_curve, region_point, RegionPoint, Sweep};

use crate::model::ContaminationModel;
use crate::numeric::{self, kl_bits};
use crate::prob::{BernoulliRate, Distribution};
use crate::{Error, Result};

use projections::{
    binary, binary_ball, capped_projection, floor_information_projection, kl_ball_projection, mixture_projection,
    tv_projection,
};

/// The four exponents of a detector with abstention, in bits per sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentQuadruple {
    /// Decay rate of "not 0" under clean `P0`.
    pub lambda_1abs_0: f64,
    /// Decay rate of "not 1" under clean `P1`.
    pub lambda_0abs_1: f64,
    /// Decay rate of "1" under contaminated `P0`.
    pub lambda_adv_1_0: f64,
    /// Decay rate of "0" under contaminated `P1`.
    pub lambda_adv_0_1: f64,
}

/// Numerical knobs shared by all solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverSettings {
    /// Points in the initial scan of every scalar search.
    pub grid_resolution: usize,
    /// Target accuracy of reported values, in bits.
    pub refine_tolerance: f64,
    /// Largest constraint violation accepted in a minimizer.
    pub feasibility_tolerance: f64,
    /// Iteration cap for mirror descent.
    pub max_iterations: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { grid_resolution: 512, refine_tolerance: 1e-8, feasibility_tolerance: 1e-9, max_iterations: 10_000 }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.grid_resolution < 64 {
            return Err(Error::OutOfRange {
                name: "grid_resolution",
                value: self.grid_resolution as f64,
                lower: 64.0,
                upper: f64::INFINITY,
            });
        }
        if self.refine_tolerance.is_nan() || self.refine_tolerance < 1e-10 {
            return Err(Error::OutOfRange {
                name: "refine_tolerance",
                value: self.refine_tolerance,
                lower: 1e-10,
                upper: f64::INFINITY,
            });
        }
        if self.feasibility_tolerance.is_nan() || self.feasibility_tolerance <= 0.0 {
            return Err(Error::OutOfRange {
                name: "feasibility_tolerance",
                value: self.feasibility_tolerance,
                lower: 0.0,
                upper: f64::INFINITY,
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::OutOfRange { name: "max_iterations", value: 0.0, lower: 1.0, upper: f64::INFINITY });
        }
        Ok(())
    }

    fn x_tolerance(&self) -> f64 {
        (self.refine_tolerance * 1e-3).max(1e-14)
    }
}

/// The optimising distributions of a program. Which fields are set depends
/// on the program; see each solver.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Minimizer {
    pub u: Option<Distribution>,
    pub p: Option<Distribution>,
    pub q: Option<Distribution>,
    pub v: Option<Distribution>,
    pub rho: Option<f64>,
}

/// One constraint of a program and how much room the minimizer leaves in it.
/// Negative slack means a violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Slack {
    pub constraint: &'static str,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Certificate {
    pub slacks: Vec<Slack>,
    /// The objective vanishes at a feasible point, so the value is exactly 0.
    pub zero: bool,
}

impl Certificate {
    pub fn min_slack(&self) -> f64 {
        self.slacks.iter().map(|s| s.slack).fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverResult {
    /// Optimal value in bits.
    pub value: f64,
    pub minimizer: Minimizer,
    pub certificate: Certificate,
}

fn check_inputs(p0: &Distribution, p1: &Distribution, lambda: f64) -> Result<()> {
    p0.check_same_alphabet(p1)?;
    if !p0.is_full_support() || !p1.is_full_support() {
        let bad = p0.probs().iter().chain(p1.probs()).position(|&x| x <= 0.0).unwrap_or(0);
        return Err(Error::NotFullSupport(bad % p0.alphabet_size()));
    }
    let bound = kl_bits(p0.probs(), p1.probs());
    if !(lambda > 0.0 && lambda <= bound * (1.0 + 1e-12)) {
        return Err(Error::OutOfRegime { name: "lambda_opposite", value: lambda, bound });
    }
    Ok(())
}

fn check_eps(eps: BernoulliRate) -> Result<f64> {
    let e = eps.value();
    if e >= 1.0 {
        return Err(Error::OutOfRange { name: "eps", value: e, lower: 0.0, upper: 1.0 });
    }
    Ok(e)
}

/// The largest `lambda_1abs_0` compatible with `lambda_0abs_1 = lambda_opposite`:
/// `min { D(q || P0) : D(q || P1) <= lambda_opposite }`.
///
/// The minimizer `q` lies on the geometric path between `P0` and `P1`.
/// Valid for `0 < lambda_opposite <= D(P0 || P1)`; at the upper end `P0`
/// itself is in the ball and the value is `0`.
pub fn nonadv_boundary(p0: &Distribution, p1: &Distribution, lambda_opposite: f64) -> Result<SolverResult> {
    check_inputs(p0, p1, lambda_opposite)?;
    let q = kl_ball_projection(p0.probs(), p1.probs(), lambda_opposite);
    let value = kl_bits(&q, p0.probs());
    let slack = lambda_opposite - kl_bits(&q, p1.probs());
    let zero = q == p0.probs();
    Ok(SolverResult {
        value,
        minimizer: Minimizer { q: Some(Distribution::from_raw(q)), ..Minimizer::default() },
        certificate: Certificate { slacks: alloc::vec![Slack { constraint: "D(q||P1) <= lambda", slack }], zero },
    })
}

/// Default tolerance of [`check_disjoint`].
pub const DISJOINT_TOLERANCE: f64 = 1e-9;

/// Whether `B_KL(P0, l10)` and `B_KL(P1, l01)` are disjoint with a margin of
/// [`DISJOINT_TOLERANCE`].
pub fn check_disjoint(p0: &Distribution, p1: &Distribution, l10: f64, l01: f64) -> bool {
    check_disjoint_tol(p0, p1, l10, l01, DISJOINT_TOLERANCE)
}

/// [`check_disjoint`] with an explicit margin.
pub fn check_disjoint_tol(p0: &Distribution, p1: &Distribution, l10: f64, l01: f64, tol: f64) -> bool {
    if p0.check_same_alphabet(p1).is_err() || !(l10 > 0.0 && l01 > 0.0) {
        return false;
    }
    if l01 >= kl_bits(p0.probs(), p1.probs()) {
        return false;
    }
    match nonadv_boundary(p0, p1, l01) {
        Ok(r) => r.value > l10 + tol,
        Err(_) => false,
    }
}

/// The convex function minimised over the ball, one per model.
enum Program<'a> {
    /// `min_{m >= (1-eps) P0} D(p || m)`.
    Memoryless { floor: Vec<f64> },
    /// `(1-w) min { D(q || P0) : (1-w) q <= p }`.
    FixedWeight { p0: &'a [f64], w: f64 },
    /// `min { D(q || P0) : TV(q, p) <= eps }`.
    Strong { p0: &'a [f64], eps: f64 },
}

struct Eval {
    value: f64,
    grad: Vec<f64>,
    /// `m` for the memoryless program, `q` for the other two.
    inner: Vec<f64>,
}

fn log_ratio_grad(a: &[f64], b: &[f64], support: &[f64]) -> Vec<f64> {
    a.iter()
        .zip(b)
        .zip(support)
        .map(|((&x, &y), &s)| if s > 0.0 && x > 0.0 { libm::log2(x / y) } else { 0.0 })
        .collect()
}

impl<'a> Program<'a> {
    fn memoryless(p0: &'a [f64], eps: f64) -> Self {
        Program::Memoryless { floor: p0.iter().map(|&x| (1.0 - eps) * x).collect() }
    }

    fn eval(&self, p: &[f64]) -> Eval {
        match self {
            Program::Memoryless { floor } => {
                let m = mixture_projection(p, floor);
                let value = kl_bits(p, &m);
                let grad = log_ratio_grad(p, &m, p);
                Eval { value, grad, inner: m }
            }
            Program::FixedWeight { p0, w } => {
                if *w >= 1.0 {
                    return Eval { value: 0.0, grad: alloc::vec![0.0; p.len()], inner: p0.to_vec() };
                }
                let caps: Vec<f64> = p.iter().map(|&x| x / (1.0 - w)).collect();
                let q = capped_projection(&caps, p0);
                let value = (1.0 - w) * kl_bits(&q, p0);
                let grad = log_ratio_grad(&q, p0, p);
                Eval { value, grad, inner: q }
            }
            Program::Strong { p0, eps } => {
                let q = tv_projection(p, p0, *eps);
                let value = kl_bits(&q, p0);
                let grad = log_ratio_grad(&q, p0, p);
                Eval { value, grad, inner: q }
            }
        }
    }

    fn value(&self, p: &[f64]) -> f64 {
        self.eval(p).value
    }

    /// A point of the ball where the program vanishes, if there is one.
    fn zero_point(&self, p1: &[f64], lambda: f64) -> Option<Vec<f64>> {
        let candidate = match self {
            Program::Memoryless { floor } => floor_information_projection(p1, floor),
            Program::FixedWeight { p0, w } => {
                let floor: Vec<f64> = p0.iter().map(|&x| (1.0 - w) * x).collect();
                floor_information_projection(p1, &floor)
            }
            Program::Strong { p0, eps } => tv_projection(p0, p1, *eps),
        };
        (kl_bits(&candidate, p1) <= lambda).then_some(candidate)
    }
}

/// `min_{D(p || P1) <= lambda} h(p)`. Returns the minimising `p`, the
/// evaluation there, and whether the zero shortcut applied.
fn minimize_over_ball(prog: &Program, p1: &[f64], lambda: f64, s: &SolverSettings) -> (Vec<f64>, Eval, bool) {
    if let Some(p) = prog.zero_point(p1, lambda) {
        let mut ev = prog.eval(&p);
        ev.value = 0.0;
        return (p, ev, true);
    }
    let p = if p1.len() == 2 {
        binary_search(prog, p1, lambda, s)
    } else {
        mirror_descent(prog, p1, lambda, s, p1)
    };
    let ev = prog.eval(&p);
    (p, ev, false)
}

fn binary_search(prog: &Program, p1: &[f64], lambda: f64, s: &SolverSettings) -> Vec<f64> {
    let (lo, hi) = binary_ball(p1[1], lambda);
    let (x, _) = numeric::scan_and_refine(|x| prog.value(&binary(x)), lo, hi, s.grid_resolution, s.x_tolerance());
    binary(x)
}

/// Entropic mirror descent over the KL ball, started from the projection of
/// `start`. The step `p * 2^(-eta g)` is followed by the exact Bregman
/// projection, and `eta` is halved until the step passes the descent test
/// `f(new) <= f(p) + <g, new - p> + D(new || p) / eta`.
fn mirror_descent(prog: &Program, p1: &[f64], lambda: f64, s: &SolverSettings, start: &[f64]) -> Vec<f64> {
    let mut p = kl_ball_projection(start, p1, lambda);
    let mut cur = prog.eval(&p);
    let mut eta = 1.0;
    let mut quiet = 0;
    for _ in 0..s.max_iterations {
        let mut next = None;
        for _ in 0..80 {
            let logs: Vec<f64> = p
                .iter()
                .zip(&cur.grad)
                .map(|(&x, &g)| if x > 0.0 { libm::log2(x) - eta * g } else { f64::NEG_INFINITY })
                .collect();
            let z = numeric::log2_sum(&logs);
            let y: Vec<f64> = logs.iter().map(|&l| libm::exp2(l - z)).collect();
            let cand = kl_ball_projection(&y, p1, lambda);
            let ev = prog.eval(&cand);
            let lin: f64 = cur.grad.iter().zip(&cand).zip(&p).map(|((g, a), b)| g * (a - b)).sum();
            let bound = cur.value + lin + kl_bits(&cand, &p) / eta;
            if ev.value <= bound + 1e-15 * (1.0 + cur.value) {
                next = Some((cand, ev));
                break;
            }
            eta *= 0.5;
        }
        let Some((cand, ev)) = next else { break };
        let gain = cur.value - ev.value;
        let moved = numeric::tv(&cand, &p);
        if ev.value <= cur.value {
            p = cand;
            cur = ev;
        }
        if gain <= 1e-15 * (1.0 + cur.value) || moved < 1e-15 {
            quiet += 1;
            if quiet >= 3 {
                break;
            }
        } else {
            quiet = 0;
        }
        eta = (eta * 2.0).min(1e8);
    }
    p
}

fn ball_slack(p: &[f64], p1: &[f64], lambda: f64) -> Slack {
    Slack { constraint: "D(p||P1) <= lambda", slack: lambda - kl_bits(p, p1) }
}

/// Replacement law recovered from a mixture: `(mix - (1 - w) base) / w`.
fn recover_replacement(mix: &[f64], base: &[f64], w: f64) -> (Vec<f64>, f64) {
    let u: Vec<f64> = mix.iter().zip(base).map(|(&m, &b)| (m - (1.0 - w) * b) / w).collect();
    let min = u.iter().copied().fold(f64::INFINITY, f64::min);
    (u, min)
}

/// Memoryless ingress:
/// `min { D(p || (1-eps) P0 + eps u) : u in simplex, D(p || P1) <= lambda }`.
///
/// The minimizer carries `p` and `u` (`u` is omitted when `eps = 0`).
pub fn memoryless_exponent(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    s: &SolverSettings,
) -> Result<SolverResult> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    let e = check_eps(eps)?;
    let prog = Program::memoryless(p0.probs(), e);
    let (p, ev, zero) = minimize_over_ball(&prog, p1.probs(), lambda_opposite, s);
    let mut slacks = alloc::vec![ball_slack(&p, p1.probs(), lambda_opposite)];
    let u = (e > 0.0).then(|| {
        let (u, min) = recover_replacement(&ev.inner, p0.probs(), e);
        slacks.push(Slack { constraint: "u >= 0", slack: min });
        Distribution::from_raw(u)
    });
    Ok(SolverResult {
        value: ev.value,
        minimizer: Minimizer { u, p: Some(Distribution::from_raw(p)), ..Minimizer::default() },
        certificate: Certificate { slacks, zero },
    })
}

/// Fixed-weight value at an arbitrary weight `w in [0, 1]`; `p` is the point
/// of the ball, `q` the clean part.
fn fixed_weight_at(p0: &[f64], p1: &[f64], w: f64, lambda: f64, s: &SolverSettings) -> (Vec<f64>, Eval, bool) {
    let prog = Program::FixedWeight { p0, w };
    minimize_over_ball(&prog, p1, lambda, s)
}

/// Fixed-weight uniform ingress:
/// `(1-eps) min { D(q || P0) : D((1-eps) q + eps u || P1) <= lambda }`.
///
/// The minimizer carries `q`, `u` and the contaminated law `p = (1-eps) q + eps u`.
pub fn fixed_weight_exponent(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    s: &SolverSettings,
) -> Result<SolverResult> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    let e = check_eps(eps)?;
    let (p, ev, zero) = fixed_weight_at(p0.probs(), p1.probs(), e, lambda_opposite, s);
    let q = ev.inner;
    let value = if zero { 0.0 } else { (1.0 - e) * kl_bits(&q, p0.probs()) };
    let mut slacks = alloc::vec![ball_slack(&p, p1.probs(), lambda_opposite)];
    let u = (e > 0.0).then(|| {
        let (u, min) = recover_replacement(&p, &q, e);
        slacks.push(Slack { constraint: "u >= 0", slack: min });
        Distribution::from_raw(u)
    });
    Ok(SolverResult {
        value,
        minimizer: Minimizer {
            u,
            p: Some(Distribution::from_raw(p)),
            q: Some(Distribution::from_raw(q)),
            ..Minimizer::default()
        },
        certificate: Certificate { slacks, zero },
    })
}

/// Strong contamination:
/// `min { D(q || P0) : TV(q, p) <= eps, D(p || P1) <= lambda }`.
///
/// The minimizer carries `p` and `q`.
pub fn strong_contamination_exponent(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    s: &SolverSettings,
) -> Result<SolverResult> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    let e = check_eps(eps)?;
    let prog = Program::Strong { p0: p0.probs(), eps: e };
    let (p, ev, zero) = minimize_over_ball(&prog, p1.probs(), lambda_opposite, s);
    let q = ev.inner;
    let slacks = alloc::vec![
        ball_slack(&p, p1.probs(), lambda_opposite),
        Slack { constraint: "TV(p,q) <= eps", slack: e - numeric::tv(&p, &q) },
    ];
    let value = if zero { 0.0 } else { kl_bits(&q, p0.probs()) };
    Ok(SolverResult {
        value,
        minimizer: Minimizer { p: Some(Distribution::from_raw(p)), q: Some(Distribution::from_raw(q)), ..Minimizer::default() },
        certificate: Certificate { slacks, zero },
    })
}

/// The objective of the alternative memoryless program at a fixed `rho`:
/// `D2(rho || eps) + (1-rho) min { D(q || P0) : D((1-rho) q + rho v || P1) <= lambda }`.
///
/// At `rho = eps` this is the fixed-weight exponent.
pub fn rho_form_objective(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    rho: f64,
    s: &SolverSettings,
) -> Result<f64> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    let e = check_eps(eps)?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::OutOfRange { name: "rho", value: rho, lower: 0.0, upper: 1.0 });
    }
    Ok(rho_form_at(p0.probs(), p1.probs(), e, lambda_opposite, rho, s))
}

fn rho_form_at(p0: &[f64], p1: &[f64], eps: f64, lambda: f64, rho: f64, s: &SolverSettings) -> f64 {
    let (_, ev, zero) = fixed_weight_at(p0, p1, rho, lambda, s);
    let fw = if zero { 0.0 } else { ev.value };
    numeric::d2(rho, eps) + fw
}

/// The memoryless exponent through the alternative program
/// `min_rho D2(rho || eps) + (1-rho) min { D(q || P0) : D((1-rho) q + rho v || P1) <= lambda }`.
///
/// The two programs agree; this one exposes the effective fraction `rho` of
/// replaced samples. The minimizer carries `rho`, `q`, `v` and
/// `p = (1-rho) q + rho v`.
pub fn memoryless_exponent_claim1(
    p0: &Distribution,
    p1: &Distribution,
    eps: BernoulliRate,
    lambda_opposite: f64,
    s: &SolverSettings,
) -> Result<SolverResult> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    let e = check_eps(eps)?;
    let (a, b) = (p0.probs(), p1.probs());
    let rho = if e == 0.0 {
        0.0
    } else {
        let grid = if a.len() == 2 { s.grid_resolution } else { s.grid_resolution.min(64) };
        numeric::scan_and_refine(|r| rho_form_at(a, b, e, lambda_opposite, r, s), 0.0, 1.0, grid, s.x_tolerance()).0
    };
    let (p, ev, zero) = fixed_weight_at(a, b, rho, lambda_opposite, s);
    let q = ev.inner;
    let inner = if zero { 0.0 } else { (1.0 - rho) * kl_bits(&q, a) };
    let value = numeric::d2(rho, e) + inner;
    let mut slacks = alloc::vec![ball_slack(&p, b, lambda_opposite)];
    let v = (rho > 0.0).then(|| {
        let (v, min) = recover_replacement(&p, &q, rho);
        slacks.push(Slack { constraint: "v >= 0", slack: min });
        Distribution::from_raw(v)
    });
    Ok(SolverResult {
        value,
        minimizer: Minimizer {
            rho: Some(rho),
            q: Some(Distribution::from_raw(q)),
            v,
            p: Some(Distribution::from_raw(p)),
            ..Minimizer::default()
        },
        certificate: Certificate { slacks, zero: zero && rho == e },
    })
}

/// Dispatches to the solver of `model`.
pub fn adversarial_exponent(
    model: &ContaminationModel,
    p0: &Distribution,
    p1: &Distribution,
    lambda_opposite: f64,
    s: &SolverSettings,
) -> Result<SolverResult> {
    let eps = BernoulliRate::new(model.eps())?;
    match model {
        ContaminationModel::MemorylessIngress(_) => memoryless_exponent(p0, p1, eps, lambda_opposite, s),
        ContaminationModel::FixedWeightUniform(_) => fixed_weight_exponent(p0, p1, eps, lambda_opposite, s),
        ContaminationModel::StrongContamination(_) => strong_contamination_exponent(p0, p1, eps, lambda_opposite, s),
    }
}

/// Runs the iterative ball search of `model` from a given starting point,
/// bypassing the closed-form zero test and the binary interval search.
/// Useful for checking that the result does not depend on the start.
pub fn adversarial_exponent_from(
    model: &ContaminationModel,
    p0: &Distribution,
    p1: &Distribution,
    lambda_opposite: f64,
    start: &Distribution,
    s: &SolverSettings,
) -> Result<f64> {
    s.validate()?;
    check_inputs(p0, p1, lambda_opposite)?;
    p0.check_same_alphabet(start)?;
    let e = model.eps();
    let prog = match model {
        ContaminationModel::MemorylessIngress(_) => Program::memoryless(p0.probs(), e),
        ContaminationModel::FixedWeightUniform(_) => Program::FixedWeight { p0: p0.probs(), w: e },
        ContaminationModel::StrongContamination(_) => Program::Strong { p0: p0.probs(), eps: e },
    };
    let p = mirror_descent(&prog, p1.probs(), lambda_opposite, s, start.probs());
    Ok(prog.value(&p))
}
