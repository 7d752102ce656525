use abstain_core::exponents::{
    adversarial_exponent, adversarial_exponent_from, rho_form_objective, fixed_weight_exponent, memoryless_exponent,
    memoryless_exponent_claim1, nonadv_boundary, strong_contamination_exponent, SolverSettings,
};
use abstain_core::prob::{kl_divergence, tv_distance};
use abstain_core::{BernoulliRate, ContaminationModel, Distribution};
use proptest::prelude::*;

fn ber(p: f64) -> Distribution {
    Distribution::bernoulli(p).unwrap()
}

fn rate(e: f64) -> BernoulliRate {
    BernoulliRate::new(e).unwrap()
}

fn d2(a: f64, b: f64) -> f64 {
    let t = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    t(a, b) + t(1.0 - a, 1.0 - b)
}

/// Dense two-dimensional grid over a pair of scalar parameters, then
/// repeated zooms around cells tied with the best. Infeasible cells are
/// skipped.
fn grid2<F: Fn(f64, f64) -> Option<f64>>(f: F, steps: usize) -> f64 {
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

fn in_ball(x: f64, c: f64, r: f64) -> bool {
    d2(x, c) <= r
}

#[test]
fn dense_grid_oracle_binary() {
    let s = SolverSettings::default();
    for &(a0, a1, eps, lam) in &[(0.1, 0.5, 0.1, 0.05), (0.2, 0.7, 0.15, 0.1), (0.1, 0.9, 0.1, 0.1)] {
        let (p0, p1) = (ber(a0), ber(a1));
        // memoryless over (u, p)
        let ber_oracle = grid2(|u, p| in_ball(p, a1, lam).then(|| d2(p, (1.0 - eps) * a0 + eps * u)), 1000);
        // fixed weight over (q, u)
        let fw_oracle =
            grid2(|q, u| in_ball((1.0 - eps) * q + eps * u, a1, lam).then(|| (1.0 - eps) * d2(q, a0)), 1000);
        // strong contamination over (p, q)
        let sc_oracle = grid2(|p, q| (in_ball(p, a1, lam) && (p - q).abs() <= eps).then(|| d2(q, a0)), 1000);
        let b = memoryless_exponent(&p0, &p1, rate(eps), lam, &s).unwrap().value;
        let f = fixed_weight_exponent(&p0, &p1, rate(eps), lam, &s).unwrap().value;
        let a = strong_contamination_exponent(&p0, &p1, rate(eps), lam, &s).unwrap().value;
        assert!((b - ber_oracle).abs() < 1e-4, "ber {b} vs {ber_oracle}");
        assert!((f - fw_oracle).abs() < 1e-4, "fw {f} vs {fw_oracle}");
        assert!((a - sc_oracle).abs() < 1e-4, "sc {a} vs {sc_oracle}");
        // the solver may only beat a grid by refinement error, never lose to it
        assert!(b <= ber_oracle + 1e-9 && f <= fw_oracle + 1e-9 && a <= sc_oracle + 1e-9);
    }
}

#[test]
fn nonadv_against_scalar_scan() {
    let (p0, p1) = (ber(0.1), ber(0.5));
    let r = nonadv_boundary(&p0, &p1, 0.1).unwrap();
    let mut best = f64::INFINITY;
    for i in 0..=1_000_000 {
        let q = i as f64 * 1e-6;
        if d2(q, 0.5) <= 0.1 {
            best = best.min(d2(q, 0.1));
        }
    }
    assert!((r.value - best).abs() < 1e-5, "{} vs {best}", r.value);
}

#[test]
fn zero_exponent_when_mixtures_reach_the_ball() {
    let r = memoryless_exponent(&ber(0.1), &ber(0.5), rate(0.5), 0.2, &SolverSettings::default()).unwrap();
    assert_eq!(r.value, 0.0);
    assert!(r.certificate.zero);
}

#[test]
fn rho_form_equals_memoryless_on_a_grid() {
    let s = SolverSettings::default();
    let (p0, p1) = (ber(0.1), ber(0.5));
    for eps in [0.05, 0.2] {
        for lam in [0.02, 0.1] {
            let a = memoryless_exponent(&p0, &p1, rate(eps), lam, &s).unwrap().value;
            let c = memoryless_exponent_claim1(&p0, &p1, rate(eps), lam, &s).unwrap();
            assert!((a - c.value).abs() < 1e-6, "eps {eps} lam {lam}: {a} vs {}", c.value);
            let rho = c.minimizer.rho.unwrap();
            let at = rho_form_objective(&p0, &p1, rate(eps), lam, rho, &s).unwrap();
            assert!((at - c.value).abs() < 1e-9);
        }
    }
}

#[test]
fn multistart_ternary_agrees() {
    let s = SolverSettings::default();
    let p0 = Distribution::new(vec![0.6, 0.3, 0.1]).unwrap();
    let p1 = Distribution::new(vec![0.15, 0.35, 0.5]).unwrap();
    let models = [
        ContaminationModel::memoryless(0.1).unwrap(),
        ContaminationModel::fixed_weight(0.1).unwrap(),
        ContaminationModel::strong(0.1).unwrap(),
    ];
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for m in &models {
        let reference = adversarial_exponent(m, &p0, &p1, 0.08, &s).unwrap().value;
        let mut values = Vec::new();
        for _ in 0..16 {
            let w: Vec<f64> = (0..3).map(|_| 0.05 + next()).collect();
            let t: f64 = w.iter().sum();
            let start = Distribution::new(w.iter().map(|x| x / t).collect()).unwrap_or_else(|_| p1.clone());
            values.push(adversarial_exponent_from(m, &p0, &p1, 0.08, &start, &s).unwrap());
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!(hi - lo <= 1e-6, "{}: spread {}", m.name(), hi - lo);
        assert!((reference - lo).abs() <= 1e-6, "{}: {reference} vs {lo}", m.name());
    }
}

fn binary_config() -> impl Strategy<Value = (f64, f64, f64, f64)> {
    (0.05f64..0.45, 0.55f64..0.95, 0.02f64..0.3, 0.1f64..0.9).prop_map(|(a, b, e, frac)| {
        let bound = d2(a, b);
        (a, b, e, (frac * bound).max(1e-3))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn model_ordering((a, b, e, lam) in binary_config()) {
        let s = SolverSettings::default();
        let (p0, p1) = (ber(a), ber(b));
        let m = memoryless_exponent(&p0, &p1, rate(e), lam, &s).unwrap().value;
        let f = fixed_weight_exponent(&p0, &p1, rate(e), lam, &s).unwrap().value;
        let sc = strong_contamination_exponent(&p0, &p1, rate(e), lam, &s).unwrap().value;
        let n = nonadv_boundary(&p0, &p1, lam).unwrap().value;
        prop_assert!(m <= f + 1e-9);
        prop_assert!(sc <= f + 1e-9);
        prop_assert!(f <= n + 1e-9);
    }

    #[test]
    fn monotone_in_eps_and_lambda((a, b, e, lam) in binary_config()) {
        let s = SolverSettings::default();
        let (p0, p1) = (ber(a), ber(b));
        for model in [ContaminationModel::memoryless(e).unwrap(), ContaminationModel::fixed_weight(e).unwrap(), ContaminationModel::strong(e).unwrap()] {
            let base = adversarial_exponent(&model, &p0, &p1, lam, &s).unwrap().value;
            let more_eps = adversarial_exponent(&model.with_eps(e * 1.2).unwrap(), &p0, &p1, lam, &s).unwrap().value;
            let more_lam = adversarial_exponent(&model, &p0, &p1, lam * 0.9 + 0.1 * d2(a, b), &s).unwrap().value;
            prop_assert!(more_eps <= base + 1e-9, "{} eps", model.name());
            prop_assert!(more_lam <= base + 1e-9, "{} lambda", model.name());
        }
    }

    #[test]
    fn minimizers_are_feasible_and_reproduce_values((a, b, e, lam) in binary_config()) {
        let s = SolverSettings::default();
        let (p0, p1) = (ber(a), ber(b));
        let m = memoryless_exponent(&p0, &p1, rate(e), lam, &s).unwrap();
        prop_assert!(m.certificate.min_slack() >= -s.feasibility_tolerance);
        let (p, u) = (m.minimizer.p.unwrap(), m.minimizer.u.unwrap());
        let mix = abstain_core::prob::mix(&p0, &u, e);
        prop_assert!((kl_divergence(&p, &mix).bits() - m.value).abs() <= s.refine_tolerance);

        let f = fixed_weight_exponent(&p0, &p1, rate(e), lam, &s).unwrap();
        prop_assert!(f.certificate.min_slack() >= -s.feasibility_tolerance);
        let q = f.minimizer.q.unwrap();
        prop_assert!(((1.0 - e) * kl_divergence(&q, &p0).bits() - f.value).abs() <= s.refine_tolerance);
        let mixed = abstain_core::prob::mix(&q, &f.minimizer.u.unwrap(), e);
        prop_assert!(kl_divergence(&mixed, &p1).bits() <= lam + s.feasibility_tolerance);

        let sc = strong_contamination_exponent(&p0, &p1, rate(e), lam, &s).unwrap();
        prop_assert!(sc.certificate.min_slack() >= -s.feasibility_tolerance);
        let (p, q) = (sc.minimizer.p.unwrap(), sc.minimizer.q.unwrap());
        prop_assert!(tv_distance(&p, &q) <= e + s.feasibility_tolerance);
        prop_assert!((kl_divergence(&q, &p0).bits() - sc.value).abs() <= s.refine_tolerance);
    }
}
