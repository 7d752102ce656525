//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod support;

use std::time::Instant;

use abstain_core::adversary::{seeded_rng, AttackStatus, StrongConverseAttack};
use abstain_core::exponents::{
    adversarial_exponent, fixed_weight_exponent, memoryless_exponent, memoryless_exponent_claim1, nonadv_boundary,
    strong_contamination_exponent,
};
use abstain_core::finite_n::{exact_nonadv_errors, exact_worstcase_adv_error, rate_convergence_study, wilson_interval, WILSON_Z_99};
use abstain_core::prob::kl_divergence;
use abstain_core::{BernoulliRate, ContaminationModel, Decision, DetectorSpec, Distribution, Hypothesis, SolverSettings};
use abstain_ht::commands::figures::{cmd_figure4, cmd_figure5};
use abstain_ht::output::parse_csv;
use abstain_ht::{with_threads, CommandKind, RunConfig};
use rand::Rng;
use support::oracle;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

/// `|a - b|`, with anything non-finite counted as an infinite gap.
fn gap(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d.is_finite() {
        d
    } else {
        f64::INFINITY
    }
}

fn ber(p: f64) -> Distribution {
    Distribution::bernoulli(p).unwrap()
}

fn rate(e: f64) -> BernoulliRate {
    BernoulliRate::new(e).unwrap()
}

fn default_spec() -> DetectorSpec {
    DetectorSpec::new(ber(0.1), ber(0.5), 0.05, 0.05, 0.01).unwrap()
}

fn models(eps: f64) -> [ContaminationModel; 3] {
    [
        ContaminationModel::memoryless(eps).unwrap(),
        ContaminationModel::fixed_weight(eps).unwrap(),
        ContaminationModel::strong(eps).unwrap(),
    ]
}

/// The memoryless program and its realised-weight form agree on the grid.
fn criterion_1() -> Verdict {
    let s = SolverSettings::default();
    let (p0, p1) = (ber(0.1), ber(0.5));
    let bound = kl_divergence(&p0, &p1).bits();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for eps in [0.05, 0.1, 0.2, 0.3] {
        for lambda in [0.01, 0.05, 0.1, 0.2] {
            if lambda > bound {
                continue;
            }
            let direct = memoryless_exponent(&p0, &p1, rate(eps), lambda, &s).map_err(|e| e.to_string())?.value;
            let rho = memoryless_exponent_claim1(&p0, &p1, rate(eps), lambda, &s).map_err(|e| e.to_string())?.value;
            worst = worst.max(gap(direct, rho));
            points += 1;
        }
    }
    let msg = format!("{points} grid points, max |difference| = {worst:.3e} bits (tolerance 1e-4)");
    if worst <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Memoryless and strong contamination below fixed weight along the sweep.
fn criterion_2() -> Verdict {
    let s = SolverSettings::default();
    let (p0, p1) = (ber(0.1), ber(0.9));
    let mut worst: f64 = f64::NEG_INFINITY;
    let mut points = 0;
    for i in 0..=78 {
        let eps = 0.01 + 0.005 * i as f64;
        let run = |f: fn(&Distribution, &Distribution, BernoulliRate, f64, &SolverSettings) -> abstain_core::Result<abstain_core::SolverResult>| {
            f(&p0, &p1, rate(eps), 0.1, &s).map(|r| r.value).map_err(|e| e.to_string())
        };
        let (m, fw, sc) = (run(memoryless_exponent)?, run(fixed_weight_exponent)?, run(strong_contamination_exponent)?);
        worst = worst.max(m - fw).max(sc - fw);
        if ![m, fw, sc].iter().all(|v| v.is_finite()) {
            worst = f64::INFINITY;
        }
        points += 1;
    }
    let msg = format!("{points} eps values in [0.01, 0.40], max violation = {worst:.3e} (allowed 1e-6)");
    if worst <= 1e-6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Every solver against the nested-scan oracle on 20 random configurations.
fn criterion_3() -> Verdict {
    let s = SolverSettings::default();
    let mut rng = seeded_rng(2024);
    let mut worst = (0.0f64, String::new());
    let mut positive = 0;
    for k in 0..20 {
        let mut a0: f64 = rng.gen_range(0.05..0.95);
        let mut a1: f64 = rng.gen_range(0.05..0.95);
        while (a0 - a1).abs() < 0.15 {
            a1 = rng.gen_range(0.05..0.95);
        }
        if k % 2 == 1 {
            std::mem::swap(&mut a0, &mut a1);
        }
        let eps: f64 = rng.gen_range(0.01..0.15);
        let lambda = rng.gen_range(0.05..0.95) * oracle::d2(a0, a1);
        let (p0, p1) = (ber(a0), ber(a1));
        let e = rate(eps);
        let err = |e: abstain_core::Error| e.to_string();
        let pairs = [
            ("non-adversarial", nonadv_boundary(&p0, &p1, lambda).map_err(err)?.value, oracle::nonadv(a0, a1, lambda)),
            ("memoryless", memoryless_exponent(&p0, &p1, e, lambda, &s).map_err(err)?.value, oracle::memoryless(a0, a1, eps, lambda)),
            ("fixed-weight", fixed_weight_exponent(&p0, &p1, e, lambda, &s).map_err(err)?.value, oracle::fixed_weight(a0, a1, eps, lambda)),
            ("strong", strong_contamination_exponent(&p0, &p1, e, lambda, &s).map_err(err)?.value, oracle::strong(a0, a1, eps, lambda)),
            ("rho-form", memoryless_exponent_claim1(&p0, &p1, e, lambda, &s).map_err(err)?.value, oracle::rho_form(a0, a1, eps, lambda)),
        ];
        for (name, solver, reference) in pairs {
            let d = gap(solver, reference);
            positive += usize::from(reference > 1e-6);
            if d > worst.0 {
                worst = (d, format!("{name} at P0=Ber({a0:.3}), P1=Ber({a1:.3}), eps={eps:.3}, lambda={lambda:.4}"));
            }
        }
    }
    let msg = format!(
        "20 configurations x 5 solvers ({positive} with positive value), max |solver - oracle| = {:.3e} bits ({})",
        worst.0, worst.1
    );
    if worst.0 <= 1e-4 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Fitted rates of the exact worst-case errors against the exponents at the
/// detector radius `l + delta`.
fn criterion_4() -> Verdict {
    let spec = default_spec();
    let s = SolverSettings::default();
    let grid = [50, 100, 200, 300, 400, 500];
    let radius = 0.05 + 0.01;
    let mut worst = (0.0f64, String::new());
    let mut parts = Vec::new();
    for m in models(0.1) {
        for (h, p, r) in [(Hypothesis::H0, spec.p0(), spec.p1()), (Hypothesis::H1, spec.p1(), spec.p0())] {
            let study = rate_convergence_study(&spec, &m, h, &grid).map_err(|e| e.to_string())?;
            let theory = adversarial_exponent(&m, p, r, radius, &s).map_err(|e| e.to_string())?.value;
            let rel = gap(study.fit.asymptote, theory) / theory;
            parts.push(format!("{}/{:?} {:.4} vs {:.4}", m.tag(), h, study.fit.asymptote, theory));
            if rel > worst.0 {
                worst = (rel, format!("{} {:?}", m.name(), h));
            }
        }
    }
    let msg = format!("max relative error {:.2}% at {} (allowed 5%); {}", 100.0 * worst.0, worst.1, parts.join(", "));
    if worst.0 <= 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// `log2` of the probability that the best adversary forces `target`, by
/// enumerating sequences, masks and replacements (bit `i` is sample `i`).
fn sequence_brute_force(spec: &DetectorSpec, model: &ContaminationModel, n: u32, h: Hypothesis) -> f64 {
    let target = Decision::wrong_for(h);
    let p1 = spec.hypothesis(h).probs()[1];
    let decision: Vec<bool> = (0..=n).map(|k| spec.decide_counts(&[n - k, k]) == target).collect();
    let hits = |y: u32| decision[y.count_ones() as usize];
    let full = (1u32 << n) - 1;
    let seq_mass = |x: u32| {
        let k = x.count_ones() as i32;
        p1.powi(k) * (1.0 - p1).powi(n as i32 - k)
    };
    let eps = model.eps();
    let mut total = 0.0;
    for x in 0..=full {
        let px = seq_mass(x);
        let success = match model {
            ContaminationModel::StrongContamination(_) => {
                let budget = ContaminationModel::strong_budget(n, eps);
                let ok = (0..=full).any(|y| (x ^ y).count_ones() <= budget && hits(y));
                if ok {
                    1.0
                } else {
                    0.0
                }
            }
            _ => {
                let fw = matches!(model, ContaminationModel::FixedWeightUniform(_));
                let weight = ContaminationModel::fixed_weight_count(n, eps);
                let masks = (0..=full).filter(|z| !fw || z.count_ones() == weight);
                let mut acc = 0.0;
                let mut count = 0u32;
                for z in masks {
                    count += 1;
                    let mass = if fw {
                        1.0
                    } else {
                        let k = z.count_ones() as i32;
                        eps.powi(k) * (1.0 - eps).powi(n as i32 - k)
                    };
                    let base = x & !z;
                    let mut sub = z;
                    let reachable = loop {
                        if hits(base | sub) {
                            break true;
                        }
                        if sub == 0 {
                            break false;
                        }
                        sub = (sub - 1) & z;
                    };
                    if reachable {
                        acc += mass;
                    }
                }
                if fw {
                    acc / count as f64
                } else {
                    acc
                }
            }
        };
        total += px * success;
    }
    total.log2()
}

fn criterion_5() -> Verdict {
    let spec = default_spec();
    let n = 12;
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for m in models(0.25) {
        for h in [Hypothesis::H0, Hypothesis::H1] {
            let exact = exact_worstcase_adv_error(&spec, &m, n, h).map_err(|e| e.to_string())?;
            let brute = sequence_brute_force(&spec, &m, n, h);
            let d = if exact == brute { 0.0 } else { gap(exact, brute) };
            worst = worst.max(d);
            parts.push(format!("{}/{:?} {exact:.6}", m.tag(), h));
        }
    }
    let msg = format!("max |log2 difference| = {worst:.3e} (tolerance 1e-12); {}", parts.join(", "));
    if worst <= 1e-12 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn criterion_6() -> Verdict {
    let spec = default_spec();
    let n = 500;
    let (e10, e01) = exact_nonadv_errors(&spec, n).map_err(|e| e.to_string())?;
    let (r10, r01) = (-e10 / n as f64, -e01 / n as f64);
    let t10 = spec.l10() + spec.delta();
    let t01 = spec.l01() + spec.delta();
    let msg = format!("rates at n=500: {r10:.4} vs {t10:.4} and {r01:.4} vs {t01:.4} (window 0.05)");
    if gap(r10, t10) <= 0.05 && gap(r01, t01) <= 0.05 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

/// Converse attack on samples from `P0 = Ber(0.1)` against `P1 = Ber(0.5)`.
fn criterion_7() -> Verdict {
    let (p0, p1) = (ber(0.1), ber(0.5));
    let (n, eps, lambda, delta) = (200u32, 0.2, 0.1, 0.02);
    let attack = StrongConverseAttack::new(&p0, &p1, rate(eps), lambda, delta, n, &SolverSettings::default())
        .map_err(|e| e.to_string())?;
    if !attack.meets_threshold() {
        return Err("n below the attack's threshold".into());
    }
    let exact = attack.trigger_log2_probability(&p0).map_err(|e| e.to_string())?.exp2();
    let runs = 10_000u64;
    let mut rng = seeded_rng(7);
    let (mut triggered, mut over_budget, mut missed) = (0u64, 0u64, 0u64);
    for _ in 0..runs {
        let x: Vec<usize> = (0..n).map(|_| usize::from(rng.gen::<f64>() < 0.1)).collect();
        let out = attack.attack(&x, &mut rng).map_err(|e| e.to_string())?;
        let edits = x.iter().zip(&out.y).filter(|(a, b)| a != b).count() as u32;
        if edits > attack.budget() || out.replaced_count as u32 > attack.budget() {
            over_budget += 1;
        }
        if out.status != AttackStatus::NotTriggered {
            triggered += 1;
            let ones = out.y.iter().sum::<usize>() as u32;
            if out.status != AttackStatus::Attacked || [n - ones, ones] != attack.target_type() {
                missed += 1;
            }
        }
    }
    let (lo, hi) = wilson_interval(triggered, runs, WILSON_Z_99);
    let msg = format!(
        "{runs} runs: {over_budget} over budget {}, {triggered} triggered, {missed} off target; trigger rate {:.4} in [{lo:.4}, {hi:.4}] vs exact {exact:.4}",
        attack.budget(),
        triggered as f64 / runs as f64
    );
    if over_budget == 0 && missed == 0 && triggered > 0 && lo <= exact && exact <= hi {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn column(text: &str, name: &str) -> Vec<f64> {
    let (cols, rows) = parse_csv(text).unwrap();
    let i = cols.iter().position(|c| c == name).unwrap_or_else(|| panic!("missing column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn monotone(v: &[f64], increasing: bool) -> bool {
    v.windows(2).all(|w| if increasing { w[1] >= w[0] - 1e-9 } else { w[1] <= w[0] + 1e-9 })
}

fn criterion_8() -> Verdict {
    let c4 = RunConfig::defaults(CommandKind::Figure4);
    let c5 = RunConfig::defaults(CommandKind::Figure5);
    let mut runs = Vec::new();
    for threads in [1, 4, 1] {
        let a = with_threads(Some(threads), || cmd_figure4(&c4)).map_err(|e| e.to_string())?.map_err(|e| e.to_string())?;
        let b = with_threads(Some(threads), || cmd_figure5(&c5)).map_err(|e| e.to_string())?.map_err(|e| e.to_string())?;
        runs.push((a, b));
    }
    let identical = runs.windows(2).all(|w| w[0] == w[1]);
    let (f4, f5) = &runs[0];
    let csv4 = f4.artifact("figure4.csv").ok_or("figure4.csv missing")?;
    let csv5 = f5.artifact("figure5.csv").ok_or("figure5.csv missing")?;
    let (cols4, _) = parse_csv(csv4).map_err(|e| e.to_string())?;
    let expected = ["L01", "L10", "La01ber", "La10ber", "La01fw", "La10fw", "La01adv", "La10adv"];
    let mut problems = Vec::new();
    if cols4 != expected {
        problems.push(format!("figure4 columns {cols4:?}"));
    }
    if !monotone(&column(csv4, "L01"), true) {
        problems.push("L01 sweep not increasing".into());
    }
    for (name, increasing) in [("L10", false), ("La10ber", false), ("La10fw", false), ("La10adv", false), ("La01ber", true), ("La01fw", true), ("La01adv", true)] {
        if !monotone(&column(csv4, name), increasing) {
            problems.push(format!("figure4 {name} not monotone"));
        }
    }
    let (ber5, fw5, adv5) = (column(csv5, "La10ber"), column(csv5, "La10fw"), column(csv5, "La10adv"));
    for (name, v) in [("La10ber", &ber5), ("La10fw", &fw5), ("La10adv", &adv5)] {
        if !monotone(v, false) {
            problems.push(format!("figure5 {name} not non-increasing in eps"));
        }
    }
    if ber5.iter().zip(&fw5).any(|(b, f)| b > &(f + 1e-6)) || adv5.iter().zip(&fw5).any(|(a, f)| a > &(f + 1e-6)) {
        problems.push("figure5 ordering violated".into());
    }
    let svgs = f4.artifact("figure4.svg").is_some() && f5.artifact("figure5.svg").is_some();
    if !identical {
        problems.push("outputs differ across runs or thread counts".into());
    }
    let msg = format!(
        "{} + {} rows, byte-identical over 3 runs at 1/4/1 threads: {identical}, plots rendered: {svgs}",
        column(csv4, "L01").len(),
        ber5.len()
    );
    if problems.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; {}", problems.join("; ")))
    }
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("memoryless program equals its realised-weight form", criterion_1),
        ("model orderings along the eps sweep", criterion_2),
        ("solvers match the nested-scan oracle", criterion_3),
        ("finite-n rates converge to the exponents", criterion_4),
        ("exact worst-case error equals sequence enumeration", criterion_5),
        ("non-adversarial rates near l + delta at n=500", criterion_6),
        ("converse attack soundness", criterion_7),
        ("figure data monotone and reproducible", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS criterion {}: {name} [{secs:.1}s] {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {}: {name} [{secs:.1}s] {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
