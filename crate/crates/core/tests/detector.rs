use abstain_core::finite_n::exact_decision_masses;
use abstain_core::prob::enumerate_types;
use abstain_core::{Decision, DetectorSpec, Distribution, Hypothesis};
use proptest::prelude::*;

fn spec(delta: f64) -> DetectorSpec {
    DetectorSpec::new(Distribution::bernoulli(0.1).unwrap(), Distribution::bernoulli(0.5).unwrap(), 0.05, 0.05, delta)
        .unwrap()
}

fn d2(a: f64, b: f64) -> f64 {
    let t = |x: f64, y: f64| if x <= 0.0 { 0.0 } else { x * (x / y).log2() };
    t(a, b) + t(1.0 - a, 1.0 - b)
}

#[test]
fn region_cardinalities_at_n10() {
    let region = spec(0.01).decision_region(10).unwrap();
    let (mut zero, mut one, mut abstain) = (0, 0, 0);
    for k in 0..=10u32 {
        let x = k as f64 / 10.0;
        if d2(x, 0.1) <= 0.06 {
            zero += 1;
        } else if d2(x, 0.5) <= 0.06 {
            one += 1;
        } else {
            abstain += 1;
        }
    }
    assert_eq!(region.cardinalities(), (zero, one, abstain));
    assert_eq!(region.cardinalities(), (1, 3, 7));
}

#[test]
fn law_of_large_numbers_at_n500() {
    let s = spec(0.01);
    let m0 = exact_decision_masses(&s, 500, Hypothesis::H0).unwrap();
    let m1 = exact_decision_masses(&s, 500, Hypothesis::H1).unwrap();
    assert!(m0[0].exp2() >= 1.0 - 1e-3, "{m0:?}");
    assert!(m1[1].exp2() >= 1.0 - 1e-3, "{m1:?}");
}

#[test]
fn ternary_region_partitions_the_simplex() {
    let s = DetectorSpec::new(
        Distribution::new(vec![0.6, 0.3, 0.1]).unwrap(),
        Distribution::new(vec![0.1, 0.3, 0.6]).unwrap(),
        0.08,
        0.08,
        0.01,
    )
    .unwrap();
    let r = s.decision_region(15).unwrap();
    let (a, b, c) = r.cardinalities();
    assert_eq!(a + b + c, 136);
    for t in enumerate_types(15, 3).unwrap() {
        assert_eq!(r.decision_of(t.counts()), s.decide(&t));
    }
    assert_eq!(r.members(Decision::Zero).count(), a);
}

proptest! {
    #[test]
    fn decisions_respect_balls(k in 0u32..=40, delta in 0.0f64..0.02) {
        let s = spec(delta);
        let x = k as f64 / 40.0;
        match s.decide_counts(&[40 - k, k]) {
            Decision::Zero => prop_assert!(d2(x, 0.1) <= 0.05 + delta + 1e-12),
            Decision::One => prop_assert!(d2(x, 0.5) <= 0.05 + delta + 1e-12 && d2(x, 0.1) > 0.05 + delta - 1e-12),
            Decision::Abstain => prop_assert!(d2(x, 0.1) > 0.05 + delta - 1e-12 && d2(x, 0.5) > 0.05 + delta - 1e-12),
        }
    }

    #[test]
    fn larger_delta_shrinks_abstention(n in 5u32..60, d1 in 0.0f64..0.02, d2_ in 0.0f64..0.02) {
        let (lo, hi) = if d1 <= d2_ { (d1, d2_) } else { (d2_, d1) };
        let a = spec(lo).decision_region(n).unwrap();
        let b = spec(hi).decision_region(n).unwrap();
        for (x, y) in a.decisions().iter().zip(b.decisions()) {
            if *x != Decision::Abstain {
                prop_assert_eq!(x, y);
            }
        }
    }

    #[test]
    fn sequence_order_is_irrelevant(mut seq in proptest::collection::vec(0usize..2, 1..50), seed in any::<u64>()) {
        let s = spec(0.01);
        let d = s.decide_sequence(&seq).unwrap();
        let len = seq.len();
        seq.rotate_left((seed as usize) % len);
        seq.reverse();
        prop_assert_eq!(s.decide_sequence(&seq).unwrap(), d);
    }
}
