mod common;

use common::*;
use hasse_lab::counting::{
    classify_arc, count_diagonal_histogram, count_expanded, count_parametric, exp_sum, normalized_ratio, Alpha, ArcClass, ArcParameters,
    ExpSumRoute,
};
use hasse_lab::field::{AlgebraicNumber, FieldDescriptor};
use hasse_lab::forms::{expand_system, FormSystem};
use hasse_lab::linalg::rat_frac;
use proptest::prelude::*;
use rand::Rng;

const BUDGET: u128 = 50_000_000;

/// Exact zero count of `F` on the box by plain odometer enumeration.
fn brute_zero_count(sys: &FormSystem, p: i64) -> u128 {
    let n = sys.field.degree();
    let k = n * sys.s;
    let mut c = vec![-p; k];
    let mut count = 0u128;
    loop {
        let x: Vec<AlgebraicNumber> = c.chunks(n).map(AlgebraicNumber::from_ints).collect();
        if (0..sys.forms.len()).all(|rho| sys.eval(rho, &x).is_zero()) {
            count += 1;
        }
        let Some(i) = (0..k).find(|&i| c[i] < p) else { break };
        c[i] += 1;
        c[..i].iter_mut().for_each(|v| *v = -p);
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn counts_agree_with_brute_force(seed in any::<u64>()) {
        let mut g = rng(seed);
        let field = if g.gen_bool(0.5) { FieldDescriptor::gaussian() } else { FieldDescriptor::rationals() };
        let s = g.gen_range(1..=if field.degree() == 2 { 2 } else { 4 });
        let (big_r, d) = (g.gen_range(1..=2), g.gen_range(2..=3));
        let sys = random_system(&mut g, field, big_r, s, d, 3);
        let p = g.gen_range(1..=2);
        let brute = brute_zero_count(&sys, p);
        let ms = expand_system(&sys, 1).unwrap();
        prop_assert_eq!(count_expanded(&ms, p, BUDGET).unwrap(), brute);
        prop_assert_eq!(count_parametric(&sys, 1, p, BUDGET).unwrap(), brute);
    }

    #[test]
    fn v_arith_and_real_form_agree(seed in any::<u64>()) {
        let mut g = rng(seed);
        let field = if g.gen_bool(0.5) { FieldDescriptor::gaussian() } else { FieldDescriptor::rationals() };
        let s = g.gen_range(1..=2);
        let m = g.gen_range(1..=2);
        let sys = random_system(&mut g, field.clone(), 1, s, 2, 3);
        let ms = expand_system(&sys, m).unwrap();
        let alpha = random_alpha(&mut g, field.degree(), 1, ms.r(), 7);
        let p = g.gen_range(1..=3);
        let exact = Alpha::Exact(alpha);
        let a = exp_sum(&ms, &exact, p, ExpSumRoute::VArith, BUDGET).unwrap();
        let b = exp_sum(&ms, &Alpha::Real(exact.to_real()), p, ExpSumRoute::RealForm, BUDGET).unwrap();
        prop_assert!(a.histogram.is_some());
        prop_assert!((a.value() - b.value()).norm() <= 1e-9 * a.value().norm().max(1.0));
    }
}

#[test]
fn m_two_counts_agree() {
    let mut g = rng(11);
    for _ in 0..4 {
        let sys = random_system(&mut g, FieldDescriptor::rationals(), 1, 2, 2, 3);
        let ms = expand_system(&sys, 2).unwrap();
        for p in 1..=2 {
            assert_eq!(count_expanded(&ms, p, BUDGET).unwrap(), count_parametric(&sys, 2, p, BUDGET).unwrap());
        }
    }
}

#[test]
fn histogram_matches_expanded_on_diagonal_forms() {
    for (field, coeffs, p) in [
        (FieldDescriptor::rationals(), vec![1, 1, 1, -1, -1], 4),
        (FieldDescriptor::rationals(), vec![2, -3, 1], 6),
        (FieldDescriptor::gaussian(), vec![1, 1, -1], 2),
    ] {
        let sys = FormSystem::diagonal_int(field, &coeffs, 2).unwrap();
        let ms = expand_system(&sys, 1).unwrap();
        assert_eq!(count_diagonal_histogram(&sys, p).unwrap(), count_expanded(&ms, p, BUDGET).unwrap());
    }
}

#[test]
fn exact_phase_histogram_for_a_half() {
    // F = x^2 over Q, alpha = 1/2: e(x^2/2) = (-1)^x on |x| <= 2 gives 1 - 2 + 2 = 1
    let k = FieldDescriptor::rationals();
    let sys = FormSystem::diagonal_int(k.clone(), &[1], 2).unwrap();
    let ms = expand_system(&sys, 1).unwrap();
    let alpha = Alpha::Exact(vec![vec![k.from_rational(&rat_frac(1, 2))]]);
    let t = exp_sum(&ms, &alpha, 2, ExpSumRoute::VArith, BUDGET).unwrap();
    assert!((t.value().re - 1.0).abs() < 1e-12 && t.value().im.abs() < 1e-12);
    let hist = t.histogram.unwrap();
    assert_eq!(hist.values().sum::<u128>(), 5);
}

#[test]
fn rational_alpha_lands_on_a_major_arc() {
    let k = FieldDescriptor::rationals();
    let sys = FormSystem::diagonal_int(k, &[1, 1, 1], 2).unwrap();
    let ms = expand_system(&sys, 1).unwrap();
    let params = ArcParameters::new(rat_frac(1, 2), 1.0, 1.0).unwrap();
    let c = classify_arc(&ms, &[vec![vec![1.0 / 3.0 + 1e-5]]], 100, &params, 1_000_000).unwrap();
    match c {
        ArcClass::Major { q, q_gamma, .. } => {
            assert_eq!(q, vec![3]);
            assert_eq!(q_gamma, 3);
        }
        ArcClass::Minor => panic!("expected a major arc"),
    }
    let far = classify_arc(&ms, &[vec![vec![0.37]]], 4, &params, 1_000_000).unwrap();
    assert_eq!(far, ArcClass::Minor);
}

#[test]
fn normalized_ratio_uses_the_growth_power() {
    assert_eq!(normalized_ratio(4153, 5, 3), 4153.0 / 125.0);
}
