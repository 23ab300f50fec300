mod common;

use common::props;
use hasse_lab::field::FieldDescriptor;
use hasse_lab::forms::{expand_system, index_set, polarize, FormSystem};
use hasse_lab::linalg::rat;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_matches_direct_distribution(seed in any::<u64>()) {
        props::expansion_identity(seed).map_err(TestCaseError::fail)?;
    }
}

#[test]
fn index_set_sizes_are_binomial() {
    // |J| = binom(m + d - 1, d), sum of A(j) = m^d
    for m in 1..=4usize {
        for d in 2..=4usize {
            let (j, a) = index_set(m, d);
            let binom = (1..=d).fold(1usize, |acc, k| acc * (m + k - 1) / k);
            assert_eq!(j.len(), binom);
            assert_eq!(a.iter().sum::<u64>(), (m as u64).pow(d as u32));
        }
    }
}

#[test]
fn polarization_of_a_binary_quadratic() {
    // x^2 + 3xy: Phi(u, v) = u1 v1 + (3/2)(u1 v2 + u2 v1)
    let k = FieldDescriptor::rationals();
    let mut f = hasse_lab::poly::KPoly::zero(2);
    f.add_term(vec![2, 0], k.one());
    f.add_term(vec![1, 1], k.from_rational(&rat(3)));
    let phi = polarize(&k, &f, 2);
    let u = [k.from_rational(&rat(2)), k.from_rational(&rat(5))];
    let v = [k.from_rational(&rat(-1)), k.from_rational(&rat(4))];
    let got = phi.eval(&k, &[&u, &v]);
    // 2*(-1) + 1.5*(2*4 + 5*(-1)) = -2 + 4.5
    assert_eq!(got.coords[0], hasse_lab::linalg::rat_frac(5, 2));
}

#[test]
fn m_one_block_is_the_form() {
    let k = FieldDescriptor::gaussian();
    let sys = FormSystem::diagonal_int(k.clone(), &[1, 2, -3], 3).unwrap();
    let ms = expand_system(&sys, 1).unwrap();
    assert_eq!(ms.r(), 1);
    assert_eq!(ms.blocks[0][0], sys.forms[0]);
}
