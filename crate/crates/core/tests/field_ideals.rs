mod common;

use common::*;
use hasse_lab::error::Error;
use hasse_lab::field::FieldDescriptor;
use hasse_lab::ideals::{factor_prime, IdealLattice};
use hasse_lab::linalg::{rat, rat_frac};
use num_bigint::BigInt;

fn ints(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&c| BigInt::from(c)).collect()
}

#[test]
fn field_invariants() {
    let k = FieldDescriptor::gaussian();
    assert_eq!((k.degree(), k.n1(), k.n2()), (2, 0, 1));
    assert_eq!(*k.disc_field(), BigInt::from(-4));
    let g = golden();
    assert_eq!(*g.disc_field(), BigInt::from(5));
    assert_eq!(*g.index(), BigInt::from(2));
    let w = hasse_lab::field::AlgebraicNumber::basis(2, 1);
    // w^2 = w + 1
    assert_eq!(g.mul(&w, &w), hasse_lab::field::AlgebraicNumber::from_ints(&[1, 1]));
    let c = cubic();
    assert_eq!((c.n1(), c.n2()), (1, 1));
    assert_eq!(*c.disc_field(), BigInt::from(-108));
}

#[test]
fn non_ring_basis_is_rejected() {
    let basis = vec![vec![rat(1), rat(0)], vec![rat(0), rat_frac(1, 2)]];
    let e = FieldDescriptor::build(&ints(&[1, 0, 1]), basis, 64).unwrap_err();
    assert!(matches!(e, Error::NonRingBasis(_)), "{e:?}");
    let singular = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
    assert_eq!(FieldDescriptor::build(&ints(&[1, 0, 1]), singular, 64).unwrap_err(), Error::SingularBasis);
    assert_eq!(FieldDescriptor::build(&ints(&[1, 0, 2]), FieldDescriptor::power_basis(2), 64).unwrap_err(), Error::NonMonic);
}

#[test]
fn gaussian_arithmetic() {
    let k = FieldDescriptor::gaussian();
    let a = hasse_lab::field::AlgebraicNumber::from_ints(&[1, 1]);
    let b = hasse_lab::field::AlgebraicNumber::from_ints(&[1, -1]);
    assert_eq!(k.mul(&a, &b), hasse_lab::field::AlgebraicNumber::from_ints(&[2, 0]));
    let inv = k.inv(&a).unwrap();
    assert_eq!(inv.coords, vec![rat_frac(1, 2), rat_frac(-1, 2)]);
    assert_eq!(k.norm(&a), rat(2));
    assert_eq!(k.trace(&hasse_lab::field::AlgebraicNumber::basis(2, 1)), rat(0));
    assert_eq!(k.trace(&k.from_rational(&rat_frac(1, 2))), rat(1));
    assert_eq!(k.height(&hasse_lab::field::AlgebraicNumber::from_ints(&[3, 4])), rat(4));
    assert_eq!(k.inv(&k.zero()).unwrap_err(), Error::DivisionByZero);
    let g = golden();
    // 2 + sqrt 5 = 3/2 * 1 + ... in the basis {1, (1 + sqrt 5)/2}: 1 + 2w
    assert_eq!(g.norm(&hasse_lab::field::AlgebraicNumber::from_ints(&[1, 2])), rat(-1));
}

#[test]
fn prime_decomposition_in_gaussian_integers() {
    let k = FieldDescriptor::gaussian();
    let two = factor_prime(2, &k).unwrap();
    assert_eq!(two.len(), 1);
    assert_eq!((two[0].f, two[0].e, two[0].norm()), (1, 2, 2));
    let three = factor_prime(3, &k).unwrap();
    assert_eq!((three.len(), three[0].f, three[0].norm()), (1, 2, 9));
    let five = factor_prime(5, &k).unwrap();
    assert_eq!(five.len(), 2);
    assert!(five.iter().all(|p| p.norm() == 5 && p.e == 1));
    assert_ne!(five[0].lattice, five[1].lattice);
    // index divisors have no factorization path
    assert_eq!(factor_prime(2, &golden()).unwrap_err(), Error::IndexDivisor(2));
}

#[test]
fn residue_transversal_of_one_plus_i() {
    let k = FieldDescriptor::gaussian();
    let ideal = IdealLattice::principal(&k, &hasse_lab::field::AlgebraicNumber::from_ints(&[1, 1])).unwrap();
    assert_eq!(ideal.norm(), 2);
    let reps: Vec<_> = ideal.residue_elements().collect();
    assert_eq!(reps.len(), 2);
    let diff = reps[1].sub(&reps[0]);
    assert!(!ideal.contains(&diff).unwrap());
    // associates generate the same ideal
    let unit = hasse_lab::field::AlgebraicNumber::basis(2, 1);
    let assoc = k.mul(&unit, &hasse_lab::field::AlgebraicNumber::from_ints(&[1, 1]));
    assert_eq!(IdealLattice::principal(&k, &assoc).unwrap(), ideal);
}

#[test]
fn rank_deficient_generators() {
    assert_eq!(IdealLattice::hnf_reduce(&[vec![1, 2], vec![2, 4]], 2).unwrap_err(), Error::RankDeficient);
}
