//! Integral ideals of O_K as HNF sublattices of Z^n, and Dedekind
//! factorization of rational primes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AlgebraicNumber, FieldDescriptor};
use crate::lattice;

/// Ideal given by its column HNF `hnf[row][col]` in basis coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IdealLattice {
    hnf: Vec<Vec<i64>>,
    norm: u64,
}

impl IdealLattice {
    /// Canonical HNF of the lattice generated by the columns `gens`.
    pub fn hnf_reduce(gens: &[Vec<i64>], n: usize) -> Result<Self> {
        let big: Vec<Vec<BigInt>> = gens.iter().map(|c| c.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let h = lattice::hnf_columns(&big, n)?;
        Self::from_hnf_unchecked(lattice::to_i64_matrix(&h)?)
    }

    pub(crate) fn from_hnf_unchecked(hnf: Vec<Vec<i64>>) -> Result<Self> {
        let norm = hnf
            .iter()
            .enumerate()
            .try_fold(1u64, |acc, (i, r)| acc.checked_mul(r[i] as u64))
            .ok_or(Error::Overflow("ideal norm"))?;
        Ok(IdealLattice { hnf, norm })
    }

    pub fn unit(n: usize) -> Self {
        let hnf = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        IdealLattice { hnf, norm: 1 }
    }

    /// The ideal generated by the given integral elements.
    pub fn from_generators(field: &FieldDescriptor, gens: &[AlgebraicNumber]) -> Result<Self> {
        let n = field.degree();
        let mut cols = Vec::new();
        for g in gens {
            if !g.is_integral() {
                return Err(Error::NonIntegral);
            }
            for i in 0..n {
                let c = field.mul(g, &AlgebraicNumber::basis(n, i));
                cols.push(to_i64_coords(&c)?);
            }
        }
        Self::hnf_reduce(&cols, n)
    }

    pub fn principal(field: &FieldDescriptor, a: &AlgebraicNumber) -> Result<Self> {
        Self::from_generators(field, std::slice::from_ref(a))
    }

    /// The ideal `(k)` for a rational integer `k`.
    pub fn rational(n: usize, k: u64) -> Self {
        let hnf = (0..n)
            .map(|i| (0..n).map(|j| if i == j { k as i64 } else { 0 }).collect())
            .collect();
        IdealLattice { hnf, norm: k.pow(n as u32) }
    }

    pub fn hnf(&self) -> &Vec<Vec<i64>> {
        &self.hnf
    }

    pub fn norm(&self) -> u64 {
        self.norm
    }

    pub fn degree(&self) -> usize {
        self.hnf.len()
    }

    pub fn is_unit(&self) -> bool {
        self.norm == 1
    }

    /// Diagonal of the HNF: the residue transversal box.
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.degree()).map(|i| self.hnf[i][i]).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        self.hnf.iter().map(|r| r[j]).collect()
    }

    /// Canonical representative of `x` modulo the ideal, with `0 <= x_i < hnf[i][i]`.
    pub fn reduce(&self, x: &mut [i64]) {
        for i in (0..self.degree()).rev() {
            let q = x[i].div_euclid(self.hnf[i][i]);
            if q != 0 {
                for (r, row) in self.hnf.iter().enumerate().take(i + 1) {
                    x[r] -= q * row[i];
                }
            }
        }
    }

    /// Same as [`reduce`](Self::reduce) on wide integers.
    pub fn reduce_i128(&self, x: &mut [i128]) {
        for i in (0..self.degree()).rev() {
            let h = self.hnf[i][i] as i128;
            let q = x[i].div_euclid(h);
            if q != 0 {
                for (r, row) in self.hnf.iter().enumerate().take(i + 1) {
                    x[r] -= q * row[i] as i128;
                }
            }
        }
    }

    pub fn contains_coords(&self, x: &[i64]) -> bool {
        let mut y = x.to_vec();
        self.reduce(&mut y);
        y.iter().all(|&v| v == 0)
    }

    pub fn contains(&self, a: &AlgebraicNumber) -> Result<bool> {
        if !a.is_integral() {
            return Err(Error::NonIntegral);
        }
        let mut x: Vec<i128> = a
            .coords
            .iter()
            .map(|c| c.to_integer().to_i128().ok_or(Error::Overflow("ideal membership")))
            .collect::<Result<_>>()?;
        self.reduce_i128(&mut x);
        Ok(x.iter().all(|&v| v == 0))
    }

    /// Coset representatives in lexicographic coordinate order.
    pub fn residues(&self) -> Residues {
        Residues { diag: self.diagonal(), next: Some(vec![0; self.degree()]) }
    }

    pub fn residue_elements(&self) -> impl Iterator<Item = AlgebraicNumber> {
        self.residues().map(|c| AlgebraicNumber::from_ints(&c))
    }

    /// Every basis column times every `omega_i` lies back in the lattice.
    pub fn is_closed(&self, field: &FieldDescriptor) -> bool {
        let n = self.degree();
        (0..n).all(|j| {
            let col = AlgebraicNumber::from_ints(&self.column(j));
            (0..n).all(|i| {
                let p = field.mul(&col, &AlgebraicNumber::basis(n, i));
                matches!(self.contains(&p), Ok(true))
            })
        })
    }
}

/// Lazily enumerated residue transversal.
#[derive(Debug, Clone)]
pub struct Residues {
    diag: Vec<i64>,
    next: Option<Vec<i64>>,
}

impl Iterator for Residues {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        let cur = self.next.take()?;
        let mut nxt = cur.clone();
        let mut k = nxt.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            nxt[k] += 1;
            if nxt[k] < self.diag[k] {
                self.next = Some(nxt);
                break;
            }
            nxt[k] = 0;
        }
        Some(cur)
    }
}

fn to_i64_coords(a: &AlgebraicNumber) -> Result<Vec<i64>> {
    a.coords
        .iter()
        .map(|c| {
            if !c.is_integer() {
                return Err(Error::NonIntegral);
            }
            c.to_integer().to_i64().ok_or(Error::Overflow("ideal generator"))
        })
        .collect()
}

pub fn ideal_mul(field: &FieldDescriptor, a: &IdealLattice, b: &IdealLattice) -> Result<IdealLattice> {
    let n = field.degree();
    let mut cols = Vec::with_capacity(n * n);
    for i in 0..n {
        let x = AlgebraicNumber::from_ints(&a.column(i));
        for j in 0..n {
            let y = AlgebraicNumber::from_ints(&b.column(j));
            cols.push(to_i64_coords(&field.mul(&x, &y))?);
        }
    }
    IdealLattice::hnf_reduce(&cols, n)
}

pub fn ideal_pow(field: &FieldDescriptor, a: &IdealLattice, j: u32) -> Result<IdealLattice> {
    let mut acc = IdealLattice::unit(field.degree());
    for _ in 0..j {
        acc = ideal_mul(field, &acc, a)?;
    }
    Ok(acc)
}

/// A prime ideal `(p, g(theta))` above `p` from Dedekind's criterion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub p: u64,
    /// Residue degree.
    pub f: usize,
    /// Ramification index.
    pub e: usize,
    /// Monic factor of the minimal polynomial mod p, ascending coefficients.
    pub g: Vec<u64>,
    pub lattice: IdealLattice,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u64 {
        self.lattice.norm()
    }
}

/// Polynomial arithmetic over F_p, ascending coefficients, trimmed.
mod fp {
    pub fn trim(mut a: Vec<u64>) -> Vec<u64> {
        while a.last() == Some(&0) {
            a.pop();
        }
        a
    }

    pub fn inv(a: u64, p: u64) -> u64 {
        let mut r = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = (r as u128 * b as u128 % p as u128) as u64;
            }
            b = (b as u128 * b as u128 % p as u128) as u64;
            e >>= 1;
        }
        r
    }

    /// Returns `(quotient, remainder)`.
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let b = trim(b.to_vec());
        let mut r = trim(a.to_vec());
        if r.len() < b.len() {
            return (vec![], r);
        }
        let lead_inv = inv(*b.last().unwrap(), p);
        let mut q = vec![0u64; r.len() - b.len() + 1];
        while r.len() >= b.len() && !r.is_empty() {
            let shift = r.len() - b.len();
            let c = (*r.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                let sub = (c as u128 * bi as u128 % p as u128) as u64;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }
}

/// Factors `p O_K` by Dedekind's criterion; refuses primes dividing the index.
pub fn factor_prime(p: u64, field: &FieldDescriptor) -> Result<Vec<PrimeIdeal>> {
    if p < 2 {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if (field.index() % BigInt::from(p)) == BigInt::from(0) {
        return Err(Error::IndexDivisor(p));
    }
    let n = field.degree();
    let pb = BigInt::from(p);
    let mut rest: Vec<u64> = field
        .min_poly()
        .iter()
        .map(|c| c.mod_floor(&pb).to_u64().unwrap())
        .collect();
    rest = fp::trim(rest);
    let mut factors: Vec<(Vec<u64>, usize)> = Vec::new();
    let mut deg = 1;
    while rest.len() > 1 {
        let rdeg = rest.len() - 1;
        if 2 * deg > rdeg {
            factors.push((rest.clone(), 1));
            break;
        }
        let total = (p as u128).checked_pow(deg as u32).filter(|&t| t <= 50_000_000).ok_or(Error::BudgetExceeded {
            needed: (p as u128).saturating_pow(deg as u32),
            budget: 50_000_000,
        })?;
        for idx in 0..total {
            let mut g = Vec::with_capacity(deg + 1);
            let mut t = idx;
            for _ in 0..deg {
                g.push((t % p as u128) as u64);
                t /= p as u128;
            }
            g.push(1);
            if rest.len() - 1 < deg {
                break;
            }
            let mut e = 0;
            loop {
                let (q, r) = fp::divrem(&rest, &g, p);
                if !r.is_empty() {
                    break;
                }
                rest = q;
                e += 1;
            }
            if e > 0 {
                factors.push((g, e));
            }
        }
        deg += 1;
    }
    // merge a trailing irreducible factor that repeats an earlier one
    let mut merged: Vec<(Vec<u64>, usize)> = Vec::new();
    for (g, e) in factors {
        if let Some(m) = merged.iter_mut().find(|(h, _)| *h == g) {
            m.1 += e;
        } else {
            merged.push((g, e));
        }
    }
    let mut out = Vec::new();
    for (g, e) in merged {
        let f = g.len() - 1;
        let g_theta = (0..g.len()).fold(field.zero(), |acc, k| {
            acc.add(&field.theta_power(k).scale(&crate::linalg::rat(g[k] as i64)))
        });
        let lattice = IdealLattice::from_generators(field, &[field.from_rational(&crate::linalg::rat(p as i64)), g_theta])?;
        debug_assert_eq!(lattice.norm(), p.pow(f as u32));
        out.push(PrimeIdeal { p, f, e, g, lattice });
    }
    let total: usize = out.iter().map(|q| q.e * q.f).sum();
    if total != n {
        return Err(Error::DegenerateData(format!("factorization of {p} has degree {total} != {n}")));
    }
    Ok(out)
}

/// Rational primes up to `bound`.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return vec![];
    }
    let b = bound as usize;
    let mut sieve = vec![true; b + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= b {
        if sieve[i] {
            let mut j = i * i;
            while j <= b {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (2..=b).filter(|&k| sieve[k]).map(|k| k as u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_examples() {
        let two = IdealLattice::hnf_reduce(&[vec![2, 0], vec![0, 2]], 2).unwrap();
        assert_eq!(two.hnf(), &vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(two.norm(), 4);
        let k = FieldDescriptor::gaussian();
        let a = IdealLattice::principal(&k, &AlgebraicNumber::from_ints(&[1, 1])).unwrap();
        assert_eq!(a.norm(), 2);
        assert!(a.is_closed(&k));
        assert_eq!(IdealLattice::hnf_reduce(&[vec![1, 0], vec![0, 1]], 2).unwrap(), IdealLattice::unit(2));
        assert_eq!(IdealLattice::hnf_reduce(&[vec![1, 1], vec![2, 2]], 2), Err(Error::RankDeficient));
    }

    #[test]
    fn products_and_powers() {
        let k = FieldDescriptor::gaussian();
        let a = IdealLattice::principal(&k, &AlgebraicNumber::from_ints(&[1, 1])).unwrap();
        assert_eq!(ideal_pow(&k, &a, 2).unwrap(), IdealLattice::rational(2, 2));
        assert_eq!(ideal_mul(&k, &a, &IdealLattice::unit(2)).unwrap(), a);
        let q = FieldDescriptor::rationals();
        assert_eq!(ideal_pow(&q, &IdealLattice::rational(1, 3), 2).unwrap(), IdealLattice::rational(1, 9));
    }

    #[test]
    fn gaussian_factorizations() {
        let k = FieldDescriptor::gaussian();
        let f5 = factor_prime(5, &k).unwrap();
        assert_eq!(f5.len(), 2);
        assert!(f5.iter().all(|q| q.f == 1 && q.e == 1 && q.norm() == 5));
        assert_ne!(f5[0].lattice, f5[1].lattice);
        let f3 = factor_prime(3, &k).unwrap();
        assert_eq!((f3.len(), f3[0].f, f3[0].norm()), (1, 2, 9));
        let f2 = factor_prime(2, &k).unwrap();
        assert_eq!((f2.len(), f2[0].f, f2[0].e), (1, 1, 2));
    }

    #[test]
    fn index_divisor_refused() {
        use crate::linalg::{rat, rat_frac};
        let basis = vec![vec![rat(1), rat(0)], vec![rat_frac(1, 2), rat_frac(1, 2)]];
        let five: Vec<BigInt> = [-5, 0, 1].iter().map(|&x| BigInt::from(x)).collect();
        let k = FieldDescriptor::build(&five, basis, 32).unwrap();
        assert_eq!(factor_prime(2, &k), Err(Error::IndexDivisor(2)));
        assert_eq!(factor_prime(11, &k).unwrap().len(), 2);
    }

    #[test]
    fn residues_and_membership() {
        assert_eq!(IdealLattice::unit(2).residues().collect::<Vec<_>>(), vec![vec![0, 0]]);
        assert_eq!(IdealLattice::rational(1, 2).residues().collect::<Vec<_>>(), vec![vec![0], vec![1]]);
        let k = FieldDescriptor::gaussian();
        let a = IdealLattice::principal(&k, &AlgebraicNumber::from_ints(&[1, 1])).unwrap();
        assert_eq!(a.residues().collect::<Vec<_>>(), vec![vec![0, 0], vec![1, 0]]);
        assert!(!a.contains(&k.one()).unwrap());
        assert!(a.contains(&k.zero()).unwrap());
        assert!(IdealLattice::rational(1, 2).contains(&AlgebraicNumber::from_ints(&[6])).unwrap());
        assert_eq!(
            a.contains(&AlgebraicNumber::new(vec![crate::linalg::rat_frac(1, 2), crate::linalg::rat(0)])),
            Err(Error::NonIntegral)
        );
    }

    #[test]
    fn sieve() {
        assert_eq!(primes_up_to(20), vec![2, 3, 5, 7, 11, 13, 17, 19]);
    }
}
