//! Complete exponential sums S(gamma), the counts Gamma(p^j), the local
//! densities chi_p, the truncated singular series and the Euler product.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::{histogram_value, ExactPhase};
use crate::error::{Error, Result};
use crate::field::{reduce_mod_one, AlgebraicNumber, FieldDescriptor};
use crate::forms::MultilinearSystem;
use crate::ideals::{factor_prime, ideal_pow, primes_up_to, IdealLattice, PrimeIdeal};
use crate::intarith::{odometer, IntElem, IntField, IntSystem, ZERO};
use crate::linalg::{rat_to_f64, Rat};

pub const DEFAULT_LOCAL_BUDGET: u128 = 50_000_000;
pub const DEFAULT_RESIDUE_LIMIT: u128 = 6_000_000;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

/// `O_K / L` with residues indexed in lexicographic coordinate order.
pub(crate) struct ResidueRing {
    pub n: usize,
    pub lattice: IdealLattice,
    strides: Vec<usize>,
    pub size: usize,
    pub f: IntField,
    pub one: IntElem,
}

impl ResidueRing {
    pub fn new(field: &FieldDescriptor, lattice: IdealLattice) -> Result<Self> {
        let n = field.degree();
        let diag = lattice.diagonal();
        let mut strides = vec![1usize; n];
        for k in (0..n.saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * diag[k + 1] as usize;
        }
        let size = lattice.norm() as usize;
        let f = IntField::new(field)?;
        let ones: Vec<i64> = field.one().integer_coords()?.iter().map(|c| c.to_i64().unwrap_or(0)).collect();
        let one = f.from_coords(&ones);
        Ok(ResidueRing { n, lattice, strides, size, f, one })
    }

    pub fn elem(&self, mut idx: usize) -> IntElem {
        let mut e = ZERO;
        for k in 0..self.n {
            e[k] = (idx / self.strides[k]) as i128;
            idx %= self.strides[k];
        }
        e
    }

    /// Reduces in place and returns the residue index.
    pub fn index(&self, e: &mut IntElem) -> usize {
        self.lattice.reduce_i128(&mut e[..self.n]);
        (0..self.n).map(|k| e[k] as usize * self.strides[k]).sum()
    }

    pub fn is_zero(&self, e: &IntElem) -> bool {
        let mut x = *e;
        self.lattice.reduce_i128(&mut x[..self.n]);
        x.iter().all(|&v| v == 0)
    }
}

/// A K-rational point `gamma` reduced into `[0, 1)` coordinates, with its
/// denominator ideal and `q_gamma = Nm q(gamma)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RationalPoint {
    pub gamma: Vec<Vec<AlgebraicNumber>>,
    pub denom: IdealLattice,
    pub q_gamma: u64,
}

impl RationalPoint {
    pub fn new(field: &FieldDescriptor, gamma: Vec<Vec<AlgebraicNumber>>) -> Result<Self> {
        let gamma: Vec<Vec<AlgebraicNumber>> = gamma.iter().map(|row| row.iter().map(reduce_mod_one).collect()).collect();
        let flat: Vec<AlgebraicNumber> = gamma.iter().flatten().cloned().collect();
        let denom = field.denominator_ideal_vec(&flat)?;
        let q_gamma = denom.norm();
        Ok(RationalPoint { gamma, denom, q_gamma })
    }

    pub fn zero(sys: &MultilinearSystem) -> Self {
        RationalPoint {
            gamma: vec![vec![sys.field.zero(); sys.r()]; sys.big_r()],
            denom: IdealLattice::unit(sys.n()),
            q_gamma: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussSum {
    pub re: f64,
    pub im: f64,
    /// Phases are `residue / modulus`.
    pub modulus: i128,
    pub histogram: BTreeMap<i128, u128>,
    pub terms: u128,
}

impl GaussSum {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// `S(gamma)` over the standard residue transversal of `q(gamma)`.
pub fn gauss_sum(sys: &MultilinearSystem, pt: &RationalPoint, budget: u128) -> Result<GaussSum> {
    gauss_sum_shifted(sys, pt, None, budget)
}

/// `S(gamma)` over the transversal translated by `shift[v]` (basis coordinates) in variable `v`.
pub fn gauss_sum_shifted(sys: &MultilinearSystem, pt: &RationalPoint, shift: Option<&[Vec<i64>]>, budget: u128) -> Result<GaussSum> {
    if pt.gamma.len() != sys.big_r() || pt.gamma.iter().any(|r| r.len() != sys.r()) {
        return Err(Error::DimensionMismatch(format!("gamma must be {} x {}", sys.big_r(), sys.r())));
    }
    let ms = sys.ms();
    let n = sys.n();
    if let Some(s) = shift {
        if s.len() != ms || s.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("shift must have {ms} vectors of length {n}")));
        }
    }
    let q = pt.q_gamma as u128;
    let needed = q.checked_pow(ms as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let ph = ExactPhase::new(sys, &pt.gamma)?;
    let reps: Vec<Vec<i64>> = pt.denom.residues().collect();
    let nq = reps.len() as i64;
    let point = |idx: &[i64], out: &mut [IntElem]| {
        for (v, o) in out.iter_mut().enumerate() {
            *o = ZERO;
            for k in 0..n {
                o[k] = (reps[idx[v] as usize][k] + shift.map_or(0, |s| s[v][k])) as i128;
            }
        }
    };
    let nb = ph.isys.blocks.len();
    let parts: Vec<HashMap<i128, u128>> = (0..nq)
        .into_par_iter()
        .map(|lead| {
            let mut h = HashMap::new();
            let mut idx = vec![0i64; ms];
            idx[0] = lead;
            let mut elems = vec![ZERO; ms];
            let mut vals = vec![ZERO; nb];
            loop {
                point(&idx, &mut elems);
                ph.isys.eval_into(&elems, &mut vals);
                *h.entry(ph.residue(&vals)).or_insert(0u128) += 1;
                if !odometer(&mut idx[1..], 0, nq - 1) {
                    break;
                }
            }
            h
        })
        .collect();
    let mut hist = BTreeMap::new();
    for h in parts {
        for (k, v) in h {
            *hist.entry(k).or_insert(0) += v;
        }
    }
    let value = histogram_value(&hist, ph.modulus);
    Ok(GaussSum { re: value.re, im: value.im, modulus: ph.modulus, histogram: hist, terms: needed })
}

fn integral_system(sys: &MultilinearSystem) -> Result<IntSystem> {
    let isys = IntSystem::new(sys)?;
    if !isys.is_integral() {
        return Err(Error::NonIntegralForm);
    }
    Ok(isys)
}

/// `Gamma(p^j)`: residues `xbar` modulo `p^j` with every block in `p^j`.
/// Single diagonal forms with `m = 1` use the orbit-convolution path.
pub fn gamma_count(sys: &MultilinearSystem, prime: &PrimeIdeal, j: u32, budget: u128) -> Result<u128> {
    if sys.m == 1 && sys.big_r() == 1 && sys.forms.diagonal_coeffs().is_some() {
        gamma_count_diagonal(sys, prime, j, budget)
    } else {
        gamma_count_brute(sys, prime, j, budget)
    }
}

/// Direct enumeration of `(O_K / p^j)^{ms}`.
pub fn gamma_count_brute(sys: &MultilinearSystem, prime: &PrimeIdeal, j: u32, budget: u128) -> Result<u128> {
    let field = &sys.field;
    let lat = ideal_pow(field, &prime.lattice, j)?;
    let ms = sys.ms();
    let size = lat.norm() as u128;
    let needed = size.checked_pow(ms as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let isys = integral_system(sys)?;
    let ring = ResidueRing::new(field, lat)?;
    let reps: Vec<IntElem> = (0..ring.size).map(|i| ring.elem(i)).collect();
    let nr = ring.size as i64;
    let parts: Vec<u128> = (0..nr)
        .into_par_iter()
        .map(|lead| {
            let mut idx = vec![0i64; ms];
            idx[0] = lead;
            let mut elems = vec![ZERO; ms];
            let mut count = 0u128;
            loop {
                for (o, &i) in elems.iter_mut().zip(&idx) {
                    *o = reps[i as usize];
                }
                if isys.blocks.iter().all(|b| ring.is_zero(&b.eval(&isys.field, &elems))) {
                    count += 1;
                }
                if !odometer(&mut idx[1..], 0, nr - 1) {
                    break;
                }
            }
            count
        })
        .collect();
    Ok(parts.into_iter().sum())
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Orbit labels of `O_K / L` under multiplication by the `d`-th powers of units.
fn unit_power_orbits(ring: &ResidueRing, prime: &IdealLattice, d: u32) -> (Vec<u32>, Vec<usize>) {
    let size = ring.size;
    let f = &ring.f;
    let pow = |e: &IntElem| {
        let mut acc = *e;
        for _ in 1..d {
            acc = f.mul(&acc, e);
            ring.index(&mut acc);
        }
        acc
    };
    let units: Vec<usize> = (0..size)
        .filter(|&i| {
            let mut x = ring.elem(i);
            prime.reduce_i128(&mut x[..ring.n]);
            x.iter().any(|&v| v != 0)
        })
        .collect();
    let mut is_power = vec![false; size];
    for &u in &units {
        let mut p = pow(&ring.elem(u));
        is_power[ring.index(&mut p)] = true;
    }
    let target = is_power.iter().filter(|&&b| b).count();
    let powers: Vec<usize> = (0..size).filter(|&i| is_power[i]).collect();
    let mut parent: Vec<u32> = (0..size as u32).collect();
    let one_idx = {
        let mut e = ring.one;
        ring.index(&mut e)
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut gens = 0;
    loop {
        let root = find(&mut parent, one_idx as u32);
        let sub = (0..size as u32).filter(|&v| find(&mut parent, v) == root).count();
        if sub >= target || gens >= 64 || powers.is_empty() {
            break;
        }
        let g = ring.elem(powers[rng.gen_range(0..powers.len())]);
        gens += 1;
        for v in 0..size {
            let mut w = f.mul(&g, &ring.elem(v));
            let wi = ring.index(&mut w);
            let (a, b) = (find(&mut parent, v as u32), find(&mut parent, wi as u32));
            if a != b {
                parent[a.max(b) as usize] = a.min(b);
            }
        }
    }
    let mut label = vec![0u32; size];
    let mut reps = Vec::new();
    let mut id_of: HashMap<u32, u32> = HashMap::new();
    for v in 0..size {
        let r = find(&mut parent, v as u32);
        let id = *id_of.entry(r).or_insert_with(|| {
            reps.push(v);
            (reps.len() - 1) as u32
        });
        label[v] = id;
    }
    (label, reps)
}

/// Orbit-convolution count for a single diagonal form with `m = 1`.
pub fn gamma_count_diagonal(sys: &MultilinearSystem, prime: &PrimeIdeal, j: u32, residue_limit: u128) -> Result<u128> {
    let coeffs = sys
        .forms
        .diagonal_coeffs()
        .filter(|_| sys.m == 1)
        .ok_or_else(|| Error::InvalidForm("orbit path needs one diagonal form and m = 1".into()))?;
    let field = &sys.field;
    let lat = ideal_pow(field, &prime.lattice, j)?;
    let size = lat.norm() as u128;
    if size > residue_limit {
        return Err(Error::BudgetExceeded { needed: size, budget: residue_limit });
    }
    let ring = ResidueRing::new(field, lat)?;
    let n = ring.n;
    let cs: Vec<IntElem> = coeffs
        .iter()
        .map(|c| {
            let v = c.integer_coords().map_err(|_| Error::NonIntegralForm)?;
            let mut e = ZERO;
            for (k, x) in v.iter().enumerate() {
                e[k] = x.to_i128().ok_or(Error::Overflow("form coefficient"))?;
            }
            Ok(e)
        })
        .collect::<Result<_>>()?;
    let size = ring.size;
    let d = sys.d as u32;
    let f = &ring.f;
    let powd: Vec<u32> = (0..size)
        .into_par_iter()
        .map(|i| {
            let x = ring.elem(i);
            let mut acc = x;
            for _ in 1..d {
                acc = f.mul(&acc, &x);
                ring.index(&mut acc);
            }
            ring.index(&mut acc) as u32
        })
        .collect();
    let hist = |c: &IntElem| -> Vec<u64> {
        let mut h = vec![0u64; size];
        for &p in &powd {
            let mut v = f.mul(c, &ring.elem(p as usize));
            h[ring.index(&mut v)] += 1;
        }
        h
    };
    let zero_idx = 0usize;
    let s = cs.len();
    if s == 1 {
        return Ok(hist(&cs[0])[zero_idx] as u128);
    }
    let sub_idx = |a: usize, b: usize| -> usize {
        let (x, y) = (ring.elem(a), ring.elem(b));
        let mut z = ZERO;
        for k in 0..n {
            z[k] = x[k] - y[k];
        }
        ring.index(&mut z)
    };
    let (label, reps) = unit_power_orbits(&ring, &prime.lattice, d);
    let mut cur: Vec<u128> = hist(&cs[0]).into_iter().map(u128::from).collect();
    for (i, c) in cs.iter().enumerate().skip(1) {
        let h = hist(c);
        if i == s - 1 {
            return Ok((0..size).map(|w| cur[w] * h[sub_idx(zero_idx, w)] as u128).sum());
        }
        let vals: Vec<u128> = reps
            .par_iter()
            .map(|&v| (0..size).filter(|&w| cur[w] != 0).map(|w| cur[w] * h[sub_idx(v, w)] as u128).sum())
            .collect();
        cur = label.iter().map(|&l| vals[l as usize]).collect();
    }
    unreachable!("loop returns at the last variable")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChiStatus {
    Stabilized,
    Partial,
    Diverged,
}

/// The sequence `a_j = Nm(p)^{j(Rr - ms)} Gamma(p^j)` and its limit estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiP {
    pub p: u64,
    pub f: usize,
    pub e: usize,
    pub norm: u64,
    pub gamma: Vec<u128>,
    #[serde(with = "crate::linalg::rat_vec_str")]
    pub a: Vec<Rat>,
    pub status: ChiStatus,
    pub stabilized_at: Option<usize>,
    pub value: Option<f64>,
    pub note: Option<String>,
}

/// Computes `a_1, a_2, ...` until two consecutive differences fall below
/// `tol`; a single vanishing difference is not enough, since Hensel-type
/// recursions can repeat a value once before moving again.
pub fn chi_p(sys: &MultilinearSystem, prime: &PrimeIdeal, j_max: u32, tol: f64, budget: u128) -> Result<ChiP> {
    let nm = Rat::from_integer(prime.norm().into());
    let shift = sys.big_r() as i64 * sys.r() as i64 - sys.ms() as i64;
    let step = if shift >= 0 { num_traits::pow(nm.clone(), shift as usize) } else { num_traits::pow(nm.recip(), (-shift) as usize) };
    let mut out = ChiP {
        p: prime.p,
        f: prime.f,
        e: prime.e,
        norm: prime.norm(),
        gamma: Vec::new(),
        a: Vec::new(),
        status: ChiStatus::Partial,
        stabilized_at: None,
        value: None,
        note: None,
    };
    let mut weight = Rat::one();
    let mut growth = 0;
    for j in 1..=j_max {
        let g = match gamma_count(sys, prime, j, budget) {
            Ok(g) => g,
            Err(e) if e.is_budget() => {
                out.note = Some(format!("stopped at j = {j}: {e}"));
                break;
            }
            Err(e) => return Err(e),
        };
        weight *= &step;
        let a = &weight * Rat::from_integer(g.into());
        out.gamma.push(g);
        if let Some(prev) = out.a.last() {
            if !prev.is_zero() && a >= prev * Rat::from_integer(2.into()) {
                growth += 1;
            } else {
                growth = 0;
            }
        }
        out.a.push(a);
        out.value = out.a.last().map(rat_to_f64);
        if growth >= 2 {
            out.status = ChiStatus::Diverged;
            out.value = None;
            return Ok(out);
        }
        let k = out.a.len();
        if k >= 3 {
            let d1 = rat_to_f64(&(&out.a[k - 1] - &out.a[k - 2]).abs());
            let d2 = rat_to_f64(&(&out.a[k - 2] - &out.a[k - 3]).abs());
            if d1 < tol && d2 < tol {
                out.status = ChiStatus::Stabilized;
                out.stabilized_at = Some(j as usize);
                return Ok(out);
            }
        }
    }
    Ok(out)
}

/// Principal ideals of norm at most `q_bound`, found from generators of height at most `height`.
pub fn principal_ideals(field: &FieldDescriptor, q_bound: u64, height: i64) -> Result<Vec<(AlgebraicNumber, IdealLattice)>> {
    if !field.class_number_one() {
        return Err(Error::UnsupportedField);
    }
    let n = field.degree();
    let mut found: BTreeMap<(u64, Vec<Vec<i64>>), (AlgebraicNumber, IdealLattice)> = BTreeMap::new();
    let mut x = vec![-height; n];
    loop {
        if x.iter().any(|&v| v != 0) {
            let q = AlgebraicNumber::from_ints(&x);
            let nm = field.norm(&q).abs();
            if nm <= Rat::from_integer(q_bound.into()) {
                let lat = IdealLattice::principal(field, &q)?;
                found.entry((lat.norm(), lat.hnf().clone())).or_insert((q, lat));
            }
        }
        if !odometer(&mut x, -height, height) {
            break;
        }
    }
    Ok(found.into_values().collect())
}

/// All `gamma` in `(K / O_K)^k` with `q_gamma <= q_bound`, in order of `q_gamma`.
pub fn rational_points(field: &FieldDescriptor, k: usize, q_bound: u64, height: i64, budget: u128) -> Result<Vec<RationalPoint>> {
    let ideals = principal_ideals(field, q_bound, height)?;
    let mut out = Vec::new();
    for (q, lat) in ideals {
        let needed = (lat.norm() as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        let qinv = field.inv(&q)?;
        let reps: Vec<AlgebraicNumber> = lat.residue_elements().collect();
        let nr = reps.len() as i64;
        let mut idx = vec![0i64; k];
        loop {
            let gamma: Vec<AlgebraicNumber> = idx.iter().map(|&i| field.mul(&reps[i as usize], &qinv)).collect();
            let pt = RationalPoint::new(field, vec![gamma])?;
            if pt.denom == lat {
                let r = pt.gamma.into_iter().next().unwrap_or_default();
                out.push(RationalPoint { gamma: vec![r], denom: pt.denom, q_gamma: pt.q_gamma });
            }
            if !odometer(&mut idx, 0, nr - 1) {
                break;
            }
        }
    }
    Ok(out)
}

/// Number of `gamma` in `(K / O_K)^k` with each exact value of `q_gamma`.
pub fn rational_point_counts(field: &FieldDescriptor, k: usize, q_bound: u64, height: i64, budget: u128) -> Result<BTreeMap<u64, u64>> {
    let mut out = BTreeMap::new();
    for pt in rational_points(field, k, q_bound, height, budget)? {
        *out.entry(pt.q_gamma).or_insert(0) += 1;
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTerm {
    pub q_gamma: u64,
    pub points: u64,
    pub re: f64,
    pub im: f64,
    /// `max q^{-ms} |S(gamma)|` over the points with this `q_gamma`.
    pub max_normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSeries {
    pub q_bound: u64,
    pub re: f64,
    pub im: f64,
    pub terms: Vec<SeriesTerm>,
    /// Whether `max q^{-ms}|S|` is non-increasing in `q` over the computed range.
    pub decay_envelope_monotone: bool,
}

/// `S(Q) = sum_{q_gamma <= Q} q_gamma^{-ms} S(gamma)`.
pub fn singular_series_truncated(sys: &MultilinearSystem, q_bound: u64, height: Option<i64>, budget: u128) -> Result<SingularSeries> {
    let field = &sys.field;
    if !field.class_number_one() {
        return Err(Error::UnsupportedField);
    }
    let k = sys.big_r() * sys.r();
    let h = height.unwrap_or(q_bound.max(1) as i64);
    let points = rational_points(field, k, q_bound, h, budget)?;
    let r = sys.r();
    let mut terms: BTreeMap<u64, SeriesTerm> = BTreeMap::new();
    let mut total = Complex64::new(0.0, 0.0);
    for pt in points {
        let gamma: Vec<Vec<AlgebraicNumber>> = pt.gamma[0].chunks(r).map(|c| c.to_vec()).collect();
        let p = RationalPoint { gamma, denom: pt.denom, q_gamma: pt.q_gamma };
        let s = gauss_sum(sys, &p, budget)?.value();
        let w = (p.q_gamma as f64).powi(-(sys.ms() as i32));
        let t = terms.entry(p.q_gamma).or_insert(SeriesTerm { q_gamma: p.q_gamma, points: 0, re: 0.0, im: 0.0, max_normalized: 0.0 });
        t.points += 1;
        t.re += w * s.re;
        t.im += w * s.im;
        t.max_normalized = t.max_normalized.max(w * s.norm());
        total += s * w;
    }
    let terms: Vec<SeriesTerm> = terms.into_values().collect();
    let decay_envelope_monotone = terms.windows(2).all(|w| w[1].max_normalized <= w[0].max_normalized + 1e-12);
    Ok(SingularSeries { q_bound, re: total.re, im: total.im, terms, decay_envelope_monotone })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EulerProduct {
    pub q_bound: u64,
    pub factors: Vec<ChiP>,
    /// Rational primes dividing the index of the basis, left out of the product.
    pub skipped: Vec<u64>,
    pub value: Option<f64>,
    pub status: ChiStatus,
}

/// `prod_{Nm p <= Q} chi_p` from the stabilized (or last computed) `a_j`.
pub fn euler_product(sys: &MultilinearSystem, q_bound: u64, j_max: u32, tol: f64, budget: u128) -> Result<EulerProduct> {
    let field = &sys.field;
    let mut factors = Vec::new();
    let mut skipped = Vec::new();
    for p in primes_up_to(q_bound) {
        let primes = match factor_prime(p, field) {
            Ok(v) => v,
            Err(Error::IndexDivisor(p)) => {
                skipped.push(p);
                continue;
            }
            Err(e) => return Err(e),
        };
        for pr in primes.iter().filter(|pr| pr.norm() <= q_bound) {
            factors.push(chi_p(sys, pr, j_max, tol, budget)?);
        }
    }
    let status = if factors.iter().any(|c| c.status == ChiStatus::Diverged) {
        ChiStatus::Diverged
    } else if factors.iter().any(|c| c.status == ChiStatus::Partial) {
        ChiStatus::Partial
    } else {
        ChiStatus::Stabilized
    };
    let value = factors.iter().map(|c| c.value).try_fold(1.0, |acc, v| v.map(|x| acc * x));
    Ok(EulerProduct { q_bound, factors, skipped, value, status })
}

/// Random translates for transversal-invariance checks.
pub fn random_shift(ms: usize, n: usize, bound: i64, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..ms).map(|_| (0..n).map(|_| rng.gen_range(-bound..=bound)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{expand_system, FormSystem};
    use crate::linalg::{rat, rat_frac};

    fn qsys(coeffs: &[i64], m: usize) -> MultilinearSystem {
        expand_system(&FormSystem::diagonal_int(FieldDescriptor::rationals(), coeffs, 2).unwrap(), m).unwrap()
    }

    fn prime(p: u64, field: &FieldDescriptor) -> PrimeIdeal {
        factor_prime(p, field).unwrap().remove(0)
    }

    #[test]
    fn gauss_sum_examples() {
        let s = qsys(&[1], 1);
        let k = &s.field;
        let g0 = gauss_sum(&s, &RationalPoint::zero(&s), u128::MAX).unwrap();
        assert_eq!(g0.value(), Complex64::new(1.0, 0.0));
        let half = RationalPoint::new(k, vec![vec![k.from_rational(&rat_frac(1, 2))]]).unwrap();
        assert!(gauss_sum(&s, &half, u128::MAX).unwrap().value().norm() < 1e-12);
        let third = RationalPoint::new(k, vec![vec![k.from_rational(&rat_frac(1, 3))]]).unwrap();
        assert_eq!(third.q_gamma, 3);
        let v = gauss_sum(&s, &third, u128::MAX).unwrap().value();
        assert!((v - Complex64::new(0.0, 3f64.sqrt())).norm() < 1e-12);
    }

    #[test]
    fn gamma_counts_five_squares() {
        let s = qsys(&[1, 1, 1, 1, 1], 1);
        let p3 = prime(3, &s.field);
        assert_eq!(gamma_count_brute(&s, &p3, 1, u128::MAX).unwrap(), 81);
        assert_eq!(gamma_count_brute(&s, &p3, 2, u128::MAX).unwrap(), 6723);
        for j in 1..=3 {
            assert_eq!(
                gamma_count_diagonal(&s, &p3, j, u128::MAX).unwrap(),
                gamma_count_brute(&s, &p3, j, u128::MAX).unwrap()
            );
        }
    }

    #[test]
    fn zero_form_counts_everything() {
        let k = FieldDescriptor::rationals();
        let f = FormSystem::new(k.clone(), 2, 2, vec![crate::poly::KPoly::zero(2)]).unwrap();
        let s = expand_system(&f, 1).unwrap();
        let p = prime(3, &k);
        assert_eq!(gamma_count(&s, &p, 2, u128::MAX).unwrap(), 81);
        let c = chi_p(&s, &p, 6, 1e-6, u128::MAX).unwrap();
        assert_eq!(c.status, ChiStatus::Diverged);
    }

    #[test]
    fn chi_three_for_five_squares() {
        let s = qsys(&[1, 1, 1, 1, 1], 1);
        let c = chi_p(&s, &prime(3, &s.field), 14, 1e-6, DEFAULT_RESIDUE_LIMIT).unwrap();
        assert_eq!(c.a[0], rat(1));
        assert_eq!(c.a[1], rat_frac(6723, 6561));
        assert_eq!(c.status, ChiStatus::Stabilized);
        let limit = (1.0 - 3f64.powi(-4)) / (1.0 - 3f64.powi(-3));
        assert!((c.value.unwrap() - limit).abs() < 1e-5);
    }

    #[test]
    fn gaussian_gamma_paths_agree() {
        let k = FieldDescriptor::gaussian();
        let f = FormSystem::diagonal_int(k.clone(), &[1, 1, 1], 2).unwrap();
        let s = expand_system(&f, 1).unwrap();
        for p in [2u64, 3, 5] {
            for pr in factor_prime(p, &k).unwrap() {
                for j in 1..=2 {
                    let b = gamma_count_brute(&s, &pr, j, 1 << 26);
                    if let Ok(b) = b {
                        assert_eq!(gamma_count_diagonal(&s, &pr, j, u128::MAX).unwrap(), b, "p={p} j={j}");
                    }
                }
            }
        }
    }

    #[test]
    fn series_examples() {
        let s = qsys(&[1], 1);
        let one = singular_series_truncated(&s, 1, None, u128::MAX).unwrap();
        assert_eq!((one.re, one.im), (1.0, 0.0));
        let two = singular_series_truncated(&s, 2, None, u128::MAX).unwrap();
        assert!((two.re - 1.0).abs() < 1e-12 && two.im.abs() < 1e-12);
        let three = singular_series_truncated(&s, 3, None, u128::MAX).unwrap();
        assert!((three.re - 1.0).abs() < 1e-12 && three.im.abs() < 1e-12);
        assert_eq!(three.terms.iter().map(|t| t.points).collect::<Vec<_>>(), vec![1, 1, 2]);
    }

    #[test]
    fn euler_product_empty_range() {
        let s = qsys(&[1, 1, 1], 1);
        let e = euler_product(&s, 1, 4, 1e-6, u128::MAX).unwrap();
        assert_eq!(e.value, Some(1.0));
        assert!(e.factors.is_empty());
    }
}
