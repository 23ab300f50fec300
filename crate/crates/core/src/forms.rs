//! Forms over K, polarization, the index set J and the expanded system
//! of blocks `Phi_j = A(j) Phi(x_{j_1}, ..., x_{j_d})` in `m*s` variables.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{AlgebraicNumber, FieldDescriptor};
use crate::linalg::{rat, Rat};
use crate::poly::{Exponents, KPoly};

/// `R` forms of common degree `d` in `s` variables over K.
#[derive(Debug, Clone)]
pub struct FormSystem {
    pub field: Arc<FieldDescriptor>,
    pub d: usize,
    pub s: usize,
    pub forms: Vec<KPoly>,
}

impl FormSystem {
    pub fn new(field: Arc<FieldDescriptor>, s: usize, d: usize, forms: Vec<KPoly>) -> Result<Self> {
        if forms.is_empty() {
            return Err(Error::InvalidForm("at least one form is required".into()));
        }
        if d < 2 {
            return Err(Error::InvalidForm(format!("degree must be at least 2, got {d}")));
        }
        if s == 0 {
            return Err(Error::InvalidForm("at least one variable is required".into()));
        }
        for (rho, f) in forms.iter().enumerate() {
            if f.nvars != s {
                return Err(Error::InvalidForm(format!("form {} has {} variables, expected {s}", rho + 1, f.nvars)));
            }
            for (e, c) in &f.terms {
                let deg: usize = e.iter().map(|&k| k as usize).sum();
                if deg != d {
                    return Err(Error::InvalidForm(format!(
                        "form {} has a monomial of degree {deg}, expected {d}",
                        rho + 1
                    )));
                }
                if c.degree() != field.degree() {
                    return Err(Error::DimensionMismatch("coefficient length differs from field degree".into()));
                }
            }
        }
        Ok(FormSystem { field, d, s, forms })
    }

    /// Single diagonal form `sum_i c_i x_i^d`.
    pub fn diagonal(field: Arc<FieldDescriptor>, coeffs: &[AlgebraicNumber], d: usize) -> Result<Self> {
        let s = coeffs.len();
        let mut f = KPoly::zero(s);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0u16; s];
            e[i] = d as u16;
            f.add_term(e, c.clone());
        }
        Self::new(field, s, d, vec![f])
    }

    /// Diagonal form with rational integer coefficients.
    pub fn diagonal_int(field: Arc<FieldDescriptor>, coeffs: &[i64], d: usize) -> Result<Self> {
        let c: Vec<AlgebraicNumber> = coeffs.iter().map(|&x| field.from_rational(&rat(x))).collect();
        Self::diagonal(field, &c, d)
    }

    pub fn big_r(&self) -> usize {
        self.forms.len()
    }

    /// `Some(c)` when the system is a single form `sum_i c_i x_i^d`.
    pub fn diagonal_coeffs(&self) -> Option<Vec<AlgebraicNumber>> {
        if self.forms.len() != 1 {
            return None;
        }
        let mut c = vec![self.field.zero(); self.s];
        for (e, a) in &self.forms[0].terms {
            let nz: Vec<usize> = (0..self.s).filter(|&i| e[i] > 0).collect();
            if nz.len() != 1 {
                return None;
            }
            c[nz[0]] = a.clone();
        }
        Some(c)
    }

    pub fn eval(&self, rho: usize, x: &[AlgebraicNumber]) -> AlgebraicNumber {
        self.forms[rho].eval(&self.field, x)
    }

    /// Coefficients, in the t-monomials, of `F^(rho)(t_1 x_1 + ... + t_m x_m)` for a point
    /// `xbar` of `m*s` K-elements (variable `k*s + i`).
    pub fn parametric_coeffs(&self, rho: usize, m: usize, xbar: &[AlgebraicNumber]) -> BTreeMap<Exponents, AlgebraicNumber> {
        let field = &self.field;
        let linear: Vec<KPoly> = (0..self.s)
            .map(|i| {
                let mut p = KPoly::zero(m);
                for k in 0..m {
                    let mut e = vec![0; m];
                    e[k] = 1;
                    p.add_term(e, xbar[k * self.s + i].clone());
                }
                p
            })
            .collect();
        self.forms[rho].substitute(field, &linear).terms
    }
}

/// Symmetric d-linear form stored on sorted index tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor {
    pub d: usize,
    pub s: usize,
    pub entries: BTreeMap<Vec<usize>, AlgebraicNumber>,
}

/// Distinct orderings of a sorted multiset.
pub fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = sorted.to_vec();
    let mut out = vec![cur.clone()];
    loop {
        let n = cur.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
}

fn factorial(k: usize) -> u64 {
    (1..=k as u64).product()
}

/// `d! / prod_v mult(v)!` for a sorted tuple.
pub fn multinomial(sorted: &[usize]) -> u64 {
    let mut denom = 1u64;
    let mut run = 1;
    for w in 1..=sorted.len() {
        if w < sorted.len() && sorted[w] == sorted[w - 1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    factorial(sorted.len()) / denom
}

impl SymTensor {
    pub fn eval(&self, field: &FieldDescriptor, args: &[&[AlgebraicNumber]]) -> AlgebraicNumber {
        let mut acc = field.zero();
        for (idx, c) in &self.entries {
            for perm in distinct_permutations(idx) {
                let mut t = c.clone();
                for (k, &i) in perm.iter().enumerate() {
                    t = field.mul(&t, &args[k][i]);
                }
                acc = acc.add(&t);
            }
        }
        acc
    }

    /// The form `A * Phi(x_{j_1}, ..., x_{j_d})` in `m*s` variables.
    pub fn block_poly(&self, j: &[usize], m: usize, scale: u64) -> KPoly {
        let nv = m * self.s;
        let mut out = KPoly::zero(nv);
        let a = rat(scale as i64);
        for (idx, c) in &self.entries {
            let c = c.scale(&a);
            for perm in distinct_permutations(idx) {
                let mut e = vec![0u16; nv];
                for (k, &i) in perm.iter().enumerate() {
                    e[j[k] * self.s + i] += 1;
                }
                out.add_term(e, c.clone());
            }
        }
        out
    }
}

/// Polarization by inclusion-exclusion:
/// `Phi(y_1..y_d) = (1/d!) sum_{S} (-1)^{d-|S|} F(sum_{k in S} y_k)`.
pub fn polarize(field: &FieldDescriptor, f: &KPoly, d: usize) -> SymTensor {
    let s = f.nvars;
    let nv = d * s;
    let mut total = KPoly::zero(nv);
    for mask in 1u32..(1 << d) {
        let images: Vec<KPoly> = (0..s)
            .map(|i| {
                let mut p = KPoly::zero(nv);
                for k in 0..d {
                    if mask & (1 << k) != 0 {
                        let mut e = vec![0; nv];
                        e[k * s + i] = 1;
                        p.add_term(e, field.one());
                    }
                }
                p
            })
            .collect();
        let g = f.substitute(field, &images);
        let sign = if (d - mask.count_ones() as usize).is_multiple_of(2) { 1 } else { -1 };
        total = total.add(&g.scale_rat(&rat(sign)));
    }
    let total = total.scale_rat(&Rat::new(BigInt::one(), BigInt::from(factorial(d))));
    let mut entries = BTreeMap::new();
    for (e, c) in &total.terms {
        let mut idx = Vec::with_capacity(d);
        for k in 0..d {
            let slot: Vec<usize> = (0..s).filter(|&i| e[k * s + i] > 0).collect();
            debug_assert_eq!(slot.len(), 1);
            idx.push(slot[0]);
        }
        if idx.windows(2).all(|w| w[0] <= w[1]) {
            entries.insert(idx, c.clone());
        }
    }
    SymTensor { d, s, entries }
}

/// Multisets of size `d` over `0..m` in lexicographic order with `A(j) = d!/prod mult!`.
pub fn index_set(m: usize, d: usize) -> (Vec<Vec<usize>>, Vec<u64>) {
    let mut out = Vec::new();
    let mut cur = vec![0usize; d];
    loop {
        out.push(cur.clone());
        let Some(k) = (0..d).rev().find(|&k| cur[k] + 1 < m) else {
            break;
        };
        let v = cur[k] + 1;
        for x in cur[k..].iter_mut() {
            *x = v;
        }
    }
    let a = out.iter().map(|j| multinomial(j)).collect();
    (out, a)
}

/// The expanded system of blocks.
#[derive(Debug, Clone)]
pub struct MultilinearSystem {
    pub field: Arc<FieldDescriptor>,
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub j_set: Vec<Vec<usize>>,
    pub a_coef: Vec<u64>,
    pub phi: Vec<SymTensor>,
    /// `blocks[rho][j]`, polynomials in `m*s` variables (variable `k*s + i`).
    pub blocks: Vec<Vec<KPoly>>,
    pub forms: FormSystem,
}

pub fn expand_system(sys: &FormSystem, m: usize) -> Result<MultilinearSystem> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let field = sys.field.clone();
    let (j_set, a_coef) = index_set(m, sys.d);
    let phi: Vec<SymTensor> = sys.forms.iter().map(|f| polarize(&field, f, sys.d)).collect();
    let blocks = phi
        .iter()
        .map(|t| j_set.iter().zip(&a_coef).map(|(j, &a)| t.block_poly(j, m, a)).collect())
        .collect();
    Ok(MultilinearSystem { field, d: sys.d, s: sys.s, m, j_set, a_coef, phi, blocks, forms: sys.clone() })
}

impl MultilinearSystem {
    pub fn big_r(&self) -> usize {
        self.phi.len()
    }

    pub fn r(&self) -> usize {
        self.j_set.len()
    }

    pub fn n(&self) -> usize {
        self.field.degree()
    }

    /// Number of K-variables `m*s`.
    pub fn ms(&self) -> usize {
        self.m * self.s
    }

    /// Number of real coordinates `n*m*s`.
    pub fn nms(&self) -> usize {
        self.n() * self.ms()
    }

    /// Flattened blocks in `(rho, j)` order.
    pub fn all_blocks(&self) -> impl Iterator<Item = &KPoly> {
        self.blocks.iter().flatten()
    }

    pub fn eval_blocks(&self, xbar: &[AlgebraicNumber]) -> Vec<AlgebraicNumber> {
        self.all_blocks().map(|b| b.eval(&self.field, xbar)).collect()
    }

    fn check_alpha<T>(&self, alpha: &[Vec<T>]) -> Result<()> {
        if alpha.len() != self.big_r() || alpha.iter().any(|row| row.len() != self.r()) {
            return Err(Error::DimensionMismatch(format!(
                "alpha must be {} x {}",
                self.big_r(),
                self.r()
            )));
        }
        Ok(())
    }

    /// `FF(xbar; alpha) = sum_{rho, j} alpha_j^rho Phi_j^rho(xbar)` exactly.
    pub fn eval_ff(&self, xbar: &[AlgebraicNumber], alpha: &[Vec<AlgebraicNumber>]) -> Result<AlgebraicNumber> {
        self.check_alpha(alpha)?;
        if xbar.len() != self.ms() {
            return Err(Error::DimensionMismatch(format!("expected {} variables", self.ms())));
        }
        let mut acc = self.field.zero();
        for (rho, row) in alpha.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                let v = self.blocks[rho][j].eval(&self.field, xbar);
                acc = acc.add(&self.field.mul(a, &v));
            }
        }
        Ok(acc)
    }

    /// `FF` with `alpha` in `V = K (x) R`, given as floating basis coordinates.
    pub fn eval_ff_v(&self, xbar: &[AlgebraicNumber], alpha: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
        self.check_alpha(alpha)?;
        let mut acc = vec![0.0; self.n()];
        for (rho, row) in alpha.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                let v = self.blocks[rho][j].eval(&self.field, xbar).to_f64();
                for (x, y) in acc.iter_mut().zip(self.field.mul_v(a, &v)) {
                    *x += y;
                }
            }
        }
        Ok(acc)
    }

    /// `FF(.; alpha)` as a polynomial in `m*s` variables.
    pub fn ff_poly(&self, alpha: &[Vec<AlgebraicNumber>]) -> Result<KPoly> {
        self.check_alpha(alpha)?;
        let mut acc = KPoly::zero(self.ms());
        for (rho, row) in alpha.iter().enumerate() {
            for (j, a) in row.iter().enumerate() {
                acc = acc.add(&self.blocks[rho][j].scale(&self.field, a));
            }
        }
        Ok(acc)
    }

    /// `B[i][l][rho] = Tr(omega_l Phi^(rho)(e_i, H))`, so that
    /// `Tr Phi^(rho)(x, H) = sum_{i,l} xhat_{i,l} B[i][l][rho]`.
    pub fn multilinear_coeffs(&self, h: &[Vec<AlgebraicNumber>]) -> Result<Vec<Vec<Vec<Rat>>>> {
        if h.len() + 1 != self.d || h.iter().any(|v| v.len() != self.s) {
            return Err(Error::DimensionMismatch(format!("H must hold {} vectors of length {}", self.d - 1, self.s)));
        }
        let n = self.n();
        let field = &self.field;
        let mut out = vec![vec![vec![Rat::zero(); self.big_r()]; n]; self.s];
        for i in 0..self.s {
            let mut e_i = vec![field.zero(); self.s];
            e_i[i] = field.one();
            let mut args: Vec<&[AlgebraicNumber]> = vec![&e_i];
            args.extend(h.iter().map(|v| v.as_slice()));
            for (rho, t) in self.phi.iter().enumerate() {
                let val = t.eval(field, &args);
                for (l, row) in out[i].iter_mut().enumerate() {
                    row[rho] = field.trace(&field.mul(&AlgebraicNumber::basis(n, l), &val));
                }
            }
        }
        Ok(out)
    }
}

/// `Delta_{i,h} G(xbar) = G(x_1, ..., x_i + h, ..., x_m) - G(xbar)` for `G` in `m*s` variables.
pub fn difference(field: &FieldDescriptor, g: &KPoly, s: usize, slot: usize, h: &[AlgebraicNumber]) -> Result<KPoly> {
    let nv = g.nvars;
    if s == 0 || !nv.is_multiple_of(s) || slot >= nv / s || h.len() != s {
        return Err(Error::DimensionMismatch("difference slot or shift length".into()));
    }
    let images: Vec<KPoly> = (0..nv)
        .map(|v| {
            let mut p = KPoly::var(field, v, nv);
            if v / s == slot {
                p = p.add(&KPoly::constant(h[v % s].clone(), nv));
            }
            p
        })
        .collect();
    Ok(g.substitute(field, &images).sub(g))
}

/// Summary of sampled Jacobian ranks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub samples: usize,
    /// Smallest `R - rank` over random points.
    pub min_corank_random: usize,
    /// Nonzero zeros of the system found by the search.
    pub zeros_found: usize,
    /// Smallest `R - rank` over the zeros found, if any.
    pub min_corank_on_variety: Option<usize>,
}

fn rank_over_k(field: &FieldDescriptor, mut rows: Vec<Vec<AlgebraicNumber>>) -> usize {
    let ncols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = field.inv(&rows[rank][c]).expect("pivot is nonzero");
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = field.mul(&rows[i][c], &inv);
                for k in c..ncols {
                    let t = field.mul(&f, &rows[rank][k]);
                    rows[i][k] = rows[i][k].sub(&t);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn jacobian_corank(sys: &FormSystem, x: &[AlgebraicNumber]) -> usize {
    let rows: Vec<Vec<AlgebraicNumber>> = sys
        .forms
        .iter()
        .map(|f| (0..sys.s).map(|i| f.derivative(i).eval(&sys.field, x)).collect())
        .collect();
    sys.big_r() - rank_over_k(&sys.field, rows)
}

/// Samples the `R x s` Jacobian at random integral points and at nonzero zeros
/// found in the box of the given height. Reports observed coranks only.
pub fn jacobian_probe(sys: &FormSystem, samples: usize, height: i64, seed: u64) -> JacobianReport {
    let n = sys.field.degree();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let random_point = |rng: &mut ChaCha8Rng, h: i64| -> Vec<AlgebraicNumber> {
        (0..sys.s)
            .map(|_| AlgebraicNumber::from_ints(&(0..n).map(|_| rng.gen_range(-h..=h)).collect::<Vec<_>>()))
            .collect()
    };
    let mut min_random = sys.big_r();
    for _ in 0..samples {
        let x = random_point(&mut rng, 1000);
        min_random = min_random.min(jacobian_corank(sys, &x));
    }
    let mut zeros = 0;
    let mut min_var: Option<usize> = None;
    let coords = n * sys.s;
    let side = (2 * height + 1) as u128;
    let total = side.checked_pow(coords as u32).unwrap_or(u128::MAX);
    let mut check = |x: Vec<AlgebraicNumber>| {
        if x.iter().all(|a| a.is_zero()) {
            return;
        }
        if (0..sys.big_r()).all(|rho| sys.eval(rho, &x).is_zero()) {
            zeros += 1;
            let c = jacobian_corank(sys, &x);
            min_var = Some(min_var.map_or(c, |v: usize| v.min(c)));
        }
    };
    if total <= samples.max(1) as u128 * 64 {
        for idx in 0..total {
            let mut t = idx;
            let mut flat = Vec::with_capacity(coords);
            for _ in 0..coords {
                flat.push((t % side) as i64 - height);
                t /= side;
            }
            check(flat.chunks(n).map(AlgebraicNumber::from_ints).collect());
        }
    } else {
        for _ in 0..samples * 64 {
            let x = random_point(&mut rng, height);
            check(x);
        }
    }
    JacobianReport { samples, min_corank_random: min_random, zeros_found: zeros, min_corank_on_variety: min_var }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat_frac;

    fn q() -> Arc<FieldDescriptor> {
        FieldDescriptor::rationals()
    }

    fn mono(field: &FieldDescriptor, e: &[u16], c: i64) -> KPoly {
        KPoly::monomial(e.to_vec(), field.from_rational(&rat(c)))
    }

    #[test]
    fn polarization_examples() {
        let k = q();
        let t = polarize(&k, &mono(&k, &[1, 1], 1), 2);
        assert_eq!(t.entries.len(), 1);
        assert_eq!(t.entries[&vec![0, 1]], k.from_rational(&rat_frac(1, 2)));
        let t = polarize(&k, &mono(&k, &[3], 1), 3);
        assert_eq!(t.entries[&vec![0, 0, 0]], k.one());
        let t = polarize(&k, &mono(&k, &[2, 1], 1), 3);
        assert_eq!(t.entries[&vec![0, 0, 1]], k.from_rational(&rat_frac(1, 3)));
        // Phi(a,b,c) = (a1 b1 c2 + a1 b2 c1 + a2 b1 c1)/3
        let a = [k.from_rational(&rat(2)), k.from_rational(&rat(3))];
        let b = [k.from_rational(&rat(5)), k.from_rational(&rat(7))];
        let c = [k.from_rational(&rat(11)), k.from_rational(&rat(13))];
        let v = t.eval(&k, &[&a, &b, &c]);
        assert_eq!(v, k.from_rational(&rat_frac(2 * 5 * 13 + 2 * 7 * 11 + 3 * 5 * 11, 3)));
    }

    #[test]
    fn index_sets() {
        let (j, a) = index_set(2, 2);
        assert_eq!(j, vec![vec![0, 0], vec![0, 1], vec![1, 1]]);
        assert_eq!(a, vec![1, 2, 1]);
        let (j, a) = index_set(1, 4);
        assert_eq!((j.len(), a), (1, vec![1]));
        assert_eq!(index_set(3, 2).0.len(), 6);
        for m in 1..=6 {
            for d in 2..=5 {
                let (j, a) = index_set(m, d);
                assert_eq!(j.len() as u64, crate::bounds::binomial_u64((d - 1 + m) as u64, d as u64));
                assert_eq!(a.iter().sum::<u64>(), (m as u64).pow(d as u32));
            }
        }
    }

    #[test]
    fn expansion_of_square() {
        let k = q();
        let sys = FormSystem::new(k.clone(), 1, 2, vec![mono(&k, &[2], 1)]).unwrap();
        let ms = expand_system(&sys, 2).unwrap();
        assert_eq!(ms.blocks[0][0], mono(&k, &[2, 0], 1));
        assert_eq!(ms.blocks[0][1], mono(&k, &[1, 1], 2));
        assert_eq!(ms.blocks[0][2], mono(&k, &[0, 2], 1));
        let one = expand_system(&sys, 1).unwrap();
        assert_eq!(one.blocks[0][0], sys.forms[0]);
        let xy = FormSystem::new(k.clone(), 2, 2, vec![mono(&k, &[1, 1], 1)]).unwrap();
        let ms = expand_system(&xy, 2).unwrap();
        assert_eq!(ms.blocks[0][1], mono(&k, &[1, 0, 0, 1], 1).add(&mono(&k, &[0, 1, 1, 0], 1)));
    }

    #[test]
    fn differencing() {
        let k = q();
        let x2 = mono(&k, &[2], 1);
        let h = [k.from_rational(&rat(3))];
        let d = difference(&k, &x2, 1, 0, &h).unwrap();
        assert_eq!(d, mono(&k, &[1], 6).add(&mono(&k, &[0], 9)));
        let c = mono(&k, &[0], 4);
        assert!(difference(&k, &c, 1, 0, &h).unwrap().is_zero());
    }

    #[test]
    fn gradient_coefficients() {
        let k = FieldDescriptor::gaussian();
        let sys = FormSystem::diagonal_int(k.clone(), &[1, 1], 2).unwrap();
        let ms = expand_system(&sys, 1).unwrap();
        let h = vec![vec![AlgebraicNumber::from_ints(&[3, -2]), AlgebraicNumber::from_ints(&[0, 5])]];
        let b = ms.multilinear_coeffs(&h).unwrap();
        // Tr(omega_l h_i): Tr(h) = 2 Re h, Tr(i h) = -2 Im h
        assert_eq!(b[0][0][0], rat(6));
        assert_eq!(b[0][1][0], rat(4));
        assert_eq!(b[1][1][0], rat(-10));
        let zero = vec![vec![k.zero(), k.zero()]];
        assert!(ms.multilinear_coeffs(&zero).unwrap().iter().flatten().flatten().all(|x| x.is_zero()));
    }

    #[test]
    fn probes() {
        let k = q();
        let sys = FormSystem::diagonal_int(k.clone(), &[1, 1, 1], 2).unwrap();
        assert_eq!(jacobian_probe(&sys, 20, 2, 1).min_corank_random, 0);
        let sq = FormSystem::new(k.clone(), 2, 2, vec![mono(&k, &[2, 0], 1)]).unwrap();
        let rep = jacobian_probe(&sq, 20, 2, 1);
        assert_eq!(rep.min_corank_on_variety, Some(1));
        assert_eq!(rep.zeros_found, 4);
    }
}
