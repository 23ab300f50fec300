//! Number fields presented by a monic minimal polynomial and a user-supplied
//! integral basis.
//!
//! Elements are exact rational coordinate vectors over the basis
//! `omega_1..omega_n`. Multiplication goes through an integer multiplication
//! table; floating values come from the ordered complex embeddings (real
//! places first, then one representative per complex pair, then the
//! conjugates).

use std::sync::Arc;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ideals::IdealLattice;
use crate::lattice;
use crate::linalg::{self, format_rational, rat, rat_to_f64, Rat, RatMatrix};
use crate::poly::{KPoly, QPoly};
use crate::roots::{self, Root};

pub const DEFAULT_PRECISION_DIGITS: u32 = 64;

/// An element of K as coordinates over the integral basis.
/// Serializes as a list of exact rational strings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "Vec<String>", try_from = "Vec<String>")]
pub struct AlgebraicNumber {
    pub coords: Vec<Rat>,
}

impl From<AlgebraicNumber> for Vec<String> {
    fn from(a: AlgebraicNumber) -> Self {
        a.to_strings()
    }
}

impl TryFrom<Vec<String>> for AlgebraicNumber {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        Ok(AlgebraicNumber::new(v.iter().map(|s| crate::linalg::parse_rational(s)).collect::<Result<_>>()?))
    }
}

impl AlgebraicNumber {
    pub fn new(coords: Vec<Rat>) -> Self {
        AlgebraicNumber { coords }
    }

    pub fn zero(n: usize) -> Self {
        AlgebraicNumber { coords: vec![Rat::zero(); n] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        AlgebraicNumber { coords: v.iter().map(|&x| rat(x)).collect() }
    }

    /// The basis element `omega_k`.
    pub fn basis(n: usize, k: usize) -> Self {
        let mut a = Self::zero(n);
        a.coords[k] = Rat::one();
        a
    }

    pub fn degree(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coords.iter().all(|c| c.is_integer())
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rat_to_f64).collect()
    }

    pub fn integer_coords(&self) -> Result<Vec<BigInt>> {
        if !self.is_integral() {
            return Err(Error::NonIntegral);
        }
        Ok(self.coords.iter().map(|c| c.to_integer()).collect())
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coords.iter().map(format_rational).collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.coords.iter().zip(&o.coords).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coords.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, q: &Rat) -> Self {
        Self::new(self.coords.iter().map(|a| a * q).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Div,
}

/// Value of the additive character `e(a) = exp(2 pi i Tr a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Character {
    /// `Tr(a) mod 1` in `[0, 1)`.
    pub phase: Rat,
    pub value: Complex64,
}

#[derive(Debug, Clone)]
pub struct FieldDescriptor {
    degree: usize,
    min_poly: Vec<BigInt>,
    basis_matrix: RatMatrix,
    basis_inverse: RatMatrix,
    mult_table: Vec<Vec<Vec<i64>>>,
    mult_flat: Vec<f64>,
    one: AlgebraicNumber,
    trace_vector: Vec<i64>,
    trace_gram: Vec<Vec<i64>>,
    dual_basis: Vec<AlgebraicNumber>,
    roots: Vec<Root>,
    basis_embeddings: Vec<Vec<Complex64>>,
    n1: usize,
    n2: usize,
    disc_field: BigInt,
    index: BigInt,
    precision_digits: u32,
    class_number_one: bool,
}

fn poly_mul_mod(a: &[Rat], b: &[Rat], modulus: &[BigInt]) -> Vec<Rat> {
    let n = modulus.len() - 1;
    let mut prod = vec![Rat::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = std::mem::replace(&mut prod[k], Rat::zero());
        if c.is_zero() {
            continue;
        }
        // theta^k = -sum_{t<n} m_t theta^{k-n+t}
        for t in 0..n {
            prod[k - n + t] -= &c * Rat::from_integer(modulus[t].clone());
        }
    }
    prod.truncate(n);
    prod.resize(n, Rat::zero());
    prod
}

impl FieldDescriptor {
    /// Builds the field from ascending minimal-polynomial coefficients and a
    /// basis given as rows of power-basis coordinates.
    pub fn build(min_poly: &[BigInt], basis_matrix: RatMatrix, precision_digits: u32) -> Result<Self> {
        if min_poly.len() < 2 || !roots::is_monic(min_poly) {
            return Err(Error::NonMonic);
        }
        let n = min_poly.len() - 1;
        if basis_matrix.len() != n || basis_matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch(format!("basis matrix must be {n}x{n}")));
        }
        if n > 1 {
            if !roots::is_squarefree(min_poly) {
                return Err(Error::Reducible("not squarefree".into()));
            }
            if let Some(r) = roots::rational_root(min_poly) {
                return Err(Error::Reducible(format!("rational root {r}")));
            }
        }
        let basis_inverse = linalg::inverse(&basis_matrix).ok_or(Error::SingularBasis)?;

        let to_omega = |power: &[Rat]| -> Vec<Rat> {
            (0..n)
                .map(|i| (0..n).map(|k| &power[k] * &basis_inverse[k][i]).sum())
                .collect()
        };

        let mut mult_table = vec![vec![vec![0i64; n]; n]; n];
        for i in 0..n {
            for j in 0..n {
                let prod = poly_mul_mod(&basis_matrix[i], &basis_matrix[j], min_poly);
                let c = to_omega(&prod);
                for (k, ck) in c.iter().enumerate() {
                    if !ck.is_integer() {
                        return Err(Error::NonRingBasis(format!(
                            "omega_{} * omega_{} has coordinate {} on omega_{}",
                            i + 1,
                            j + 1,
                            format_rational(ck),
                            k + 1
                        )));
                    }
                    mult_table[i][j][k] = ck
                        .to_integer()
                        .to_i64()
                        .ok_or(Error::Overflow("multiplication table"))?;
                }
            }
        }
        // Z[theta] must sit inside the span: rows of the inverse are theta^k in omega coordinates
        if basis_inverse.iter().flatten().any(|x| !x.is_integer()) {
            return Err(Error::NonRingBasis("span does not contain Z[theta]".into()));
        }
        let mut e0 = vec![Rat::zero(); n];
        e0[0] = Rat::one();
        let one = AlgebraicNumber::new(to_omega(&e0));

        let trace_vector: Vec<i64> = (0..n).map(|k| (0..n).map(|i| mult_table[k][i][i]).sum()).collect();
        let trace_gram: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| mult_table[i][j][k] * trace_vector[k]).sum())
                    .collect()
            })
            .collect();
        let gram_q: RatMatrix = trace_gram.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
        let disc_field = linalg::determinant(&gram_q).to_integer();
        let det_b = linalg::determinant(&basis_matrix);
        let index_q = Rat::one() / det_b.abs();
        if !index_q.is_integer() {
            return Err(Error::NonRingBasis("index is not an integer".into()));
        }
        let index = index_q.to_integer();
        let disc_poly = roots::discriminant(min_poly);
        if disc_poly != &index * &index * &disc_field {
            return Err(Error::NonRingBasis("disc(min_poly) != index^2 * disc".into()));
        }
        let gram_inv = linalg::inverse(&gram_q).ok_or(Error::SingularBasis)?;
        let dual_basis: Vec<AlgebraicNumber> = gram_inv.iter().map(|row| AlgebraicNumber::new(row.clone())).collect();

        let raw_roots = if n == 1 {
            let v = -min_poly[0].clone();
            vec![Root {
                value: Complex64::new(v.to_f64().unwrap_or(f64::NAN), 0.0),
                re_digits: format!("{v}.{}", "0".repeat(precision_digits as usize)),
                im_digits: format!("0.{}", "0".repeat(precision_digits as usize)),
            }]
        } else {
            roots::isolate_roots(min_poly, precision_digits.max(16))?
        };
        let (ordered, n1, n2) = order_roots(raw_roots)?;
        let basis_embeddings: Vec<Vec<Complex64>> = ordered
            .iter()
            .map(|r| {
                (0..n)
                    .map(|k| {
                        let mut acc = Complex64::new(0.0, 0.0);
                        let mut pw = Complex64::new(1.0, 0.0);
                        for t in 0..n {
                            acc += pw * rat_to_f64(&basis_matrix[k][t]);
                            pw *= r.value;
                        }
                        acc
                    })
                    .collect()
            })
            .collect();
        let mult_flat = mult_table
            .iter()
            .flat_map(|a| a.iter().flat_map(|b| b.iter().map(|&x| x as f64)))
            .collect();
        Ok(FieldDescriptor {
            degree: n,
            min_poly: min_poly.to_vec(),
            basis_matrix,
            basis_inverse,
            mult_table,
            mult_flat,
            one,
            trace_vector,
            trace_gram,
            dual_basis,
            roots: ordered,
            basis_embeddings,
            n1,
            n2,
            disc_field,
            index,
            precision_digits,
            class_number_one: false,
        })
    }

    pub fn with_class_number_one(mut self, flag: bool) -> Self {
        self.class_number_one = flag;
        self
    }

    /// The power basis `1, theta, ..., theta^{n-1}`.
    pub fn power_basis(n: usize) -> RatMatrix {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }).collect())
            .collect()
    }

    /// Q with basis {1}; class number one.
    pub fn rationals() -> Arc<Self> {
        let f = Self::build(&[BigInt::zero(), BigInt::one()], Self::power_basis(1), DEFAULT_PRECISION_DIGITS)
            .expect("Q is a valid field");
        Arc::new(f.with_class_number_one(true))
    }

    /// Q(i) with basis {1, i}; class number one.
    pub fn gaussian() -> Arc<Self> {
        let f = Self::build(&[BigInt::one(), BigInt::zero(), BigInt::one()], Self::power_basis(2), DEFAULT_PRECISION_DIGITS)
            .expect("Q(i) is a valid field");
        Arc::new(f.with_class_number_one(true))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }
    pub fn basis_matrix(&self) -> &RatMatrix {
        &self.basis_matrix
    }
    pub fn mult_table(&self) -> &Vec<Vec<Vec<i64>>> {
        &self.mult_table
    }
    pub fn trace_vector(&self) -> &[i64] {
        &self.trace_vector
    }
    /// `G[i][j] = Tr(omega_i omega_j)`.
    pub fn trace_gram(&self) -> &Vec<Vec<i64>> {
        &self.trace_gram
    }
    pub fn dual_basis(&self) -> &[AlgebraicNumber] {
        &self.dual_basis
    }
    pub fn roots(&self) -> &[Root] {
        &self.roots
    }
    /// `basis_embeddings()[l][k]` is the image of `omega_k` under the `l`-th embedding.
    pub fn basis_embeddings(&self) -> &Vec<Vec<Complex64>> {
        &self.basis_embeddings
    }
    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    /// Number of infinite places.
    pub fn places(&self) -> usize {
        self.n1 + self.n2
    }
    pub fn disc_field(&self) -> &BigInt {
        &self.disc_field
    }
    pub fn index(&self) -> &BigInt {
        &self.index
    }
    pub fn precision_digits(&self) -> u32 {
        self.precision_digits
    }
    pub fn class_number_one(&self) -> bool {
        self.class_number_one
    }
    pub fn is_totally_imaginary(&self) -> bool {
        self.n1 == 0
    }

    pub fn one(&self) -> AlgebraicNumber {
        self.one.clone()
    }

    pub fn zero(&self) -> AlgebraicNumber {
        AlgebraicNumber::zero(self.degree)
    }

    pub fn from_rational(&self, q: &Rat) -> AlgebraicNumber {
        self.one.scale(q)
    }

    /// `theta^k` in basis coordinates.
    pub fn theta_power(&self, k: usize) -> AlgebraicNumber {
        if k < self.degree {
            return AlgebraicNumber::new(self.basis_inverse[k].clone());
        }
        let theta = if self.degree > 1 {
            AlgebraicNumber::new(self.basis_inverse[1].clone())
        } else {
            self.from_rational(&Rat::from_integer(-self.min_poly[0].clone()))
        };
        self.mul(&self.theta_power(k - 1), &theta)
    }

    /// Element with the given power-basis coordinates.
    pub fn from_power_coords(&self, power: &[Rat]) -> AlgebraicNumber {
        let n = self.degree;
        AlgebraicNumber::new(
            (0..n)
                .map(|i| (0..n).filter(|&k| k < power.len()).map(|k| &power[k] * &self.basis_inverse[k][i]).sum())
                .collect(),
        )
    }

    pub fn mul(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> AlgebraicNumber {
        let n = self.degree;
        let mut out = vec![Rat::zero(); n];
        for i in 0..n {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b.coords[j].is_zero() {
                    continue;
                }
                let ab = &a.coords[i] * &b.coords[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let t = self.mult_table[i][j][k];
                    if t != 0 {
                        *o += &ab * rat(t);
                    }
                }
            }
        }
        AlgebraicNumber::new(out)
    }

    /// Matrix of multiplication by `a`: column `i` holds the coordinates of `a * omega_i`.
    pub fn mult_matrix(&self, a: &AlgebraicNumber) -> RatMatrix {
        let n = self.degree;
        (0..n)
            .map(|k| {
                (0..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&j| self.mult_table[j][i][k] != 0)
                            .map(|j| &a.coords[j] * rat(self.mult_table[j][i][k]))
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn inv(&self, a: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let m = self.mult_matrix(a);
        linalg::solve(&m, &self.one.coords)
            .map(AlgebraicNumber::new)
            .ok_or(Error::DivisionByZero)
    }

    pub fn div(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> Result<AlgebraicNumber> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    pub fn pow(&self, a: &AlgebraicNumber, e: u32) -> AlgebraicNumber {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, a);
        }
        acc
    }

    pub fn arith(&self, op: ArithOp, a: &AlgebraicNumber, b: Option<&AlgebraicNumber>) -> Result<AlgebraicNumber> {
        let need_b = || b.ok_or_else(|| Error::InvalidArgument(format!("{op:?} needs two operands")));
        match op {
            ArithOp::Add => Ok(a.add(need_b()?)),
            ArithOp::Sub => Ok(a.sub(need_b()?)),
            ArithOp::Mul => Ok(self.mul(a, need_b()?)),
            ArithOp::Inv => self.inv(a),
            ArithOp::Div => self.div(a, need_b()?),
        }
    }

    pub fn trace(&self, a: &AlgebraicNumber) -> Rat {
        a.coords
            .iter()
            .zip(&self.trace_vector)
            .map(|(c, &t)| c * rat(t))
            .sum()
    }

    pub fn norm(&self, a: &AlgebraicNumber) -> Rat {
        linalg::determinant(&self.mult_matrix(a))
    }

    /// `Tr(a b)` through the trace form.
    pub fn trace_pairing(&self, a: &AlgebraicNumber, b: &AlgebraicNumber) -> Rat {
        let n = self.degree;
        let mut acc = Rat::zero();
        for i in 0..n {
            if a.coords[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if self.trace_gram[i][j] != 0 {
                    acc += &a.coords[i] * &b.coords[j] * rat(self.trace_gram[i][j]);
                }
            }
        }
        acc
    }

    /// The standard height: largest absolute coordinate.
    pub fn height(&self, a: &AlgebraicNumber) -> Rat {
        linalg::max_abs(&a.coords)
    }

    /// `C` with `height(xy) <= C height(x) height(y)`, read off the multiplication table.
    pub fn height_constant(&self) -> i64 {
        let n = self.degree;
        (0..n)
            .map(|k| {
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .map(|(i, j)| self.mult_table[i][j][k].abs())
                    .sum::<i64>()
            })
            .max()
            .unwrap_or(0)
    }

    pub fn char_e(&self, a: &AlgebraicNumber) -> Character {
        let t = self.trace(a);
        let phase = &t - t.floor();
        let x = 2.0 * std::f64::consts::PI * rat_to_f64(&phase);
        Character { value: Complex64::new(x.cos(), x.sin()), phase }
    }

    /// Image of `a` under embedding `l` (embedding order: real, complex reps, conjugates).
    pub fn embed(&self, a: &AlgebraicNumber, l: usize) -> Complex64 {
        self.embed_coords(&a.to_f64(), l)
    }

    pub fn embed_coords(&self, coords: &[f64], l: usize) -> Complex64 {
        self.basis_embeddings[l]
            .iter()
            .zip(coords)
            .map(|(w, &c)| w * c)
            .sum()
    }

    /// Trace computed from the embeddings.
    pub fn trace_embedded(&self, coords: &[f64]) -> f64 {
        let mut t = 0.0;
        for l in 0..self.n1 {
            t += self.embed_coords(coords, l).re;
        }
        for l in self.n1..self.n1 + self.n2 {
            t += 2.0 * self.embed_coords(coords, l).re;
        }
        t
    }

    /// Norm computed from the embeddings.
    pub fn norm_embedded(&self, coords: &[f64]) -> f64 {
        let mut v = 1.0;
        for l in 0..self.n1 {
            v *= self.embed_coords(coords, l).re;
        }
        for l in self.n1..self.n1 + self.n2 {
            v *= self.embed_coords(coords, l).norm_sqr();
        }
        v
    }

    /// Product in `V = K (x) R` on floating coordinates.
    pub fn mul_v(&self, a: &[f64], b: &[f64]) -> Vec<f64> {
        let n = self.degree;
        let mut out = vec![0.0; n];
        for i in 0..n {
            if a[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += ab * self.mult_flat[base + k];
                }
            }
        }
        out
    }

    /// Trace on `V` through the integer trace vector.
    pub fn trace_v(&self, a: &[f64]) -> f64 {
        a.iter().zip(&self.trace_vector).map(|(x, &t)| x * t as f64).sum()
    }

    /// The ideal `{b in O_K : ab in O_K}` of a single element.
    pub fn denominator_ideal(&self, a: &AlgebraicNumber) -> Result<IdealLattice> {
        self.denominator_ideal_vec(std::slice::from_ref(a))
    }

    /// Intersection of the denominator ideals of the components.
    pub fn denominator_ideal_vec(&self, v: &[AlgebraicNumber]) -> Result<IdealLattice> {
        let n = self.degree;
        let identity: RatMatrix = Self::power_basis(n);
        let mut bases = vec![identity];
        for a in v {
            if a.is_integral() {
                continue;
            }
            // a^{-1} O_K has basis columns a^{-1} omega_i
            let inv = self.inv(a)?;
            bases.push(self.mult_matrix(&inv));
        }
        let m = lattice::intersect(&bases, n)?;
        let ints: Vec<Vec<BigInt>> = m
            .iter()
            .map(|r| r.iter().map(|x| x.to_integer()).collect())
            .collect();
        IdealLattice::from_hnf_unchecked(lattice::to_i64_matrix(&ints)?)
    }

    /// Component `l` of `a` isolated through the trace-dual basis: `Tr(omega'_l a)`.
    pub fn dual_component(&self, a: &AlgebraicNumber, l: usize) -> Rat {
        self.trace_pairing(&self.dual_basis[l], a)
    }

    /// Real coordinate polynomials of a polynomial over K: writing each
    /// variable as `x_v = sum_k xhat_{v,k} omega_k`, component `l` is
    /// `Tr(omega'_l F(x))`, a polynomial in the `n * nvars` real coordinates
    /// (variable `v * n + k`).
    pub fn real_components(&self, f: &KPoly) -> Vec<QPoly> {
        let expanded = crate::poly::real_expand(self, f);
        (0..self.degree)
            .map(|l| expanded.map_coeffs(|c| self.dual_component(c, l)))
            .collect()
    }

    pub fn summary(&self) -> FieldSummary {
        FieldSummary {
            degree: self.degree,
            min_poly: self.min_poly.iter().map(|c| c.to_string()).collect(),
            basis: self
                .basis_matrix
                .iter()
                .map(|r| r.iter().map(format_rational).collect())
                .collect(),
            mult_table: self.mult_table.clone(),
            n1: self.n1,
            n2: self.n2,
            disc_field: self.disc_field.to_string(),
            index: self.index.to_string(),
            precision_digits: self.precision_digits,
            class_number_one: self.class_number_one,
            embeddings: self
                .roots
                .iter()
                .map(|r| [r.re_digits.clone(), r.im_digits.clone()])
                .collect(),
        }
    }
}

/// Serializable snapshot of a field for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSummary {
    pub degree: usize,
    pub min_poly: Vec<String>,
    pub basis: Vec<Vec<String>>,
    pub mult_table: Vec<Vec<Vec<i64>>>,
    pub n1: usize,
    pub n2: usize,
    pub disc_field: String,
    pub index: String,
    pub precision_digits: u32,
    pub class_number_one: bool,
    /// Root of the minimal polynomial at each embedding, as (re, im) decimal strings.
    pub embeddings: Vec<[String; 2]>,
}

fn order_roots(raw: Vec<Root>) -> Result<(Vec<Root>, usize, usize)> {
    let (mut real, complex): (Vec<Root>, Vec<Root>) = raw.into_iter().partition(|r| r.value.im == 0.0);
    real.sort_by(|a, b| a.value.re.total_cmp(&b.value.re));
    let mut upper: Vec<Root> = complex.iter().filter(|r| r.value.im > 0.0).cloned().collect();
    let lower: Vec<Root> = complex.iter().filter(|r| r.value.im < 0.0).cloned().collect();
    if upper.len() != lower.len() {
        return Err(Error::PrecisionFailure("complex roots do not pair up".into()));
    }
    upper.sort_by(|a, b| a.value.re.total_cmp(&b.value.re).then(a.value.im.total_cmp(&b.value.im)));
    let mut conj = Vec::with_capacity(upper.len());
    for u in &upper {
        let partner = lower
            .iter()
            .min_by(|a, b| {
                (a.value - u.value.conj())
                    .norm()
                    .total_cmp(&(b.value - u.value.conj()).norm())
            })
            .unwrap();
        if (partner.value - u.value.conj()).norm() > 1e-8 * (1.0 + u.value.norm()) {
            return Err(Error::PrecisionFailure("conjugate root not found".into()));
        }
        conj.push(partner.clone());
    }
    let n1 = real.len();
    let n2 = upper.len();
    let mut out = real;
    out.extend(upper);
    out.extend(conj);
    Ok((out, n1, n2))
}

/// Reduces every coordinate into `[0, 1)`.
pub fn reduce_mod_one(a: &AlgebraicNumber) -> AlgebraicNumber {
    AlgebraicNumber::new(a.coords.iter().map(|c| c - c.floor()).collect())
}

/// Greatest common divisor helper used for rational denominators.
pub fn lcm_of_denominators(a: &[AlgebraicNumber]) -> BigInt {
    a.iter()
        .flat_map(|x| x.coords.iter())
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}
