//! Sparse multivariate polynomials with coefficients in K or in Q.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::field::{AlgebraicNumber, FieldDescriptor};
use crate::linalg::{rat, rat_to_f64, Rat};

pub type Exponents = Vec<u16>;

/// Polynomial over K in `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct KPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Exponents, AlgebraicNumber>,
}

impl KPoly {
    pub fn zero(nvars: usize) -> Self {
        KPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: AlgebraicNumber, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(field: &FieldDescriptor, v: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, field.one());
        p
    }

    pub fn monomial(exps: Exponents, c: AlgebraicNumber) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn add_term(&mut self, exps: Exponents, c: AlgebraicNumber) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(old) => {
                *old = old.add(&c);
                if old.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max()
    }

    /// Maximal total degree in the variables selected by `sel`.
    pub fn degree_in(&self, sel: impl Fn(usize) -> bool) -> Option<usize> {
        self.terms
            .keys()
            .map(|e| e.iter().enumerate().filter(|(v, _)| sel(*v)).map(|(_, &x)| x as usize).sum())
            .max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        KPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale_rat(&self, q: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.scale(q));
        }
        out
    }

    pub fn scale(&self, field: &FieldDescriptor, a: &AlgebraicNumber) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), field.mul(c, a));
        }
        out
    }

    pub fn mul(&self, field: &FieldDescriptor, o: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, field.mul(c1, c2));
            }
        }
        out
    }

    pub fn pow(&self, field: &FieldDescriptor, k: u32) -> Self {
        let mut acc = Self::constant(field.one(), self.nvars);
        for _ in 0..k {
            acc = acc.mul(field, self);
        }
        acc
    }

    pub fn eval(&self, field: &FieldDescriptor, point: &[AlgebraicNumber]) -> AlgebraicNumber {
        let mut acc = field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t = field.mul(&t, &point[v]);
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Replaces `x_v` by `images[v]`; all images share one variable count.
    pub fn substitute(&self, field: &FieldDescriptor, images: &[KPoly]) -> KPoly {
        let nv = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: BTreeMap<(usize, u16), KPoly> = BTreeMap::new();
        let mut out = KPoly::zero(nv);
        for (e, c) in &self.terms {
            let mut t = KPoly::constant(c.clone(), nv);
            for (v, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let pw = cache
                    .entry((v, k))
                    .or_insert_with(|| images[v].pow(field, k as u32))
                    .clone();
                t = t.mul(field, &pw);
            }
            out = out.add(&t);
        }
        out
    }

    /// Moves variable `v` to `map[v]` in a polynomial with `nvars` variables.
    pub fn rename(&self, map: &[usize], nvars: usize) -> KPoly {
        let mut out = KPoly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0u16; nvars];
            for (v, &k) in e.iter().enumerate() {
                ne[map[v]] += k;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    pub fn derivative(&self, v: usize) -> KPoly {
        let mut out = KPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[v] -= 1;
            out.add_term(ne, c.scale(&rat(e[v] as i64)));
        }
        out
    }

    pub fn map_coeffs(&self, f: impl Fn(&AlgebraicNumber) -> Rat) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Floating evaluation at an embedding: coefficients and point mapped through embedding `l`.
    pub fn eval_embedded(&self, field: &FieldDescriptor, l: usize, point: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = field.embed(c, l);
                for (v, &k) in e.iter().enumerate() {
                    t *= point[v].powu(k as u32);
                }
                t
            })
            .sum()
    }
}

/// Polynomial over Q in `nvars` variables.
#[derive(Debug, Clone, PartialEq)]
pub struct QPoly {
    pub nvars: usize,
    pub terms: BTreeMap<Exponents, Rat>,
}

impl QPoly {
    pub fn zero(nvars: usize) -> Self {
        QPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(c: Rat, nvars: usize) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(v: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[v] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, Rat::one());
        p
    }

    pub fn add_term(&mut self, exps: Exponents, c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&exps) {
            Some(old) => {
                *old += c;
                if old.is_zero() {
                    self.terms.remove(&exps);
                }
            }
            None => {
                self.terms.insert(exps, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms.keys().map(|e| e.iter().map(|&x| x as usize).sum()).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&rat(-1))
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, q: &Rat) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * q);
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval_rat(&self, point: &[Rat]) -> Rat {
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &point[v];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = rat_to_f64(c);
                for (v, &k) in e.iter().enumerate() {
                    if k > 0 {
                        t *= point[v].powi(k as i32);
                    }
                }
                t
            })
            .sum()
    }

    pub fn derivative(&self, v: usize) -> QPoly {
        let mut out = QPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut ne = e.clone();
            ne[v] -= 1;
            out.add_term(ne, c * rat(e[v] as i64));
        }
        out
    }

    /// Flattened `(coefficient, exponents)` list for fast floating evaluation.
    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let vars = e
                        .iter()
                        .enumerate()
                        .filter(|(_, &k)| k > 0)
                        .map(|(v, &k)| (v, k as i32))
                        .collect();
                    (rat_to_f64(c), vars)
                })
                .collect(),
        }
    }
}

/// Floating-point evaluation form of a [`QPoly`].
#[derive(Debug, Clone)]
pub struct CompiledPoly {
    pub terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl CompiledPoly {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, vars)| vars.iter().fold(*c, |t, &(v, k)| t * x[v].powi(k)))
            .sum()
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|g| *g = 0.0);
        for (c, vars) in &self.terms {
            for (idx, &(v, k)) in vars.iter().enumerate() {
                let mut t = *c * k as f64 * x[v].powi(k - 1);
                for (jdx, &(w, kw)) in vars.iter().enumerate() {
                    if jdx != idx {
                        t *= x[w].powi(kw);
                    }
                }
                out[v] += t;
            }
        }
    }
}

/// Rewrites `f` in the real coordinates `xhat_{v,k}` (variable `v * n + k`)
/// through `x_v = sum_k xhat_{v,k} omega_k`.
pub fn real_expand(field: &FieldDescriptor, f: &KPoly) -> KPoly {
    let n = field.degree();
    let nv = f.nvars * n;
    let images: Vec<KPoly> = (0..f.nvars)
        .map(|v| {
            let mut p = KPoly::zero(nv);
            for k in 0..n {
                let mut e = vec![0; nv];
                e[v * n + k] = 1;
                p.add_term(e, AlgebraicNumber::basis(n, k));
            }
            p
        })
        .collect();
    if f.nvars == 0 {
        let mut out = KPoly::zero(0);
        for (e, c) in &f.terms {
            out.add_term(e.clone(), c.clone());
        }
        return out;
    }
    f.substitute(field, &images)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_derivative() {
        let k = FieldDescriptor::gaussian();
        let x = KPoly::var(&k, 0, 2);
        let y = KPoly::var(&k, 1, 2);
        let s = x.add(&y);
        let sq = s.mul(&k, &s);
        assert_eq!(sq.terms.len(), 3);
        assert_eq!(sq.total_degree(), Some(2));
        let d = sq.derivative(0);
        assert_eq!(d, x.scale_rat(&rat(2)).add(&y.scale_rat(&rat(2))));
        assert!(s.sub(&s).is_zero());
    }

    #[test]
    fn substitution_matches_evaluation() {
        let k = FieldDescriptor::gaussian();
        let x = KPoly::var(&k, 0, 1);
        let f = x.pow(&k, 3).add(&x.scale(&k, &AlgebraicNumber::from_ints(&[0, 2])));
        let pt = AlgebraicNumber::from_ints(&[1, 1]);
        let g = f.substitute(&k, &[KPoly::constant(pt.clone(), 0)]);
        assert_eq!(g.terms.get(&vec![]).cloned().unwrap_or(k.zero()), f.eval(&k, &[pt]));
    }

    #[test]
    fn compiled_gradient() {
        let x = QPoly::var(0, 2);
        let y = QPoly::var(1, 2);
        let f = x.mul(&x).mul(&y).add(&y.scale(&rat(3)));
        let c = f.compile();
        assert_eq!(c.eval(&[2.0, 5.0]), 35.0);
        let mut g = [0.0; 2];
        c.gradient(&[2.0, 5.0], &mut g);
        assert_eq!(g, [20.0, 7.0]);
    }
}
