//! Point counts N_m(P), exponential sums T_P(alpha) and the empirical arc
//! classifier.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::AlgebraicNumber;
use crate::forms::{FormSystem, MultilinearSystem};
use crate::intarith::{odometer, IntElem, IntField, IntPoly, IntSystem, ZERO};
use crate::linalg::{common_denominator, rat, rat_to_f64, Rat};
use crate::poly::{CompiledPoly, QPoly};

pub const DEFAULT_POINT_BUDGET: u128 = 400_000_000;

/// The box `[-P, P]` on every real coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxSpec {
    pub p: i64,
    pub coords: usize,
}

impl BoxSpec {
    pub fn new(p: i64, coords: usize) -> Self {
        BoxSpec { p, coords }
    }

    pub fn for_system(sys: &MultilinearSystem, p: i64) -> Self {
        Self::new(p, sys.nms())
    }

    pub fn point_count(&self) -> u128 {
        let side = (2 * self.p + 1) as u128;
        side.checked_pow(self.coords as u32).unwrap_or(u128::MAX)
    }

    pub fn check_budget(&self, budget: u128) -> Result<()> {
        let needed = self.point_count();
        if needed > budget {
            return Err(Error::BudgetExceeded { needed, budget });
        }
        Ok(())
    }
}

/// Folds over the box, one accumulator per value of the leading coordinate,
/// returned in increasing order of that coordinate.
fn par_box_fold<A, I, S>(bx: BoxSpec, init: I, step: S) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    S: Fn(&mut A, &[i64]) + Sync,
{
    let p = bx.p;
    if bx.coords == 0 {
        let mut a = init();
        step(&mut a, &[]);
        return vec![a];
    }
    (-p..=p)
        .into_par_iter()
        .map(|lead| {
            let mut acc = init();
            let mut x = vec![-p; bx.coords];
            x[0] = lead;
            loop {
                step(&mut acc, &x);
                if !odometer(&mut x[1..], -p, p) {
                    break;
                }
            }
            acc
        })
        .collect()
}

/// Counts points of the box where every block `Phi_j^(rho)` vanishes.
pub fn count_expanded(sys: &MultilinearSystem, p: i64, budget: u128) -> Result<u128> {
    let bx = BoxSpec::for_system(sys, p);
    bx.check_budget(budget)?;
    let isys = IntSystem::new(sys)?;
    let nb = isys.blocks.len();
    let parts = par_box_fold(
        bx,
        || (0u128, vec![ZERO; isys.nvars], vec![ZERO; nb]),
        |(count, elems, vals), x| {
            isys.to_elems(x, elems);
            for (v, b) in vals.iter_mut().zip(&isys.blocks) {
                *v = b.eval(&isys.field, elems);
                if *v != ZERO {
                    return;
                }
            }
            *count += 1;
        },
    );
    Ok(parts.into_iter().map(|(c, _, _)| c).sum())
}

/// Sparse polynomial in `t_1..t_m` with O_K coefficients, dense-indexed scratch.
struct TPoly {
    base: usize,
    entries: Vec<(usize, IntElem)>,
}

impl TPoly {
    fn one(base: usize) -> Self {
        let mut c = ZERO;
        c[0] = 1;
        TPoly { base, entries: vec![(0, c)] }
    }

    fn scale(&mut self, f: &IntField, c: &IntElem) {
        for (_, v) in self.entries.iter_mut() {
            *v = f.mul(v, c);
        }
    }

    /// Multiplies by `sum_k lin[k] t_k`.
    fn mul_linear(&self, f: &IntField, lin: &[IntElem], scratch: &mut HashMap<usize, IntElem>) -> TPoly {
        scratch.clear();
        let n = f.n;
        let mut stride = 1;
        for l in lin {
            for (idx, v) in &self.entries {
                let prod = f.mul(v, l);
                let e = scratch.entry(idx + stride).or_insert(ZERO);
                for i in 0..n {
                    e[i] += prod[i];
                }
            }
            stride *= self.base;
        }
        TPoly { base: self.base, entries: scratch.drain().collect() }
    }
}

/// Counts m-tuples for which `F^(rho)(t_1 x_1 + ... + t_m x_m)` vanishes identically in `t`,
/// by expanding the substitution directly (no polarization involved).
pub fn count_parametric(sys: &FormSystem, m: usize, p: i64, budget: u128) -> Result<u128> {
    let n = sys.field.degree();
    let bx = BoxSpec::new(p, n * m * sys.s);
    bx.check_budget(budget)?;
    let f = IntField::new(&sys.field)?;
    let forms: Vec<IntPoly> = sys
        .forms
        .iter()
        .map(|g| {
            let den = common_denominator(g.terms.values().flat_map(|c| c.coords.iter()));
            IntPoly::from_kpoly(g, &den)
        })
        .collect::<Result<_>>()?;
    let s = sys.s;
    let base = sys.d + 1;
    let parts = par_box_fold(
        bx,
        || (0u128, HashMap::new()),
        |(count, scratch), x| {
            // linear forms L_i(t) = sum_k x_{k,i} t_k
            let lin: Vec<Vec<IntElem>> = (0..s)
                .map(|i| {
                    (0..m)
                        .map(|k| {
                            let v = k * s + i;
                            let mut e = ZERO;
                            for c in 0..n {
                                e[c] = x[v * n + c] as i128;
                            }
                            e
                        })
                        .collect()
                })
                .collect();
            for g in &forms {
                let mut total: HashMap<usize, IntElem> = HashMap::new();
                for (coef, vars) in &g.terms {
                    let mut t = TPoly::one(base);
                    for &(v, k) in vars {
                        for _ in 0..k {
                            t = t.mul_linear(&f, &lin[v], scratch);
                        }
                    }
                    t.scale(&f, coef);
                    for (idx, val) in t.entries {
                        let e = total.entry(idx).or_insert(ZERO);
                        for i in 0..n {
                            e[i] += val[i];
                        }
                    }
                }
                if total.values().any(|v| *v != ZERO) {
                    return;
                }
            }
            *count += 1;
        },
    );
    Ok(parts.into_iter().map(|(c, _)| c).sum())
}

/// Meet-in-the-middle count for a single diagonal form with `m = 1`:
/// the variables are split into a first and second half, each half's value
/// histogram is built by convolving per-variable histograms, and
/// `N = sum_v H_A(v) H_B(-v)`.
pub fn count_diagonal_histogram(sys: &FormSystem, p: i64) -> Result<u128> {
    let coeffs = sys
        .diagonal_coeffs()
        .ok_or_else(|| Error::InvalidForm("histogram path needs a single diagonal form".into()))?;
    let field = &sys.field;
    let f = IntField::new(field)?;
    let n = field.degree();
    let den = common_denominator(coeffs.iter().flat_map(|c| c.coords.iter()));
    let scaled: Vec<IntElem> = coeffs
        .iter()
        .map(|c| {
            let mut e = ZERO;
            for (k, x) in c.coords.iter().enumerate() {
                e[k] = (x * Rat::from_integer(den.clone())).to_integer().to_i128().unwrap_or(0);
            }
            e
        })
        .collect();
    let d = sys.d as u32;
    let elems: Vec<IntElem> = {
        let mut out = Vec::new();
        let mut x = vec![-p; n];
        loop {
            let mut e = ZERO;
            for k in 0..n {
                e[k] = x[k] as i128;
            }
            out.push(e);
            if !odometer(&mut x, -p, p) {
                break;
            }
        }
        out
    };
    let per_var = |c: &IntElem| -> HashMap<IntElem, u128> {
        let mut h = HashMap::new();
        for x in &elems {
            let mut v = *c;
            for _ in 0..d {
                v = f.mul(&v, x);
            }
            *h.entry(v).or_insert(0) += 1;
        }
        h
    };
    let half = sys.s.div_ceil(2);
    let build = |range: std::ops::Range<usize>| -> HashMap<IntElem, u128> {
        let mut acc: HashMap<IntElem, u128> = HashMap::from([(ZERO, 1u128)]);
        for i in range {
            let h = per_var(&scaled[i]);
            let mut next: HashMap<IntElem, u128> = HashMap::with_capacity(acc.len() * 2);
            for (a, ca) in &acc {
                for (b, cb) in &h {
                    let mut v = *a;
                    for k in 0..n {
                        v[k] += b[k];
                    }
                    *next.entry(v).or_insert(0) += ca * cb;
                }
            }
            acc = next;
        }
        acc
    };
    let ha = build(0..half);
    let hb = build(half..sys.s);
    let mut total = 0u128;
    for (v, c) in &ha {
        let mut neg = *v;
        for k in 0..n {
            neg[k] = -neg[k];
        }
        if let Some(cb) = hb.get(&neg) {
            total += c * cb;
        }
    }
    Ok(total)
}

/// Frequency parameter for exponential sums.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    /// `R x r` elements of K.
    Exact(Vec<Vec<AlgebraicNumber>>),
    /// `R x r` elements of `V` as floating basis coordinates.
    Real(Vec<Vec<Vec<f64>>>),
}

impl Alpha {
    pub fn zero(sys: &MultilinearSystem) -> Self {
        Alpha::Exact(vec![vec![sys.field.zero(); sys.r()]; sys.big_r()])
    }

    pub fn to_real(&self) -> Vec<Vec<Vec<f64>>> {
        match self {
            Alpha::Exact(a) => a.iter().map(|row| row.iter().map(|x| x.to_f64()).collect()).collect(),
            Alpha::Real(a) => a.clone(),
        }
    }

    fn check(&self, sys: &MultilinearSystem) -> Result<()> {
        let shape_ok = match self {
            Alpha::Exact(a) => {
                a.len() == sys.big_r() && a.iter().all(|r| r.len() == sys.r() && r.iter().all(|x| x.degree() == sys.n()))
            }
            Alpha::Real(a) => {
                a.len() == sys.big_r() && a.iter().all(|r| r.len() == sys.r() && r.iter().all(|x| x.len() == sys.n()))
            }
        };
        if !shape_ok {
            return Err(Error::DimensionMismatch(format!("alpha must be {} x {} elements of degree {}", sys.big_r(), sys.r(), sys.n())));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpSumRoute {
    /// Phases `Tr(alpha Phi(x))` through arithmetic in `V`.
    VArith,
    /// Phases from the real-form polynomial in the `n*m*s` integer coordinates.
    RealForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumResult {
    pub re: f64,
    pub im: f64,
    pub points: u128,
    /// Denominator of the exact phases, when alpha is K-rational.
    pub phase_modulus: Option<String>,
    /// Exact phase histogram `numerator -> multiplicity`, when alpha is K-rational.
    pub histogram: Option<BTreeMap<i128, u128>>,
}

impl ExpSumResult {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

fn unit(phase: f64) -> Complex64 {
    let t = 2.0 * std::f64::consts::PI * (phase - phase.floor());
    Complex64::new(t.cos(), t.sin())
}

/// `T_P(alpha)` with exact phases for K-rational alpha and the requested route otherwise.
pub fn exp_sum(sys: &MultilinearSystem, alpha: &Alpha, p: i64, route: ExpSumRoute, budget: u128) -> Result<ExpSumResult> {
    alpha.check(sys)?;
    let bx = BoxSpec::for_system(sys, p);
    bx.check_budget(budget)?;
    match (alpha, route) {
        (Alpha::Exact(a), ExpSumRoute::VArith) => exp_sum_exact(sys, a, bx),
        _ => exp_sum_real(sys, &alpha.to_real(), bx, route),
    }
}

/// Integer phase data for K-rational alpha: `Tr(alpha . Phi(x)) = N(x) / modulus`.
pub(crate) struct ExactPhase {
    pub isys: IntSystem,
    pub alpha_num: Vec<IntElem>,
    pub modulus: i128,
}

impl ExactPhase {
    pub fn new(sys: &MultilinearSystem, alpha: &[Vec<AlgebraicNumber>]) -> Result<Self> {
        let isys = IntSystem::new(sys)?;
        let flat: Vec<&AlgebraicNumber> = alpha.iter().flatten().collect();
        let a_den = common_denominator(flat.iter().flat_map(|x| x.coords.iter()));
        let aq = Rat::from_integer(a_den.clone());
        let alpha_num = flat
            .iter()
            .map(|x| {
                let mut e = ZERO;
                for (k, c) in x.coords.iter().enumerate() {
                    e[k] = (c * &aq).to_integer().to_i128().ok_or(Error::Overflow("phase numerator"))?;
                }
                Ok(e)
            })
            .collect::<Result<_>>()?;
        let modulus = (a_den * &isys.denom).to_i128().ok_or(Error::Overflow("phase modulus"))?;
        Ok(ExactPhase { isys, alpha_num, modulus })
    }

    #[inline]
    pub fn residue(&self, vals: &[IntElem]) -> i128 {
        let mut acc = 0i128;
        for (a, v) in self.alpha_num.iter().zip(vals) {
            acc += self.isys.field.trace_pair(a, v);
        }
        acc.rem_euclid(self.modulus)
    }
}

/// Sums a phase histogram in increasing residue order.
pub fn histogram_value(hist: &BTreeMap<i128, u128>, modulus: i128) -> Complex64 {
    hist.iter()
        .map(|(&r, &c)| unit(r as f64 / modulus as f64) * c as f64)
        .sum()
}

fn merge_hist(parts: Vec<HashMap<i128, u128>>) -> BTreeMap<i128, u128> {
    let mut out = BTreeMap::new();
    for h in parts {
        for (k, v) in h {
            *out.entry(k).or_insert(0) += v;
        }
    }
    out
}

fn exp_sum_exact(sys: &MultilinearSystem, alpha: &[Vec<AlgebraicNumber>], bx: BoxSpec) -> Result<ExpSumResult> {
    let ph = ExactPhase::new(sys, alpha)?;
    let nb = ph.isys.blocks.len();
    let parts = par_box_fold(
        bx,
        || (HashMap::new(), vec![ZERO; ph.isys.nvars], vec![ZERO; nb]),
        |(h, elems, vals), x| {
            ph.isys.to_elems(x, elems);
            ph.isys.eval_into(elems, vals);
            *h.entry(ph.residue(vals)).or_insert(0u128) += 1;
        },
    );
    let hist = merge_hist(parts.into_iter().map(|(h, _, _)| h).collect());
    let value = histogram_value(&hist, ph.modulus);
    Ok(ExpSumResult {
        re: value.re,
        im: value.im,
        points: bx.point_count(),
        phase_modulus: Some(ph.modulus.to_string()),
        histogram: Some(hist),
    })
}

/// Real-form polynomials `Phihat_{b,l} = Tr(omega_l Phi_b)` in the `n*m*s` real coordinates.
pub fn real_form_blocks(sys: &MultilinearSystem) -> Vec<Vec<QPoly>> {
    let field = &sys.field;
    let n = sys.n();
    sys.all_blocks()
        .map(|b| {
            let expanded = crate::poly::real_expand(field, b);
            (0..n)
                .map(|l| expanded.map_coeffs(|c| field.trace(&field.mul(&AlgebraicNumber::basis(n, l), c))))
                .collect()
        })
        .collect()
}

/// `FFhat(xhat; alphahat) = sum_{b,l} alphahat_{b,l} Phihat_{b,l}(xhat)` with floating coefficients.
pub fn real_form_poly(sys: &MultilinearSystem, alpha: &[Vec<Vec<f64>>]) -> CompiledPoly {
    let blocks = real_form_blocks(sys);
    let mut acc: BTreeMap<Vec<u16>, f64> = BTreeMap::new();
    for (b, a) in blocks.iter().zip(alpha.iter().flatten()) {
        for (l, poly) in b.iter().enumerate() {
            if a[l] == 0.0 {
                continue;
            }
            for (e, c) in &poly.terms {
                *acc.entry(e.clone()).or_insert(0.0) += a[l] * rat_to_f64(c);
            }
        }
    }
    CompiledPoly {
        terms: acc
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(e, c)| {
                let vars = e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k as i32)).collect();
                (c, vars)
            })
            .collect(),
    }
}

fn exp_sum_real(sys: &MultilinearSystem, alpha: &[Vec<Vec<f64>>], bx: BoxSpec, route: ExpSumRoute) -> Result<ExpSumResult> {
    let parts: Vec<Complex64> = match route {
        ExpSumRoute::VArith => {
            let isys = IntSystem::new(sys)?;
            let d = isys.denom.to_f64().unwrap_or(f64::NAN);
            let a: Vec<Vec<f64>> = alpha.iter().flatten().cloned().collect();
            let nb = isys.blocks.len();
            par_box_fold(
                bx,
                || (Complex64::new(0.0, 0.0), vec![ZERO; isys.nvars], vec![ZERO; nb]),
                |(acc, elems, vals), x| {
                    isys.to_elems(x, elems);
                    isys.eval_into(elems, vals);
                    let mut ph = 0.0;
                    for (ab, v) in a.iter().zip(vals.iter()) {
                        ph += isys.field.trace_pair_f64(ab, v);
                    }
                    *acc += unit(ph / d);
                },
            )
            .into_iter()
            .map(|(c, _, _)| c)
            .collect()
        }
        ExpSumRoute::RealForm => {
            let poly = real_form_poly(sys, alpha);
            par_box_fold(
                bx,
                || (Complex64::new(0.0, 0.0), vec![0.0; bx.coords]),
                |(acc, xf), x| {
                    for (o, &v) in xf.iter_mut().zip(x) {
                        *o = v as f64;
                    }
                    *acc += unit(poly.eval(xf));
                },
            )
            .into_iter()
            .map(|(c, _)| c)
            .collect()
        }
    };
    let value: Complex64 = parts.into_iter().sum();
    Ok(ExpSumResult { re: value.re, im: value.im, points: bx.point_count(), phase_modulus: None, histogram: None })
}

/// Arc parameters `theta`, `c1`, `c2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcParameters {
    #[serde(with = "crate::linalg::rat_str")]
    pub theta: Rat,
    pub c1: f64,
    pub c2: f64,
}

impl ArcParameters {
    pub fn new(theta: Rat, c1: f64, c2: f64) -> Result<Self> {
        if theta <= Rat::zero() || theta > Rat::one() {
            return Err(Error::InvalidArgument("theta must lie in (0, 1]".into()));
        }
        if c1 <= 0.0 || c2 <= 0.0 {
            return Err(Error::InvalidArgument("c1 and c2 must be positive".into()));
        }
        Ok(ArcParameters { theta, c1, c2 })
    }

    fn theta_f(&self) -> f64 {
        rat_to_f64(&self.theta)
    }

    /// `c1 P^{R(d-1) theta}`.
    pub fn q_max(&self, p: f64, big_r: usize, d: usize) -> f64 {
        self.c1 * p.powf((big_r * (d - 1)) as f64 * self.theta_f())
    }

    /// `c1 P^{-d + R(d-1) theta}`.
    pub fn radius(&self, p: f64, big_r: usize, d: usize) -> f64 {
        self.c1 * p.powf(-(d as f64) + (big_r * (d - 1)) as f64 * self.theta_f())
    }

    /// `c2 P^{R r (d-1) n theta}`.
    pub fn homogeneous_bound(&self, p: f64, big_r: usize, r: usize, d: usize, n: usize) -> f64 {
        self.c2 * p.powf((big_r * r * (d - 1) * n) as f64 * self.theta_f())
    }

    /// `2 R (d-1) theta < d`.
    pub fn disjoint(&self, big_r: usize, d: usize) -> bool {
        self.theta.clone() * rat((2 * big_r * (d - 1)) as i64) < rat(d as i64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum ArcClass {
    Major {
        /// Denominator `q` in basis coordinates.
        q: Vec<i64>,
        /// Numerators `a`, `R x r` elements in basis coordinates.
        a: Vec<Vec<Vec<i64>>>,
        /// Largest coordinate of `alpha q - a`.
        distance: f64,
        /// Norm of the denominator ideal of `a / q`.
        q_gamma: u64,
    },
    Minor,
}

pub const DEFAULT_SEARCH_BUDGET: u128 = 10_000_000;

/// Exhaustive search over `q` in `O_K^+` of height at most `q_max` for an
/// approximation `|alpha q - a| <= radius`; the first witness in the order
/// (height, coordinate sum, reverse lexicographic) is returned.
pub fn classify_arc(
    sys: &MultilinearSystem,
    alpha: &[Vec<Vec<f64>>],
    p: i64,
    params: &ArcParameters,
    search_budget: u128,
) -> Result<ArcClass> {
    Alpha::Real(alpha.to_vec()).check(sys)?;
    let field = &sys.field;
    let n = sys.n();
    let pf = p as f64;
    let hmax = params.q_max(pf, sys.big_r(), sys.d).floor() as i64;
    let radius = params.radius(pf, sys.big_r(), sys.d);
    if hmax < 1 {
        return Ok(ArcClass::Minor);
    }
    let needed = ((hmax + 1) as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if needed > search_budget {
        return Err(Error::SearchBudgetExceeded { needed, budget: search_budget });
    }
    let mut cands: Vec<Vec<i64>> = Vec::new();
    let mut x = vec![0i64; n];
    while odometer(&mut x, 0, hmax) {
        cands.push(x.clone());
    }
    cands.sort_by(|a, b| {
        let ha = a.iter().max();
        let hb = b.iter().max();
        ha.cmp(&hb)
            .then(a.iter().sum::<i64>().cmp(&b.iter().sum::<i64>()))
            .then(b.cmp(a))
    });
    let flat: Vec<&Vec<f64>> = alpha.iter().flatten().collect();
    for q in cands {
        let qf: Vec<f64> = q.iter().map(|&v| v as f64).collect();
        let mut dist: f64 = 0.0;
        let mut a_int: Vec<Vec<i64>> = Vec::with_capacity(flat.len());
        for a in &flat {
            let prod = field.mul_v(a, &qf);
            let rounded: Vec<i64> = prod.iter().map(|v| v.round() as i64).collect();
            for (v, r) in prod.iter().zip(&rounded) {
                dist = dist.max((v - *r as f64).abs());
            }
            a_int.push(rounded);
        }
        if dist <= radius {
            let qa = AlgebraicNumber::from_ints(&q);
            let qinv = field.inv(&qa)?;
            let gamma: Vec<AlgebraicNumber> = a_int.iter().map(|c| field.mul(&AlgebraicNumber::from_ints(c), &qinv)).collect();
            let q_gamma = field.denominator_ideal_vec(&gamma)?.norm();
            let r = sys.r();
            let a = a_int.chunks(r).map(|c| c.to_vec()).collect();
            return Ok(ArcClass::Major { q, a, distance: dist, q_gamma });
        }
    }
    Ok(ArcClass::Minor)
}

/// Normalizing exponent `n(ms - R r d)`; equals `n(ms - r d)` for a single form.
pub fn growth_power(sys: &MultilinearSystem) -> i64 {
    let n = sys.n() as i64;
    n * (sys.ms() as i64 - (sys.big_r() * sys.r() * sys.d) as i64)
}

/// `N / P^e` as a float.
pub fn normalized_ratio(count: u128, p: i64, exponent: i64) -> f64 {
    count as f64 / (p as f64).powi(exponent as i32)
}
