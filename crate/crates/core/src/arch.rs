//! The archimedean density: v_1(beta), its factorization over infinite
//! places, the truncated beta-integral and the Schmidt-weight estimator.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counting::real_form_blocks;
use crate::error::{Error, Result};
use crate::forms::MultilinearSystem;
use crate::linalg::rat_to_f64;
use crate::poly::{CompiledPoly, KPoly};
use crate::quadrature::{e, gradient_bound, split_components, sup_bound, tensor, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMethod {
    TensorPanel,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadratureSpec {
    pub method: QuadratureMethod,
    /// Gauss-Legendre nodes per panel.
    pub order: usize,
    pub min_panels: usize,
    /// Panels per unit of phase change across an axis.
    pub panels_per_oscillation: f64,
    pub samples: u64,
    pub seed: u64,
    /// Target absolute error per integral.
    pub target: f64,
    /// Cap on integrand evaluations per tensor rule.
    pub max_evals: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            method: QuadratureMethod::TensorPanel,
            order: 12,
            min_panels: 2,
            panels_per_oscillation: 1.0,
            samples: 1_000_000,
            seed: 1,
            target: 1e-8,
            max_evals: 50_000_000,
        }
    }
}

/// A floating value with its error estimate and how it was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub re: f64,
    pub im: f64,
    pub error: f64,
    pub method: String,
    pub evaluations: u64,
    pub target_met: bool,
}

impl Estimate {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    fn new(v: Complex64, error: f64, method: &str, evaluations: u64, target: f64) -> Self {
        Estimate { re: v.re, im: v.im, error, method: method.into(), evaluations, target_met: error <= target }
    }
}

/// Triangle kernel `max{0, L(1 - L|x|)}` of unit mass.
#[inline]
pub fn w_hat(l: f64, x: f64) -> f64 {
    (l * (1.0 - l * x.abs())).max(0.0)
}

fn poly_key(p: &CompiledPoly, sign: f64) -> Vec<(u64, Vec<(usize, i32)>)> {
    let mut k: Vec<(u64, Vec<(usize, i32)>)> = p.terms.iter().map(|(c, v)| ((sign * c + 0.0).to_bits(), v.clone())).collect();
    k.sort();
    k
}

/// `int_{[-b,b]^k} e(p(y)) dy` for one connected component.
fn integrate_component(p: &CompiledPoly, k: usize, b: f64, spec: &QuadratureSpec) -> (Complex64, f64, u64, bool) {
    if p.terms.is_empty() {
        return (Complex64::new((2.0 * b).powi(k as i32), 0.0), 0.0, 0, true);
    }
    let g = GaussLegendre::new(spec.order);
    let osc = gradient_bound(p, b) * 2.0 * b;
    let mut panels = spec.min_panels.max(1) + (osc * spec.panels_per_oscillation).ceil() as usize;
    let per_axis_cap = (spec.max_evals as f64).powf(1.0 / k as f64) / spec.order as f64;
    let mut capped = false;
    if panels as f64 > per_axis_cap {
        panels = (per_axis_cap.floor() as usize).max(1);
        capped = true;
    }
    let f = |y: &[f64]| e(p.eval(y));
    let (xs, ws) = g.composite(-b, b, panels);
    let fine = tensor(k, &xs, &ws, f);
    let (xc, wc) = g.composite(-b, b, (panels / 2).max(1));
    let coarse = tensor(k, &xc, &wc, f);
    let evals = (xs.len() as u64).pow(k as u32) + (xc.len() as u64).pow(k as u32);
    (fine, (fine - coarse).norm(), evals, !capped)
}

fn monte_carlo(p: &CompiledPoly, dim: usize, b: f64, spec: &QuadratureSpec) -> (Complex64, f64) {
    let batch = 1u64 << 14;
    let nb = spec.samples.div_ceil(batch);
    let parts: Vec<(Complex64, f64, u64)> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(i);
            let count = batch.min(spec.samples - i * batch);
            let mut y = vec![0.0; dim];
            let (mut s, mut s2) = (Complex64::new(0.0, 0.0), 0.0);
            for _ in 0..count {
                for v in y.iter_mut() {
                    *v = rng.gen_range(-b..b);
                }
                let z = e(p.eval(&y));
                s += z;
                s2 += z.norm_sqr();
            }
            (s, s2, count)
        })
        .collect();
    let (mut s, mut s2, mut n) = (Complex64::new(0.0, 0.0), 0.0, 0u64);
    for (a, b2, c) in parts {
        s += a;
        s2 += b2;
        n += c;
    }
    let vol = (2.0 * b).powi(dim as i32);
    let mean = s / n as f64;
    let var = (s2 / n as f64 - mean.norm_sqr()).max(0.0);
    (mean * vol, vol * (var / n as f64).sqrt())
}

/// `int_{[-b,b]^nvars} e(p(y)) dy`, factorized over variable-connected components;
/// equal (or negated) components are integrated once.
pub fn integrate_phase(p: &CompiledPoly, nvars: usize, b: f64, spec: &QuadratureSpec) -> Estimate {
    if spec.method == QuadratureMethod::MonteCarlo {
        let (v, err) = monte_carlo(p, nvars, b, spec);
        return Estimate::new(v, err, "monte-carlo", spec.samples, spec.target);
    }
    let comps = split_components(p, nvars);
    let mut cache: HashMap<Vec<(u64, Vec<(usize, i32)>)>, (Complex64, f64)> = HashMap::new();
    let mut vals = Vec::with_capacity(comps.len());
    let mut evals = 0;
    let mut ok = true;
    for (vars, cp) in &comps {
        let key = poly_key(cp, 1.0);
        let (v, err) = if let Some(&(v, err)) = cache.get(&key) {
            (v, err)
        } else if let Some(&(v, err)) = cache.get(&poly_key(cp, -1.0)) {
            (v.conj(), err)
        } else {
            let (v, err, n, fit) = integrate_component(cp, vars.len(), b, spec);
            evals += n;
            ok &= fit;
            cache.insert(key, (v, err));
            (v, err)
        };
        vals.push((v, err));
    }
    let value: Complex64 = vals.iter().map(|(v, _)| *v).product();
    let mut error = 0.0;
    for i in 0..vals.len() {
        let others: f64 = vals.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, (v, _))| v.norm()).product();
        error += vals[i].1 * others;
    }
    let mut est = Estimate::new(value, error, "tensor-panel", evals, spec.target);
    est.target_met &= ok;
    est
}

/// Real-form blocks as floating term lists: `coeffs[(b, l)]` of each monomial.
pub struct RealForm {
    pub nvars: usize,
    pub width: usize,
    terms: Vec<(Vec<(usize, i32)>, Vec<f64>)>,
}

impl RealForm {
    pub fn new(sys: &MultilinearSystem) -> Self {
        let blocks = real_form_blocks(sys);
        let n = sys.n();
        let width = blocks.len() * n;
        let mut map: BTreeMap<Vec<u16>, Vec<f64>> = BTreeMap::new();
        for (b, polys) in blocks.iter().enumerate() {
            for (l, poly) in polys.iter().enumerate() {
                for (e, c) in &poly.terms {
                    map.entry(e.clone()).or_insert_with(|| vec![0.0; width])[b * n + l] += rat_to_f64(c);
                }
            }
        }
        let terms = map
            .into_iter()
            .map(|(e, c)| (e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k as i32)).collect(), c))
            .collect();
        RealForm { nvars: sys.nms(), width, terms }
    }

    /// Phase polynomial `Tr(beta . Phi(y))` for flat `beta` of length `R r n`.
    pub fn poly(&self, beta: &[f64]) -> CompiledPoly {
        CompiledPoly {
            terms: self
                .terms
                .iter()
                .filter_map(|(vars, c)| {
                    let v: f64 = c.iter().zip(beta).map(|(a, b)| a * b).sum();
                    (v != 0.0).then(|| (v, vars.clone()))
                })
                .collect(),
        }
    }
}

fn flatten_beta(sys: &MultilinearSystem, beta: &[Vec<Vec<f64>>]) -> Result<Vec<f64>> {
    let ok = beta.len() == sys.big_r() && beta.iter().all(|r| r.len() == sys.r() && r.iter().all(|x| x.len() == sys.n()));
    if !ok {
        return Err(Error::DimensionMismatch(format!("beta must be {} x {} elements of V (dimension {})", sys.big_r(), sys.r(), sys.n())));
    }
    Ok(beta.iter().flatten().flatten().copied().collect())
}

/// `v_1(beta) = int_{B^{sm}} e(Tr F(y; beta)) dy`.
pub fn v1(sys: &MultilinearSystem, beta: &[Vec<Vec<f64>>], spec: &QuadratureSpec) -> Result<Estimate> {
    let flat = flatten_beta(sys, beta)?;
    let rf = RealForm::new(sys);
    Ok(integrate_phase(&rf.poly(&flat), sys.nms(), 1.0, spec))
}

/// `v_P(beta)`: the same integral over `P B^{sm}`.
pub fn v_p(sys: &MultilinearSystem, beta: &[Vec<Vec<f64>>], p: f64, spec: &QuadratureSpec) -> Result<Estimate> {
    let flat = flatten_beta(sys, beta)?;
    let rf = RealForm::new(sys);
    Ok(integrate_phase(&rf.poly(&flat), sys.nms(), p, spec))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub p: f64,
    pub lhs: Estimate,
    pub rhs: Estimate,
    pub deviation: f64,
}

/// Compares `v_P(beta)` with `P^{nms} v_1(P^d beta)`, both by direct quadrature.
pub fn v_scaling_check(sys: &MultilinearSystem, p: f64, beta: &[Vec<Vec<f64>>], spec: &QuadratureSpec) -> Result<ScalingCheck> {
    let lhs = v_p(sys, beta, p, spec)?;
    let pd = p.powi(sys.d as i32);
    let scaled: Vec<Vec<Vec<f64>>> = beta.iter().map(|r| r.iter().map(|x| x.iter().map(|v| v * pd).collect()).collect()).collect();
    let mut rhs = v1(sys, &scaled, spec)?;
    let vol = p.powi(sys.nms() as i32);
    rhs.re *= vol;
    rhs.im *= vol;
    rhs.error *= vol;
    let deviation = (lhs.value() - rhs.value()).norm() / rhs.value().norm().max(f64::MIN_POSITIVE);
    Ok(ScalingCheck { p, lhs, rhs, deviation })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaceFactor {
    pub place: usize,
    pub complex: bool,
    pub value: Estimate,
}

/// Complex polynomial in real variables.
type CPoly = BTreeMap<Vec<u16>, Complex64>;

fn cpoly_mul_linear(p: &CPoly, a: usize, b: Option<usize>) -> CPoly {
    // multiplies by y_a + i y_b (or by y_a when b is None)
    let mut out = CPoly::new();
    for (e, c) in p {
        let mut ea = e.clone();
        ea[a] += 1;
        *out.entry(ea).or_insert(Complex64::new(0.0, 0.0)) += c;
        if let Some(b) = b {
            let mut eb = e.clone();
            eb[b] += 1;
            *out.entry(eb).or_insert(Complex64::new(0.0, 0.0)) += c * Complex64::new(0.0, 1.0);
        }
    }
    out
}

fn place_poly(sys: &MultilinearSystem, flat: &[f64], l: usize, complex: bool) -> CompiledPoly {
    let field = &sys.field;
    let n = sys.n();
    let ms = sys.ms();
    let nv = if complex { 2 * ms } else { ms };
    let mut acc = CPoly::new();
    for (b, block) in sys.all_blocks().enumerate() {
        let beta_l = field.embed_coords(&flat[b * n..(b + 1) * n], l);
        add_block(&mut acc, block, field, l, beta_l, nv, complex);
    }
    let scale = if complex { 2.0 } else { 1.0 };
    CompiledPoly {
        terms: acc
            .into_iter()
            .filter(|(_, c)| c.re != 0.0)
            .map(|(e, c)| (scale * c.re, e.iter().enumerate().filter(|(_, &k)| k > 0).map(|(v, &k)| (v, k as i32)).collect()))
            .collect(),
    }
}

fn add_block(acc: &mut CPoly, block: &KPoly, field: &crate::field::FieldDescriptor, l: usize, beta_l: Complex64, nv: usize, complex: bool) {
    for (e, c) in &block.terms {
        let coef = beta_l * field.embed(c, l);
        let mut term: CPoly = BTreeMap::from([(vec![0u16; nv], coef)]);
        for (v, &k) in e.iter().enumerate() {
            for _ in 0..k {
                term = if complex { cpoly_mul_linear(&term, 2 * v, Some(2 * v + 1)) } else { cpoly_mul_linear(&term, v, None) };
            }
        }
        for (ex, c) in term {
            *acc.entry(ex).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
}

/// Per-place integrals: `int_{[-1,1]^{ms}} e(beta^(l) F^(l)(y))` at real places and
/// `int_{[-1,1]^{2ms}} e(2 Re beta^(l) F^(l)(y + i z))` at complex places.
/// Their product is `v_1(beta)` when the box in basis coordinates is the
/// product of the place boxes, as for Q and Q(i) with their standard bases.
pub fn v1_place_factors(sys: &MultilinearSystem, beta: &[Vec<Vec<f64>>], spec: &QuadratureSpec) -> Result<Vec<PlaceFactor>> {
    let flat = flatten_beta(sys, beta)?;
    let field = &sys.field;
    let ms = sys.ms();
    let mut out = Vec::new();
    for l in 0..field.n1() + field.n2() {
        let complex = l >= field.n1();
        let p = place_poly(sys, &flat, l, complex);
        let nv = if complex { 2 * ms } else { ms };
        out.push(PlaceFactor { place: l, complex, value: integrate_phase(&p, nv, 1.0, spec) });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub x: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiInfBeta {
    pub x: f64,
    pub value: f64,
    pub quadrature_error: f64,
    /// `|J(X) - J(X/2)|`, a proxy for the neglected tail.
    pub truncation_error: f64,
    pub error: f64,
    pub table: Vec<ConvergenceRow>,
    pub method: String,
}

/// `int_{|beta| <= X} v_1(beta) d beta` over `beta` in `V^{Rr}` (sup norm on basis coordinates).
pub fn chi_inf_beta(sys: &MultilinearSystem, x: f64, spec: &QuadratureSpec) -> Result<ChiInfBeta> {
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::InvalidArgument("truncation X must be positive and finite".into()));
    }
    let rf = RealForm::new(sys);
    let dim = rf.width;
    let nms = sys.nms();
    let inner = |beta: &[f64]| integrate_phase(&rf.poly(beta), nms, 1.0, spec);
    // oscillation rate of v_1 in each beta coordinate
    let rate: f64 = (0..dim)
        .map(|i| {
            let mut unit = vec![0.0; dim];
            unit[i] = 1.0;
            sup_bound(&rf.poly(&unit), 1.0)
        })
        .fold(0.0, f64::max);
    let g = GaussLegendre::new(spec.order);
    let panels_for = |len: f64| spec.min_panels.max(1) + (len * rate * spec.panels_per_oscillation).ceil() as usize;
    let cuts = [x / 8.0, x / 4.0, x / 2.0, x];
    let mut table = Vec::new();
    let mut qerr = 0.0;
    if dim == 1 {
        // J = 2 Re int_0^X v_1, by conjugation symmetry
        let mut total = 0.0;
        let mut lo = 0.0;
        for &hi in &cuts {
            let piece = |panels: usize| -> (f64, f64) {
                let (xs, ws) = g.composite(lo, hi, panels);
                let vals: Vec<(f64, f64)> = xs.par_iter().zip(&ws).map(|(b, w)| {
                    let est = inner(&[*b]);
                    (w * est.re, w * est.error)
                }).collect();
                vals.iter().fold((0.0, 0.0), |(a, e2), (v, er)| (a + v, e2 + er))
            };
            let p = panels_for(hi - lo);
            let (fine, inner_err) = piece(p);
            let (coarse, _) = piece((p / 2).max(1));
            total += 2.0 * fine;
            qerr += 2.0 * ((fine - coarse).abs() + inner_err);
            table.push(ConvergenceRow { x: hi, value: total });
            lo = hi;
        }
    } else {
        for &hi in &cuts {
            let p = panels_for(2.0 * hi);
            let run = |panels: usize| -> Complex64 {
                let (xs, ws) = g.composite(-hi, hi, panels);
                tensor(dim, &xs, &ws, |b| inner(b).value())
            };
            let fine = run(p);
            let coarse = run((p / 2).max(1));
            qerr = (fine - coarse).norm();
            table.push(ConvergenceRow { x: hi, value: fine.re });
        }
    }
    let value = table[3].value;
    let truncation_error = (table[3].value - table[2].value).abs();
    Ok(ChiInfBeta {
        x,
        value,
        quadrature_error: qerr,
        truncation_error,
        error: qerr + truncation_error,
        table,
        method: "beta-integral".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtEstimate {
    pub l: f64,
    pub samples: u64,
    pub seed: u64,
    pub value: f64,
    pub mc_error: f64,
    /// `|J_L - J_{L/2}|` on the same samples.
    pub bias: f64,
    pub error: f64,
    /// Some block vanishes identically, so its weight is the constant `L` per place.
    pub degenerate: bool,
}

fn det_f64(mut a: Vec<Vec<f64>>) -> f64 {
    let n = a.len();
    let mut det = 1.0;
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap_or(c);
        if a[piv][c] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap(piv, c);
            det = -det;
        }
        det *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    det
}

/// `|det E|` for the map from basis coordinates to place coordinates
/// (real embeddings, then real and imaginary parts at complex places).
pub fn place_jacobian(field: &crate::field::FieldDescriptor) -> f64 {
    let n = field.degree();
    let emb = field.basis_embeddings();
    let mut rows = vec![vec![0.0; n]; n];
    for (k, row) in rows.iter_mut().enumerate() {
        let mut col = 0;
        for l in 0..field.n1() {
            row[col] = emb[l][k].re;
            col += 1;
        }
        for l in field.n1()..field.n1() + field.n2() {
            row[col] = emb[l][k].re;
            row[col + 1] = -emb[l][k].im;
            col += 2;
        }
    }
    det_f64(rows).abs()
}

/// Monte-Carlo estimate of `J_L = int_{B^{sm}} prod_{rho, j} w_L(Phi_j^(rho)(y)) dy`, with
/// `w_hat_L` at real places and `w_hat_L(2 Re) w_hat_L(2 Im)` at complex places,
/// normalized by `|det E|^{-Rr}`.
pub fn chi_inf_schmidt(sys: &MultilinearSystem, l: f64, samples: u64, seed: u64) -> Result<SchmidtEstimate> {
    if !(l > 0.0) {
        return Err(Error::InvalidArgument("L must be positive".into()));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("at least one sample is required".into()));
    }
    let field = &sys.field;
    let n = sys.n();
    let nms = sys.nms();
    let comps: Vec<Vec<CompiledPoly>> = sys.all_blocks().map(|b| field.real_components(b).iter().map(|q| q.compile()).collect()).collect();
    let degenerate = sys.all_blocks().any(|b| b.is_zero());
    let emb = field.basis_embeddings().clone();
    let (n1, n2) = (field.n1(), field.n2());
    let weight = |coords: &[f64], lw: f64| -> f64 {
        let mut w = 1.0;
        for pl in 0..n1 + n2 {
            let z: Complex64 = (0..n).map(|k| emb[pl][k] * coords[k]).sum();
            if pl < n1 {
                w *= w_hat(lw, z.re);
            } else {
                w *= w_hat(lw, 2.0 * z.re) * w_hat(lw, 2.0 * z.im);
            }
            if w == 0.0 {
                break;
            }
        }
        w
    };
    let batch = 1u64 << 14;
    let nb = samples.div_ceil(batch);
    let parts: Vec<[f64; 4]> = (0..nb)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i);
            let count = batch.min(samples - i * batch);
            let mut y = vec![0.0; nms];
            let mut coords = vec![0.0; n];
            let mut acc = [0.0; 4];
            for _ in 0..count {
                for v in y.iter_mut() {
                    *v = rng.gen_range(-1.0..1.0);
                }
                let (mut wl, mut wh) = (1.0, 1.0);
                for block in &comps {
                    for (c, p) in coords.iter_mut().zip(block) {
                        *c = p.eval(&y);
                    }
                    wl *= weight(&coords, l);
                    wh *= weight(&coords, l / 2.0);
                    if wl == 0.0 && wh == 0.0 {
                        break;
                    }
                }
                acc[0] += wl;
                acc[1] += wl * wl;
                acc[2] += wh;
                acc[3] += wh * wh;
            }
            acc
        })
        .collect();
    let mut s = [0.0; 4];
    for p in parts {
        for k in 0..4 {
            s[k] += p[k];
        }
    }
    let nf = samples as f64;
    let scale = 2f64.powi(nms as i32) / place_jacobian(field).powi((sys.big_r() * sys.r()) as i32);
    let mean = s[0] / nf;
    let var = (s[1] / nf - mean * mean).max(0.0);
    let value = scale * mean;
    let mc_error = scale * (var / nf).sqrt();
    let half = scale * s[2] / nf;
    let bias = (value - half).abs();
    Ok(SchmidtEstimate { l, samples, seed, value, mc_error, bias, error: (mc_error * mc_error + bias * bias).sqrt(), degenerate })
}

/// Least-squares slope of `ys` against `xs`.
pub fn lsq_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::DegenerateData("need at least two paired values".into()));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 || !sxx.is_finite() {
        return Err(Error::DegenerateData("abscissae do not vary".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Log-log slope of `|v_1(t beta)|` over the given `t`.
pub fn v1_decay_slope(sys: &MultilinearSystem, beta: &[Vec<Vec<f64>>], ts: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let flat = flatten_beta(sys, beta)?;
    let rf = RealForm::new(sys);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &t in ts {
        let b: Vec<f64> = flat.iter().map(|v| v * t).collect();
        let v = integrate_phase(&rf.poly(&b), sys.nms(), 1.0, spec).value().norm();
        xs.push(t.ln());
        ys.push(v.max(f64::MIN_POSITIVE).ln());
    }
    lsq_slope(&xs, &ys)
}
