//! The headline experiment: growth of N_m(P) against the product of local densities.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arch::{chi_inf_beta, chi_inf_schmidt, lsq_slope, ChiInfBeta, QuadratureSpec, SchmidtEstimate};
use crate::bounds::{birch_threshold, local_threshold};
use crate::counting::{count_diagonal_histogram, count_expanded, growth_power, normalized_ratio, DEFAULT_POINT_BUDGET};
use crate::error::{Error, Result};
use crate::forms::{expand_system, jacobian_probe, FormSystem, JacobianReport};
use crate::linalg::{format_rational, rat, Rat};
use crate::local::{euler_product, ChiStatus, EulerProduct, DEFAULT_RESIDUE_LIMIT, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct HasseSpec {
    pub j_max: u32,
    pub tolerance: f64,
    pub residue_limit: u128,
    pub point_budget: u128,
    /// Truncation `X` of the beta-integral.
    pub arch_x: f64,
    pub quadrature: QuadratureSpec,
    pub schmidt_l: f64,
    pub schmidt_samples: u64,
    pub seed: u64,
    /// Asserted `dim sing* F`; derived automatically for nonsingular diagonal forms.
    pub sing_dim: Option<u64>,
    pub probe_samples: usize,
    pub probe_height: i64,
}

impl Default for HasseSpec {
    fn default() -> Self {
        HasseSpec {
            j_max: 24,
            tolerance: DEFAULT_TOLERANCE,
            residue_limit: DEFAULT_RESIDUE_LIMIT,
            point_budget: DEFAULT_POINT_BUDGET,
            arch_x: 200.0,
            quadrature: QuadratureSpec::default(),
            schmidt_l: 16.0,
            schmidt_samples: 4_000_000,
            seed: 1,
            sing_dim: None,
            probe_samples: 32,
            probe_height: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountRow {
    pub p: i64,
    pub count: u128,
    pub ratio: f64,
    pub method: String,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub s: u64,
    pub sing_dim: Option<u64>,
    pub sing_dim_source: String,
    pub birch_threshold: String,
    pub birch_ok: Option<bool>,
    pub local_threshold: String,
    pub local_ok: Option<bool>,
    /// Largest admissible `k = (s - dim sing*) / 2^{d-1}`, as an exact rational.
    pub k_available: Option<String>,
    /// `k > R(d-1)(Rr+1)`.
    pub k2_ok: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Positivity {
    pub real_guard: bool,
    pub reason: String,
    pub asserted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HasseReport {
    pub d: usize,
    pub s: usize,
    pub m: usize,
    pub big_r: usize,
    pub r: usize,
    pub n: usize,
    pub exponent: i64,
    pub q_bound: u64,
    pub rows: Vec<CountRow>,
    pub growth: Option<f64>,
    pub euler: Option<EulerProduct>,
    pub chi_inf_beta: Option<ChiInfBeta>,
    pub chi_inf_schmidt: Option<SchmidtEstimate>,
    /// `|beta-integral - Schmidt| <= 3 sqrt(err_1^2 + err_2^2)`.
    pub arch_agreement: Option<bool>,
    pub density_product: Option<f64>,
    /// `ratio / density_product - 1` at the largest P.
    pub relative_gap: Option<f64>,
    /// Distance of the ratio to the density product is non-increasing in P.
    pub ratio_trend_monotone: Option<bool>,
    pub flags: ConditionFlags,
    pub jacobian: JacobianReport,
    pub positivity: Positivity,
    pub errors: Vec<String>,
}

/// Least-squares slope of `log N` against `log P`.
pub fn growth_exponent(ps: &[f64], ns: &[f64]) -> Result<f64> {
    if ps.len() < 3 || ps.len() != ns.len() {
        return Err(Error::DegenerateData("at least three (P, N) pairs are needed".into()));
    }
    if ps.iter().chain(ns).any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::DegenerateData("P and N must be positive".into()));
    }
    let lx: Vec<f64> = ps.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ns.iter().map(|v| v.ln()).collect();
    lsq_slope(&lx, &ly)
}

fn condition_flags(sys: &FormSystem, m: usize, spec: &HasseSpec) -> ConditionFlags {
    let (d, big_r) = (sys.d as u64, sys.big_r() as u64);
    let r = crate::bounds::r_value(m as u64, d);
    let auto = sys
        .diagonal_coeffs()
        .filter(|c| c.iter().all(|x| !x.is_zero()))
        .map(|_| 0u64);
    let (sing_dim, source) = match (spec.sing_dim, auto) {
        (Some(v), _) => (Some(v), "asserted".to_string()),
        (None, Some(v)) => (Some(v), "nonsingular diagonal form".to_string()),
        (None, None) => (None, "unknown".to_string()),
    };
    let birch = birch_threshold(d, big_r, m as u64);
    let local = local_threshold(d, big_r, m as u64);
    let s = sys.s as u64;
    let avail = sing_dim.filter(|&v| v <= s).map(|v| Rat::new(((s - v) as i64).into(), (1i64 << (d - 1)).into()));
    let k2_rhs = Rat::from_integer(((big_r * (d - 1)) as i64).into()) * (Rat::from_integer(big_r.into()) * Rat::from_integer(r.clone()) + rat(1));
    ConditionFlags {
        s,
        sing_dim,
        sing_dim_source: source,
        birch_ok: sing_dim.map(|v| num_bigint::BigInt::from(s as i64 - v as i64) > birch),
        birch_threshold: birch.to_string(),
        local_ok: sing_dim.map(|v| num_bigint::BigInt::from(s as i64 - v as i64) > local),
        local_threshold: local.to_string(),
        k2_ok: avail.as_ref().map(|k| *k > k2_rhs),
        k_available: avail.as_ref().map(format_rational),
    }
}

/// Runs counts at each P, the Euler product over `Nm p <= q_bound`, both
/// archimedean estimators, and the condition checks. Failures of individual
/// stages are recorded in `errors` and the remaining stages still run.
pub fn run_hasse(sys: &FormSystem, m: usize, ps: &[i64], q_bound: u64, spec: &HasseSpec) -> Result<HasseReport> {
    let ms_sys = expand_system(sys, m)?;
    let exponent = growth_power(&ms_sys);
    let mut errors = Vec::new();
    let histogram = m == 1 && sys.big_r() == 1 && sys.diagonal_coeffs().is_some();
    let mut rows = Vec::new();
    for &p in ps {
        let t = Instant::now();
        let res = if histogram { count_diagonal_histogram(sys, p) } else { count_expanded(&ms_sys, p, spec.point_budget) };
        match res {
            Ok(count) => rows.push(CountRow {
                p,
                count,
                ratio: normalized_ratio(count, p, exponent),
                method: if histogram { "histogram" } else { "expanded" }.into(),
                elapsed_ms: t.elapsed().as_secs_f64() * 1e3,
            }),
            Err(e) => errors.push(format!("count at P = {p}: {e}")),
        }
    }
    let growth = if rows.len() >= 3 {
        let ps: Vec<f64> = rows.iter().map(|r| r.p as f64).collect();
        let ns: Vec<f64> = rows.iter().map(|r| r.count as f64).collect();
        growth_exponent(&ps, &ns).ok()
    } else {
        None
    };
    let euler = match euler_product(&ms_sys, q_bound, spec.j_max, spec.tolerance, spec.residue_limit) {
        Ok(e) => Some(e),
        Err(e) => {
            errors.push(format!("euler product: {e}"));
            None
        }
    };
    let beta = match chi_inf_beta(&ms_sys, spec.arch_x, &spec.quadrature) {
        Ok(b) => Some(b),
        Err(e) => {
            errors.push(format!("beta integral: {e}"));
            None
        }
    };
    let schmidt = match chi_inf_schmidt(&ms_sys, spec.schmidt_l, spec.schmidt_samples, spec.seed) {
        Ok(s) => Some(s),
        Err(e) => {
            errors.push(format!("schmidt estimator: {e}"));
            None
        }
    };
    let arch_agreement = match (&beta, &schmidt) {
        (Some(b), Some(s)) => Some((b.value - s.value).abs() <= 3.0 * (b.error * b.error + s.error * s.error).sqrt()),
        _ => None,
    };
    let density_product = match (&beta, &euler) {
        (Some(b), Some(e)) => e.value.map(|v| v * b.value),
        _ => None,
    };
    let relative_gap = match (density_product, rows.last()) {
        (Some(c), Some(row)) if c != 0.0 => Some(row.ratio / c - 1.0),
        _ => None,
    };
    let ratio_trend_monotone = density_product.filter(|_| rows.len() >= 2).map(|c| {
        rows.windows(2).all(|w| (w[1].ratio - c).abs() <= (w[0].ratio - c).abs())
    });
    let flags = condition_flags(sys, m, spec);
    let jacobian = jacobian_probe(sys, spec.probe_samples, spec.probe_height, spec.seed);
    let field = &sys.field;
    let (real_guard, reason) = if field.n1() == 0 {
        (true, "K is totally imaginary".to_string())
    } else if sys.d % 2 == 1 {
        (true, "d is odd".to_string())
    } else if m == 1 && jacobian.min_corank_on_variety == Some(0) {
        (true, "a nonsingular K-rational zero was found".to_string())
    } else {
        (false, "no real-solubility certificate".to_string())
    };
    let asserted = real_guard
        && euler.as_ref().is_some_and(|e| e.status == ChiStatus::Stabilized && e.value.is_some_and(|v| v > 0.0))
        && beta.as_ref().is_some_and(|b| b.value > 3.0 * b.error);
    Ok(HasseReport {
        d: sys.d,
        s: sys.s,
        m,
        big_r: sys.big_r(),
        r: ms_sys.r(),
        n: ms_sys.n(),
        exponent,
        q_bound,
        rows,
        growth,
        euler,
        chi_inf_beta: beta,
        chi_inf_schmidt: schmidt,
        arch_agreement,
        density_product,
        relative_gap,
        ratio_trend_monotone,
        flags,
        jacobian,
        positivity: Positivity { real_guard, reason, asserted },
        errors,
    })
}
