//! TOML experiment configuration: parsing, validation and canonical echo.

use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arch::QuadratureSpec;
use crate::counting::{ArcParameters, ExpSumRoute, DEFAULT_POINT_BUDGET, DEFAULT_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::field::{AlgebraicNumber, FieldDescriptor, DEFAULT_PRECISION_DIGITS};
use crate::forms::FormSystem;
use crate::hasse::HasseSpec;
use crate::linalg::{format_rational, parse_rational, Rat};
use crate::local::{DEFAULT_LOCAL_BUDGET, DEFAULT_RESIDUE_LIMIT, DEFAULT_TOLERANCE};
use crate::poly::KPoly;

/// An integer or a rational written as a string (`"-3/4"`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Int(i64),
    Str(String),
}

impl Scalar {
    pub fn to_rational(&self) -> Result<Rat> {
        match self {
            Scalar::Int(v) => Ok(Rat::from_integer((*v).into())),
            Scalar::Str(s) => parse_rational(s),
        }
    }

    fn canonical(q: &Rat) -> Self {
        Scalar::Str(format_rational(q))
    }
}

/// A field element: a single rational, or its coordinates in the integral basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coeff {
    Rational(Scalar),
    Coords(Vec<Scalar>),
}

impl Coeff {
    pub fn to_element(&self, field: &FieldDescriptor) -> Result<AlgebraicNumber> {
        match self {
            Coeff::Rational(s) => Ok(field.from_rational(&s.to_rational()?)),
            Coeff::Coords(v) => {
                if v.len() != field.degree() {
                    return Err(Error::Config(format!(
                        "coefficient has {} coordinates, field degree is {}",
                        v.len(),
                        field.degree()
                    )));
                }
                Ok(AlgebraicNumber::new(v.iter().map(Scalar::to_rational).collect::<Result<_>>()?))
            }
        }
    }

    fn canonical(a: &AlgebraicNumber) -> Self {
        Coeff::Coords(a.coords.iter().map(Scalar::canonical).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldConfig {
    /// Ascending coefficients of the monic minimal polynomial.
    pub min_poly: Vec<Scalar>,
    /// Rows give the basis elements in power-basis coordinates; identity if absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<Scalar>>>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub class_number_one: bool,
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION_DIGITS
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig { min_poly: vec![Scalar::Int(0), Scalar::Int(1)], basis: None, precision: DEFAULT_PRECISION_DIGITS, class_number_one: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub exponents: Vec<u16>,
    pub coeff: Coeff,
}

/// One form, either as `sum_i c_i x_i^d` or as a list of monomials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonal: Option<Vec<Coeff>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub terms: Vec<TermConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default = "one")]
    pub m: usize,
    /// Asserted `dim sing* F`, used only for condition flags.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sing_dim: Option<u64>,
    pub forms: Vec<FormConfig>,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    /// Worker threads; 0 lets the pool decide.
    pub threads: usize,
    /// Zero all wall-times in reports.
    pub deterministic: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { seed: 1, threads: 0, deterministic: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMethod {
    /// Histogram when the system is one diagonal form and `m = 1`, else expanded.
    Auto,
    Expanded,
    Parametric,
    Histogram,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountConfig {
    pub p: Vec<i64>,
    pub method: CountMethod,
    pub budget: u64,
}

impl Default for CountConfig {
    fn default() -> Self {
        CountConfig { p: vec![1, 2], method: CountMethod::Auto, budget: DEFAULT_POINT_BUDGET as u64 }
    }
}

/// `alpha` as `R x r x n` exact basis coordinates or as real coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlphaConfig {
    Exact(Vec<Vec<Vec<String>>>),
    Real(Vec<Vec<Vec<f64>>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpSumConfig {
    pub p: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaConfig>,
    pub route: ExpSumRoute,
    pub budget: u64,
    /// Arc exponent, a rational string in `(0, 1]`.
    pub theta: String,
    pub c1: f64,
    pub c2: f64,
    pub search_budget: u64,
}

impl Default for ExpSumConfig {
    fn default() -> Self {
        ExpSumConfig {
            p: 2,
            alpha: None,
            route: ExpSumRoute::VArith,
            budget: DEFAULT_POINT_BUDGET as u64,
            theta: "1/2".into(),
            c1: 1.0,
            c2: 1.0,
            search_budget: DEFAULT_SEARCH_BUDGET as u64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalConfig {
    /// Primes with `Nm p <= q_bound` enter the Euler product.
    pub q_bound: u64,
    pub j_max: u32,
    pub tolerance: f64,
    pub residue_limit: u64,
    pub budget: u64,
    /// Bound for the truncated singular series; 0 skips it.
    pub series_q: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_height: Option<i64>,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            q_bound: 10,
            j_max: 24,
            tolerance: DEFAULT_TOLERANCE,
            residue_limit: DEFAULT_RESIDUE_LIMIT as u64,
            budget: DEFAULT_LOCAL_BUDGET as u64,
            series_q: 0,
            series_height: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchConfig {
    /// Truncation of the beta-integral.
    pub x: f64,
    pub schmidt_l: f64,
    pub samples: u64,
    /// Point `beta` (`R x r x n` real coordinates) for `v_1`, place factors and scaling.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<Vec<f64>>>>,
    pub scaling_p: Vec<f64>,
    pub quadrature: QuadratureSpec,
}

impl Default for ArchConfig {
    fn default() -> Self {
        ArchConfig { x: 50.0, schmidt_l: 8.0, samples: 1_000_000, beta: None, scaling_p: vec![2.0, 3.0], quadrature: QuadratureSpec::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HasseConfig {
    pub p: Vec<i64>,
    pub q_bound: u64,
    pub probe_samples: usize,
    pub probe_height: i64,
}

impl Default for HasseConfig {
    fn default() -> Self {
        HasseConfig { p: vec![10, 20, 40], q_bound: 20, probe_samples: 32, probe_height: 2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundsConfig {
    pub d_min: u64,
    pub d_max: u64,
    pub big_r: u64,
    pub m: u64,
}

impl Default for BoundsConfig {
    fn default() -> Self {
        BoundsConfig { d_min: 2, d_max: 5, big_r: 1, m: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub field: FieldConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub system: Option<SystemConfig>,
    #[serde(default)]
    pub run: RunConfig,
    #[serde(default)]
    pub count: CountConfig,
    #[serde(default)]
    pub expsum: ExpSumConfig,
    #[serde(default)]
    pub local: LocalConfig,
    #[serde(default)]
    pub arch: ArchConfig,
    #[serde(default)]
    pub hasse: HasseConfig,
    #[serde(default)]
    pub bounds: BoundsConfig,
}

/// A configuration with its field and form system built.
#[derive(Debug, Clone)]
pub struct Validated {
    pub config: Config,
    pub field: Arc<FieldDescriptor>,
    pub system: Option<FormSystem>,
}

impl Validated {
    pub fn system(&self) -> Result<&FormSystem> {
        self.system.as_ref().ok_or_else(|| Error::Config("[system]: this command needs a form system".into()))
    }

    pub fn arc_parameters(&self) -> Result<ArcParameters> {
        let e = &self.config.expsum;
        ArcParameters::new(parse_rational(&e.theta)?, e.c1, e.c2)
    }

    pub fn hasse_spec(&self) -> HasseSpec {
        let c = &self.config;
        HasseSpec {
            j_max: c.local.j_max,
            tolerance: c.local.tolerance,
            residue_limit: c.local.residue_limit as u128,
            point_budget: c.count.budget as u128,
            arch_x: c.arch.x,
            quadrature: c.arch.quadrature.clone(),
            schmidt_l: c.arch.schmidt_l,
            schmidt_samples: c.arch.samples,
            seed: c.run.seed,
            sing_dim: c.system.as_ref().and_then(|s| s.sing_dim),
            probe_samples: c.hasse.probe_samples,
            probe_height: c.hasse.probe_height,
        }
    }
}

/// 1-based line of the `occurrence`-th header `header` in `text`.
fn header_line(text: &str, header: &str, occurrence: usize) -> Option<usize> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.trim_start().starts_with(header))
        .nth(occurrence)
        .map(|(i, _)| i + 1)
}

fn anchored(text: &str, header: &str, occurrence: usize, msg: impl std::fmt::Display) -> Error {
    match header_line(text, header, occurrence) {
        Some(line) => Error::Config(format!("line {line}: {header}: {msg}")),
        None => Error::Config(format!("{header}: {msg}")),
    }
}

fn build_field(fc: &FieldConfig) -> Result<(FieldDescriptor, FieldConfig)> {
    let min_poly: Vec<BigInt> = fc
        .min_poly
        .iter()
        .map(|c| {
            let q = c.to_rational()?;
            if !q.is_integer() {
                return Err(Error::Config(format!("min_poly coefficient {} is not an integer", format_rational(&q))));
            }
            Ok(q.to_integer())
        })
        .collect::<Result<_>>()?;
    if min_poly.len() < 2 {
        return Err(Error::Config("min_poly needs at least two coefficients".into()));
    }
    let n = min_poly.len() - 1;
    let basis = match &fc.basis {
        Some(rows) => rows.iter().map(|r| r.iter().map(Scalar::to_rational).collect::<Result<Vec<_>>>()).collect::<Result<Vec<_>>>()?,
        None => FieldDescriptor::power_basis(n),
    };
    if !(8..=512).contains(&fc.precision) {
        return Err(Error::Config(format!("precision {} outside 8..=512 digits", fc.precision)));
    }
    let field = FieldDescriptor::build(&min_poly, basis.clone(), fc.precision)?.with_class_number_one(fc.class_number_one);
    let canon = FieldConfig {
        min_poly: min_poly.iter().map(|c| Scalar::canonical(&Rat::from_integer(c.clone()))).collect(),
        basis: fc.basis.as_ref().map(|_| basis.iter().map(|r| r.iter().map(Scalar::canonical).collect()).collect()),
        precision: fc.precision,
        class_number_one: fc.class_number_one,
    };
    Ok((field, canon))
}

fn build_form(field: &FieldDescriptor, f: &FormConfig, d: Option<usize>, s: Option<usize>) -> Result<(KPoly, FormConfig, usize, usize)> {
    match (&f.diagonal, f.terms.is_empty()) {
        (Some(diag), true) => {
            let d = d.ok_or_else(|| Error::Config("diagonal forms need the degree d".into()))?;
            let s = s.unwrap_or(diag.len());
            if diag.len() != s {
                return Err(Error::Config(format!("diagonal has {} coefficients, s = {s}", diag.len())));
            }
            let coeffs: Vec<AlgebraicNumber> = diag.iter().map(|c| c.to_element(field)).collect::<Result<_>>()?;
            let mut p = KPoly::zero(s);
            for (i, c) in coeffs.iter().enumerate() {
                let mut e = vec![0u16; s];
                e[i] = d as u16;
                p.add_term(e, c.clone());
            }
            let canon = FormConfig { diagonal: Some(coeffs.iter().map(Coeff::canonical).collect()), terms: vec![] };
            Ok((p, canon, d, s))
        }
        (None, false) => {
            let s = s.unwrap_or(f.terms[0].exponents.len());
            let d = d.unwrap_or(f.terms[0].exponents.iter().map(|&k| k as usize).sum());
            let mut p = KPoly::zero(s);
            let mut terms = Vec::with_capacity(f.terms.len());
            for t in &f.terms {
                if t.exponents.len() != s {
                    return Err(Error::Config(format!("exponent vector of length {}, s = {s}", t.exponents.len())));
                }
                let c = t.coeff.to_element(field)?;
                p.add_term(t.exponents.clone(), c.clone());
                terms.push(TermConfig { exponents: t.exponents.clone(), coeff: Coeff::canonical(&c) });
            }
            if p.is_zero() {
                return Err(Error::Config("form is identically zero".into()));
            }
            Ok((p, FormConfig { diagonal: None, terms }, d, s))
        }
        _ => Err(Error::Config("give exactly one of `diagonal` or `terms`".into())),
    }
}

fn check(cond: bool, text: &str, header: &str, msg: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(anchored(text, header, 0, msg))
    }
}

fn validate_budgets(text: &str, c: &Config) -> Result<()> {
    check(!c.count.p.is_empty() && c.count.p.iter().all(|&p| p >= 1), text, "[count]", "every P must be at least 1")?;
    check(c.count.budget > 0, text, "[count]", "budget must be positive")?;
    check(c.expsum.p >= 1, text, "[expsum]", "P must be at least 1")?;
    check(c.expsum.budget > 0 && c.expsum.search_budget > 0, text, "[expsum]", "budgets must be positive")?;
    check(c.expsum.c1 > 0.0 && c.expsum.c2 > 0.0, text, "[expsum]", "c1 and c2 must be positive")?;
    let theta = parse_rational(&c.expsum.theta).map_err(|e| anchored(text, "[expsum]", 0, e))?;
    ArcParameters::new(theta, 1.0, 1.0).map_err(|e| anchored(text, "[expsum]", 0, e))?;
    check(c.local.j_max >= 2, text, "[local]", "j_max must be at least 2")?;
    check(c.local.tolerance > 0.0, text, "[local]", "tolerance must be positive")?;
    check(c.local.residue_limit > 0 && c.local.budget > 0, text, "[local]", "budgets must be positive")?;
    check(c.arch.x > 0.0 && c.arch.schmidt_l > 0.0, text, "[arch]", "x and schmidt_l must be positive")?;
    check(c.arch.samples >= 2, text, "[arch]", "samples must be at least 2")?;
    check(c.arch.scaling_p.iter().all(|&p| p > 0.0), text, "[arch]", "scaling_p entries must be positive")?;
    let q = &c.arch.quadrature;
    check(q.order >= 2 && q.min_panels >= 1 && q.max_evals > 0 && q.samples > 0, text, "[arch]", "quadrature settings must be positive")?;
    check(c.hasse.p.iter().all(|&p| p >= 1), text, "[hasse]", "every P must be at least 1")?;
    check(c.bounds.d_min <= c.bounds.d_max && c.bounds.big_r >= 1 && c.bounds.m >= 1, text, "[bounds]", "need d_min <= d_max and R, m >= 1")?;
    Ok(())
}

/// Checks that a tensor has shape `R x r x n`.
fn check_tensor(text: &str, header: &str, lens: Option<Vec<Vec<usize>>>, what: &str, dims: (usize, usize, usize)) -> Result<()> {
    let (big_r, r, n) = dims;
    let ok = match lens {
        None => true,
        Some(l) => l.len() == big_r && l.iter().all(|row| row.len() == r && row.iter().all(|&k| k == n)),
    };
    check(ok, text, header, &format!("{what} must have shape R x r x n = {big_r} x {r} x {n}"))
}

/// Parses and validates a configuration; returns it with defaults filled and
/// every exact value in canonical form.
pub fn parse_config(text: &str) -> Result<Validated> {
    let raw: Config = toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim_end().to_string()))?;
    let (field, field_canon) = build_field(&raw.field).map_err(|e| anchored(text, "[field]", 0, e))?;
    let field = Arc::new(field);
    let mut config = raw.clone();
    config.field = field_canon;
    validate_budgets(text, &config)?;

    let system = match &raw.system {
        None => None,
        Some(sc) => {
            if sc.forms.is_empty() {
                return Err(anchored(text, "[system]", 0, "at least one form is required"));
            }
            if sc.m == 0 {
                return Err(anchored(text, "[system]", 0, "m must be at least 1"));
            }
            let (mut d, mut s) = (sc.d, sc.s);
            let mut polys = Vec::new();
            let mut canon = Vec::new();
            for (i, f) in sc.forms.iter().enumerate() {
                let (p, fc, dd, ss) = build_form(&field, f, d, s).map_err(|e| anchored(text, "[[system.forms]]", i, format!("form {}: {e}", i + 1)))?;
                d = Some(dd);
                s = Some(ss);
                polys.push(p);
                canon.push(fc);
            }
            let (d, s) = (d.unwrap_or(0), s.unwrap_or(0));
            let sys = FormSystem::new(field.clone(), s, d, polys).map_err(|e| anchored(text, "[system]", 0, e))?;
            let r = crate::bounds::r_value(sc.m as u64, d as u64);
            let r: usize = r.try_into().map_err(|_| anchored(text, "[system]", 0, "r(m, d) is too large"))?;
            let (n, big_r) = (field.degree(), sys.big_r());
            let dims = (big_r, r, n);
            let alpha_lens = config.expsum.alpha.as_ref().map(|a| match a {
                AlphaConfig::Exact(a) => a.iter().map(|x| x.iter().map(Vec::len).collect()).collect(),
                AlphaConfig::Real(a) => a.iter().map(|x| x.iter().map(Vec::len).collect()).collect(),
            });
            check_tensor(text, "[expsum]", alpha_lens, "alpha", dims)?;
            let beta_lens = config.arch.beta.as_ref().map(|b| b.iter().map(|x| x.iter().map(Vec::len).collect()).collect());
            check_tensor(text, "[arch]", beta_lens, "beta", dims)?;
            config.system = Some(SystemConfig { d: Some(d), s: Some(s), m: sc.m, sing_dim: sc.sing_dim, forms: canon });
            Some(sys)
        }
    };
    if let Some(AlphaConfig::Exact(a)) = &mut config.expsum.alpha {
        for row in a.iter_mut() {
            for el in row.iter_mut() {
                for c in el.iter_mut() {
                    *c = format_rational(&parse_rational(c).map_err(|e| anchored(text, "[expsum]", 0, e))?);
                }
            }
        }
    }
    Ok(Validated { config, field, system })
}

/// Canonical TOML for a configuration.
pub fn emit_config(c: &Config) -> Result<String> {
    toml::to_string(c).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "[field]\nmin_poly = [0, 1]\n\n[system]\nd = 2\n\n[[system.forms]]\ndiagonal = [1, 1, 1, -1, -1]\n";

    #[test]
    fn minimal_config_fills_defaults() {
        let v = parse_config(MINIMAL).unwrap();
        let sys = v.system.as_ref().unwrap();
        assert_eq!((sys.d, sys.s, sys.big_r()), (2, 5, 1));
        assert_eq!(v.config.field.precision, DEFAULT_PRECISION_DIGITS);
        assert_eq!(v.config.local.j_max, 24);
        let echo = emit_config(&v.config).unwrap();
        assert!(echo.contains("[local]") && echo.contains("j_max = 24"));
        assert!(echo.contains("s = 5"));
    }

    #[test]
    fn round_trip() {
        let texts = [
            MINIMAL.to_string(),
            "[field]\nmin_poly = [1, 0, 1]\nclass_number_one = true\n[system]\nm = 2\n[[system.forms]]\nterms = [{ exponents = [2, 0], coeff = [\"1/2\", 3] }, { exponents = [1, 1], coeff = \"-2\" }]\n[expsum]\nalpha = [[[\"2/4\", \"0\"], [\"1/3\", \"1\"], [\"0\", \"0\"]]]\n".to_string(),
        ];
        for t in texts {
            let a = parse_config(&t).unwrap().config;
            let b = parse_config(&emit_config(&a).unwrap()).unwrap().config;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn singular_basis_names_the_field_block() {
        let t = "# comment\n[field]\nmin_poly = [1, 0, 1]\nbasis = [[1, 2], [2, 4]]\n";
        let e = parse_config(t).unwrap_err().to_string();
        assert!(e.contains("line 2: [field]"), "{e}");
        assert!(e.contains("singular"), "{e}");
    }

    #[test]
    fn schema_errors_are_line_anchored() {
        let e = parse_config("[field]\nmin_poly = [0, 1]\nprecison = 3\n").unwrap_err().to_string();
        assert!(e.contains("line 3"), "{e}");
        let e = parse_config("[count]\np = [0]\n").unwrap_err().to_string();
        assert!(e.contains("line 1: [count]"), "{e}");
        let e = parse_config(&format!("{MINIMAL}[[system.forms]]\nterms = [{{ exponents = [3, 0, 0, 0, 0], coeff = 1 }}]\n")).unwrap_err().to_string();
        assert!(e.contains("[system]") && e.contains("degree"), "{e}");
    }

    #[test]
    fn coefficient_shapes() {
        let e = parse_config("[field]\nmin_poly = [1, 0, 1]\n[system]\nd = 2\n[[system.forms]]\ndiagonal = [[1, 2, 3]]\n").unwrap_err();
        assert!(e.to_string().contains("line 5"), "{e}");
        let e = parse_config(&format!("{MINIMAL}[arch]\nbeta = [[[0.1, 0.2]]]\n")).unwrap_err();
        assert!(e.to_string().contains("[arch]"), "{e}");
    }
}
