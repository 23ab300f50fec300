//! Fixed-width integer arithmetic in O_K for enumeration kernels.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::field::FieldDescriptor;
use crate::forms::MultilinearSystem;
use crate::linalg::common_denominator;
use crate::poly::KPoly;

pub const MAX_N: usize = 8;

/// Element of O_K as basis coordinates; entries past the degree are zero.
pub type IntElem = [i128; MAX_N];

pub const ZERO: IntElem = [0; MAX_N];

#[derive(Debug, Clone)]
pub struct IntField {
    pub n: usize,
    mt: Vec<i128>,
    gram: Vec<i128>,
}

impl IntField {
    pub fn new(field: &FieldDescriptor) -> Result<Self> {
        let n = field.degree();
        if n > MAX_N {
            return Err(Error::InvalidArgument(format!("field degree {n} exceeds {MAX_N}")));
        }
        let mt = field
            .mult_table()
            .iter()
            .flat_map(|a| a.iter().flat_map(|b| b.iter().map(|&x| x as i128)))
            .collect();
        let gram = field.trace_gram().iter().flatten().map(|&x| x as i128).collect();
        Ok(IntField { n, mt, gram })
    }

    #[inline]
    pub fn mul(&self, a: &IntElem, b: &IntElem) -> IntElem {
        let n = self.n;
        if n == 1 {
            let mut out = ZERO;
            out[0] = a[0] * b[0] * self.mt[0];
            return out;
        }
        let mut out = ZERO;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                let ab = a[i] * b[j];
                if ab == 0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for (k, o) in out.iter_mut().enumerate().take(n) {
                    *o += ab * self.mt[base + k];
                }
            }
        }
        out
    }

    /// `Tr(a b)` through the Gram matrix of the trace form.
    #[inline]
    pub fn trace_pair(&self, a: &IntElem, b: &IntElem) -> i128 {
        let n = self.n;
        let mut acc = 0;
        for i in 0..n {
            if a[i] == 0 {
                continue;
            }
            for j in 0..n {
                acc += a[i] * self.gram[i * n + j] * b[j];
            }
        }
        acc
    }

    /// `sum_{i,j} a_i G_{ij} b_j` with floating `a`.
    #[inline]
    pub fn trace_pair_f64(&self, a: &[f64], b: &IntElem) -> f64 {
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += a[i] * self.gram[i * n + j] as f64 * b[j] as f64;
            }
        }
        acc
    }

    pub fn from_coords(&self, c: &[i64]) -> IntElem {
        let mut out = ZERO;
        for (o, &x) in out.iter_mut().zip(c) {
            *o = x as i128;
        }
        out
    }
}

/// Polynomial with O_K coefficients scaled by a common denominator.
#[derive(Debug, Clone)]
pub struct IntPoly {
    pub nvars: usize,
    pub terms: Vec<(IntElem, Vec<(usize, u32)>)>,
}

impl IntPoly {
    /// `denom * p`, which must have integral coefficients.
    pub fn from_kpoly(p: &KPoly, denom: &BigInt) -> Result<Self> {
        let dq = crate::linalg::Rat::from_integer(denom.clone());
        let mut terms = Vec::with_capacity(p.terms.len());
        for (e, c) in &p.terms {
            let mut coef = ZERO;
            for (k, x) in c.coords.iter().enumerate() {
                let v = x * &dq;
                if !v.is_integer() {
                    return Err(Error::NonIntegralForm);
                }
                coef[k] = v.to_integer().to_i128().ok_or(Error::Overflow("form coefficient"))?;
            }
            let vars = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| (v, k as u32))
                .collect();
            terms.push((coef, vars));
        }
        Ok(IntPoly { nvars: p.nvars, terms })
    }

    #[inline]
    pub fn eval(&self, f: &IntField, x: &[IntElem]) -> IntElem {
        let n = f.n;
        let mut acc = ZERO;
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(v, k) in vars {
                for _ in 0..k {
                    t = f.mul(&t, &x[v]);
                }
            }
            for i in 0..n {
                acc[i] += t[i];
            }
        }
        acc
    }
}

/// All blocks of an expanded system, scaled to O_K coefficients by `denom`.
#[derive(Debug, Clone)]
pub struct IntSystem {
    pub field: IntField,
    pub blocks: Vec<IntPoly>,
    pub denom: BigInt,
    pub nvars: usize,
}

impl IntSystem {
    pub fn new(sys: &MultilinearSystem) -> Result<Self> {
        let field = IntField::new(&sys.field)?;
        let denom = common_denominator(sys.all_blocks().flat_map(|b| b.terms.values().flat_map(|c| c.coords.iter())));
        let blocks = sys.all_blocks().map(|b| IntPoly::from_kpoly(b, &denom)).collect::<Result<_>>()?;
        Ok(IntSystem { field, blocks, denom, nvars: sys.ms() })
    }

    pub fn denom_i128(&self) -> Result<i128> {
        self.denom.to_i128().ok_or(Error::Overflow("form denominator"))
    }

    pub fn is_integral(&self) -> bool {
        self.denom.is_one()
    }

    /// `denom * Phi_j(x)` for every block, in `(rho, j)` order.
    #[inline]
    pub fn eval_into(&self, x: &[IntElem], out: &mut [IntElem]) {
        for (o, b) in out.iter_mut().zip(&self.blocks) {
            *o = b.eval(&self.field, x);
        }
    }

    /// Splits real coordinates (`v * n + k`) into K-elements.
    #[inline]
    pub fn to_elems(&self, coords: &[i64], out: &mut [IntElem]) {
        let n = self.field.n;
        for (v, o) in out.iter_mut().enumerate() {
            *o = ZERO;
            for k in 0..n {
                o[k] = coords[v * n + k] as i128;
            }
        }
    }
}

/// Advances `x` through `[lo, hi]^len` in lexicographic order (last coordinate fastest).
#[inline]
pub fn odometer(x: &mut [i64], lo: i64, hi: i64) -> bool {
    for k in (0..x.len()).rev() {
        if x[k] < hi {
            x[k] += 1;
            return true;
        }
        x[k] = lo;
    }
    false
}
