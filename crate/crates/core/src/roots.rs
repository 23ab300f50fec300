//! Integer polynomial utilities: squarefree and rational-root checks,
//! discriminants via power sums, and complex roots refined to a requested
//! number of decimal digits.
//!
//! Polynomials are coefficient vectors in ascending order (`c[0] + c[1] x + ...`).

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::linalg::{determinant, Rat};

/// A root of the minimal polynomial at two precisions.
#[derive(Debug, Clone, PartialEq)]
pub struct Root {
    pub value: Complex64,
    /// Decimal expansions with `digits` fractional digits.
    pub re_digits: String,
    pub im_digits: String,
}

fn trim_rat(p: &mut Vec<Rat>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn rat_poly_rem(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut r = a.to_vec();
    trim_rat(&mut r);
    let db = b.len() - 1;
    let lead = b[db].clone();
    while r.len() > db && !(r.len() == 1 && r[0].is_zero()) {
        let shift = r.len() - 1 - db;
        let f = r.last().unwrap() / &lead;
        for (i, bi) in b.iter().enumerate() {
            let v = &f * bi;
            r[i + shift] -= v;
        }
        r.pop();
        trim_rat(&mut r);
    }
    r
}

fn rat_poly_gcd_degree(a: &[Rat], b: &[Rat]) -> usize {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_rat(&mut x);
    trim_rat(&mut y);
    while !(y.len() == 1 && y[0].is_zero()) {
        let r = rat_poly_rem(&x, &y);
        x = y;
        y = r;
    }
    x.len() - 1
}

pub fn is_squarefree(p: &[BigInt]) -> bool {
    let a: Vec<Rat> = p.iter().map(|c| Rat::from_integer(c.clone())).collect();
    let d: Vec<Rat> = p
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| Rat::from_integer(c * BigInt::from(i)))
        .collect();
    if d.is_empty() {
        return true;
    }
    rat_poly_gcd_degree(&a, &d) == 0
}

fn eval_rat(p: &[BigInt], x: &Rat) -> Rat {
    p.iter()
        .rev()
        .fold(Rat::zero(), |acc, c| acc * x + Rat::from_integer(c.clone()))
}

/// Rational roots of a monic integer polynomial are integer divisors of the constant term.
pub fn rational_root(p: &[BigInt]) -> Option<BigInt> {
    let c0 = p[0].abs();
    if c0.is_zero() {
        return Some(BigInt::zero());
    }
    let c = c0.to_u64()?;
    let mut d = 1u64;
    while d * d <= c {
        if c % d == 0 {
            for cand in [d, c / d] {
                for s in [1i64, -1] {
                    let x = BigInt::from(cand) * s;
                    if eval_rat(p, &Rat::from_integer(x.clone())).is_zero() {
                        return Some(x);
                    }
                }
            }
        }
        d += 1;
    }
    None
}

/// Power sums `p_k = sum of theta_i^k` for k in 0..count, via Newton's identities.
pub fn power_sums(p: &[BigInt], count: usize) -> Vec<BigInt> {
    let n = p.len() - 1;
    let a = |i: usize| -> &BigInt { &p[i] };
    let mut s: Vec<BigInt> = Vec::with_capacity(count);
    for k in 0..count {
        if k == 0 {
            s.push(BigInt::from(n));
            continue;
        }
        let mut acc = BigInt::zero();
        if k <= n {
            for i in 1..k {
                acc += a(n - i) * &s[k - i];
            }
            acc += a(n - k) * BigInt::from(k);
        } else {
            for i in 1..=n {
                acc += a(n - i) * &s[k - i];
            }
        }
        s.push(-acc);
    }
    s
}

/// Discriminant as the determinant of the trace form on the power basis.
pub fn discriminant(p: &[BigInt]) -> BigInt {
    let n = p.len() - 1;
    let s = power_sums(p, 2 * n);
    let m: Vec<Vec<Rat>> = (0..n)
        .map(|i| (0..n).map(|j| Rat::from_integer(s[i + j].clone())).collect())
        .collect();
    determinant(&m).to_integer()
}

fn eval_c(p: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        df = df * z + f;
        f = f * z + c;
    }
    (f, df)
}

/// Simultaneous root approximation (Aberth–Ehrlich) in double precision.
pub fn aberth(p: &[f64]) -> Vec<Complex64> {
    let n = p.len() - 1;
    let lead = p[n];
    let bound = 1.0 + p[..n].iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(0.5 * bound, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (f, df) = eval_c(p, z[i]);
            if f.norm() == 0.0 {
                continue;
            }
            let ratio = f / df;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            z[i] -= w;
            moved = moved.max(w.norm());
        }
        if moved < 1e-15 * bound {
            break;
        }
    }
    z
}

/// Fixed-point complex numbers scaled by 2^bits.
#[derive(Clone, Debug)]
struct Fx {
    re: BigInt,
    im: BigInt,
}

impl Fx {
    fn from_f64(z: Complex64, bits: usize) -> Fx {
        let conv = |x: f64| -> BigInt {
            let (m, e) = frexp(x);
            let mant = BigInt::from((m * (1u64 << 53) as f64) as i64);
            let sh = e - 53 + bits as i64;
            if sh >= 0 {
                mant << (sh as usize)
            } else {
                mant >> ((-sh) as usize)
            }
        };
        Fx { re: conv(z.re), im: conv(z.im) }
    }
    fn mul(&self, o: &Fx, bits: usize) -> Fx {
        Fx {
            re: (&self.re * &o.re - &self.im * &o.im) >> bits,
            im: (&self.re * &o.im + &self.im * &o.re) >> bits,
        }
    }
    fn div(&self, o: &Fx, bits: usize) -> Option<Fx> {
        let den = &o.re * &o.re + &o.im * &o.im;
        if den.is_zero() {
            return None;
        }
        let nre = (&self.re * &o.re + &self.im * &o.im) << bits;
        let nim = (&self.im * &o.re - &self.re * &o.im) << bits;
        Some(Fx { re: nre.div_floor(&den), im: nim.div_floor(&den) })
    }
    fn magnitude_bits(&self) -> u64 {
        self.re.bits().max(self.im.bits())
    }
}

fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 {
        return (0.0, 0);
    }
    let e = x.abs().log2().floor() as i64 + 1;
    (x / 2f64.powi(e as i32), e)
}

fn fx_to_decimal(v: &BigInt, bits: usize, digits: u32) -> String {
    let neg = v.is_negative();
    let scaled = (v.abs() * BigInt::from(10).pow(digits)) >> bits;
    let s = scaled.to_string();
    let d = digits as usize;
    let s = if s.len() <= d { format!("{}{}", "0".repeat(d + 1 - s.len()), s) } else { s };
    let (ip, fp) = s.split_at(s.len() - d);
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

fn fx_to_f64(v: &BigInt, bits: usize) -> f64 {
    let shift = v.bits().saturating_sub(60) as usize;
    let top = (v >> shift).to_f64().unwrap_or(0.0);
    top * 2f64.powi(shift as i32 - bits as i32)
}

/// Refines every root of the integer polynomial to `digits` decimal digits and
/// checks that distinct roots stay separated at that precision.
pub fn isolate_roots(p: &[BigInt], digits: u32) -> Result<Vec<Root>> {
    let n = p.len() - 1;
    let pf: Vec<f64> = p.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
    if pf.iter().any(|c| !c.is_finite()) {
        return Err(Error::PrecisionFailure("coefficients exceed double range".into()));
    }
    let approx = aberth(&pf);
    let bits = (digits as f64 * std::f64::consts::LOG2_10).ceil() as usize + 32;
    let coeffs: Vec<Fx> = p
        .iter()
        .map(|c| Fx { re: c << bits, im: BigInt::zero() })
        .collect();
    let mut out = Vec::with_capacity(n);
    for z0 in approx {
        let mut z = Fx::from_f64(z0, bits);
        let mut converged = false;
        for _ in 0..200 {
            let mut f = Fx { re: BigInt::zero(), im: BigInt::zero() };
            let mut df = f.clone();
            for c in coeffs.iter().rev() {
                df = df.mul(&z, bits);
                df.re += &f.re;
                df.im += &f.im;
                f = f.mul(&z, bits);
                f.re += &c.re;
                f.im += &c.im;
            }
            let Some(step) = f.div(&df, bits) else {
                return Err(Error::PrecisionFailure("vanishing derivative at a root".into()));
            };
            z.re -= &step.re;
            z.im -= &step.im;
            // step below 2^-(bits-16)
            if step.magnitude_bits() <= 16 {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::PrecisionFailure(format!(
                "Newton refinement did not reach {digits} digits"
            )));
        }
        out.push(z);
    }
    // snap near-real roots onto the real axis
    let real_tol_bits = bits / 2;
    for z in out.iter_mut() {
        if z.im.bits() as usize <= real_tol_bits {
            z.im = BigInt::zero();
        }
    }
    // separation: distinct refined roots must differ well above the working precision
    for i in 0..n {
        for j in (i + 1)..n {
            let dre = &out[i].re - &out[j].re;
            let dim = &out[i].im - &out[j].im;
            let mag = dre.bits().max(dim.bits()) as usize;
            if mag <= real_tol_bits {
                return Err(Error::PrecisionFailure(format!(
                    "roots {i} and {j} are not separated at {digits} digits"
                )));
            }
        }
    }
    Ok(out
        .into_iter()
        .map(|z| Root {
            value: Complex64::new(fx_to_f64(&z.re, bits), fx_to_f64(&z.im, bits)),
            re_digits: fx_to_decimal(&z.re, bits, digits),
            im_digits: fx_to_decimal(&z.im, bits, digits),
        })
        .collect())
}

pub fn is_monic(p: &[BigInt]) -> bool {
    p.last().is_some_and(|c| c.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&ints(&[1, 0, 1])), BigInt::from(-4));
        assert_eq!(discriminant(&ints(&[-5, 0, 1])), BigInt::from(20));
        // x^3 - 2: disc = -108
        assert_eq!(discriminant(&ints(&[-2, 0, 0, 1])), BigInt::from(-108));
        assert_eq!(discriminant(&ints(&[0, 1])), BigInt::from(1));
    }

    #[test]
    fn squarefree_and_rational_roots() {
        assert!(is_squarefree(&ints(&[1, 0, 1])));
        assert!(!is_squarefree(&ints(&[1, 2, 1])));
        assert_eq!(rational_root(&ints(&[-4, 0, 1])), Some(BigInt::from(2)));
        assert_eq!(rational_root(&ints(&[1, 0, 1])), None);
    }

    #[test]
    fn roots_to_high_precision() {
        let r = isolate_roots(&ints(&[-2, 0, 1]), 40).unwrap();
        let pos = r.iter().find(|x| x.value.re > 0.0).unwrap();
        assert!(pos.re_digits.starts_with("1.4142135623730950488016887242096980785696"));
        assert_eq!(pos.im_digits.trim_start_matches('-'), format!("0.{}", "0".repeat(40)));
        let g = isolate_roots(&ints(&[1, 0, 1]), 64).unwrap();
        assert!(g.iter().all(|x| (x.value.norm() - 1.0).abs() < 1e-14));
    }
}
