//! Exact thresholds: the Birch-type condition, the local-solubility maximum,
//! Wooley's bound, and the N(d,k)/L(d) unirationality tower.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the decimal size of any tower value.
pub const DEFAULT_DIGIT_LIMIT: f64 = 1.0e6;

/// `binomial(n, k)` as a falling-factorial product; `n` may be huge, `k` small.
pub fn binomial(n: &BigInt, k: u64) -> BigInt {
    if n < &BigInt::from(k) {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

pub fn binomial_u64(n: u64, k: u64) -> u64 {
    binomial(&BigInt::from(n), k).to_u64().expect("binomial fits in u64")
}

fn pow(base: BigInt, e: u64) -> BigInt {
    num_traits::pow(base, e as usize)
}

/// `r = binomial(d - 1 + m, d)`.
pub fn r_value(m: u64, d: u64) -> BigInt {
    binomial(&BigInt::from(d - 1 + m), d)
}

/// `2^{d-1} (d-1) R r (R+1)`.
pub fn birch_threshold(d: u64, big_r: u64, m: u64) -> BigInt {
    pow(BigInt::from(2), d - 1) * (d - 1) * big_r * r_value(m, d) * (big_r + 1)
}

/// `(R^2 d^2 + m R)^{2^{d-2}} d^{2^{d-1}}`.
pub fn wooley_gamma_bound(big_r: u64, m: u64, d: u64) -> BigInt {
    let base = BigInt::from(big_r * big_r * d * d + m * big_r);
    pow(base, 1 << (d - 2)) * pow(BigInt::from(d), 1 << (d - 1))
}

/// `2^{d-1} (d-1) R max{ r(R+1), d^{2^{d-1}} (R^2 d^2 + R m)^{2^{d-2}} }`.
pub fn local_threshold(d: u64, big_r: u64, m: u64) -> BigInt {
    let first = r_value(m, d) * (big_r + 1);
    let second = wooley_gamma_bound(big_r, m, d);
    pow(BigInt::from(2), d - 1) * (d - 1) * big_r * first.max(second)
}

fn log10_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).log10()).sum()
}

/// Rough `log10 N(d, k)` used to refuse hopeless tower evaluations.
pub fn log10_n_hmp(d: u64, log10_k: f64) -> f64 {
    let k = 10f64.powf(log10_k);
    if d == 2 {
        return if log10_k < 15.0 {
            ((k + 1.0) * k / 2.0 + 3.0).log10()
        } else {
            2.0 * log10_k - 2f64.log10()
        };
    }
    let prev = log10_n_hmp(d - 1, log10_k);
    let a = (d - 1) as f64 * prev - log10_factorial(d - 1);
    let b = d as f64 * log10_k - log10_factorial(d);
    a.max(b).max(prev) + 0.5
}

fn log10_l(d: u64) -> f64 {
    if d <= 2 {
        return 0.0;
    }
    log10_n_hmp(d - 1, log10_l(d - 1).max(0.0))
}

fn check_digits(digits: f64, limit: f64) -> Result<()> {
    if !digits.is_finite() || digits > limit {
        return Err(Error::ResourceExceeded { digits });
    }
    Ok(())
}

/// `N(d, k)` of the unirationality recursion.
pub fn n_hmp(d: u64, k: &BigInt) -> Result<BigInt> {
    n_hmp_limited(d, k, DEFAULT_DIGIT_LIMIT)
}

pub fn n_hmp_limited(d: u64, k: &BigInt, limit: f64) -> Result<BigInt> {
    if d < 2 {
        return Err(Error::InvalidArgument("N(d, k) needs d >= 2".into()));
    }
    let lk = (k.bits() as f64) * 2f64.log10();
    check_digits(log10_n_hmp(d, lk), limit)?;
    Ok(n_hmp_exact(d, k))
}

fn n_hmp_exact(d: u64, k: &BigInt) -> BigInt {
    if d == 2 {
        return binomial(&(k + 1), 2) + 3;
    }
    let prev = n_hmp_exact(d - 1, k);
    binomial(&(&prev + d), d - 1) + &prev + binomial(&(k + d), d) + 2
}

/// `L(2) = 0`, `L(d) = N(d-1, L(d-1))`.
pub fn l_hmp(d: u64) -> Result<BigInt> {
    l_hmp_limited(d, DEFAULT_DIGIT_LIMIT)
}

pub fn l_hmp_limited(d: u64, limit: f64) -> Result<BigInt> {
    if d < 2 {
        return Err(Error::InvalidArgument("L(d) needs d >= 2".into()));
    }
    check_digits(log10_l(d), limit)?;
    let mut l = BigInt::zero();
    for e in 3..=d {
        l = n_hmp_exact(e - 1, &l);
    }
    Ok(l)
}

/// Memoized evaluation of the tower, kept as an independent route for cross-checks.
pub fn l_hmp_memo(d: u64) -> Result<BigInt> {
    use std::collections::HashMap;
    fn n_memo(d: u64, k: &BigInt, memo: &mut HashMap<(u64, BigInt), BigInt>) -> BigInt {
        if let Some(v) = memo.get(&(d, k.clone())) {
            return v.clone();
        }
        let v: BigInt = if d == 2 {
            k * (k + 1) / 2 + 3
        } else {
            let prev = n_memo(d - 1, k, memo);
            binomial(&(&prev + d), d - 1) + &prev + binomial(&(k + d), d) + 2
        };
        memo.insert((d, k.clone()), v.clone());
        v
    }
    check_digits(log10_l(d), DEFAULT_DIGIT_LIMIT)?;
    let mut memo = HashMap::new();
    let mut l = BigInt::zero();
    for e in 3..=d {
        l = n_memo(e - 1, &l, &mut memo);
    }
    Ok(l)
}

/// The strict lower bound `2^{d-1}(d-1)(d^2 + L(d) + 1)^{2^{d-2}} d^{2^{d-1}}` on `s`.
pub fn unirat_bound(d: u64) -> Result<BigInt> {
    if d < 2 {
        return Err(Error::InvalidArgument("unirationality bound needs d >= 2".into()));
    }
    let ll = log10_l(d);
    let digits = (1u64 << (d - 2)) as f64 * ll.max((d * d) as f64).max(1.0) + (1u64 << (d - 1)) as f64 * (d as f64).log10();
    check_digits(digits, DEFAULT_DIGIT_LIMIT)?;
    let l = l_hmp(d)?;
    let base = l + d * d + 1u64;
    Ok(pow(BigInt::from(2), d - 1) * (d - 1) * pow(base, 1 << (d - 2)) * pow(BigInt::from(d), 1 << (d - 1)))
}

/// Leading digits and decimal exponent of a positive integer.
pub fn scientific(x: &BigInt, digits: usize) -> (String, usize) {
    let s = x.to_string();
    let lead = s.chars().take(digits).collect();
    (lead, s.len() - 1)
}

/// One row of the bounds table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsRow {
    pub d: u64,
    pub r: String,
    pub birch: String,
    pub local: String,
    pub wooley: String,
    pub l: String,
    pub unirat: String,
}

/// Exact table for `d` in the range; oversized entries are reported by magnitude.
pub fn bounds_table(d_min: u64, d_max: u64, big_r: u64, m: u64) -> Vec<BoundsRow> {
    let show = |r: Result<BigInt>| match r {
        Ok(v) => v.to_string(),
        Err(Error::ResourceExceeded { digits }) => format!("~1e{digits:.0}"),
        Err(e) => e.to_string(),
    };
    (d_min.max(2)..=d_max)
        .map(|d| BoundsRow {
            d,
            r: r_value(m, d).to_string(),
            birch: birch_threshold(d, big_r, m).to_string(),
            local: local_threshold(d, big_r, m).to_string(),
            wooley: wooley_gamma_bound(big_r, m, d).to_string(),
            l: show(l_hmp(d)),
            unirat: show(unirat_bound(d)),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r_values() {
        assert_eq!(r_value(1, 2), BigInt::from(1));
        assert_eq!(r_value(2, 2), BigInt::from(3));
        assert_eq!(r_value(3, 3), BigInt::from(10));
    }

    #[test]
    fn thresholds() {
        assert_eq!(birch_threshold(2, 1, 1), BigInt::from(4));
        assert_eq!(local_threshold(2, 1, 1), BigInt::from(40));
        assert_eq!(wooley_gamma_bound(1, 1, 2), BigInt::from(20));
        assert_eq!(wooley_gamma_bound(1, 1, 3), BigInt::from(8100));
        for m in 1..6 {
            assert!(wooley_gamma_bound(1, m + 1, 3) > wooley_gamma_bound(1, m, 3));
        }
    }

    #[test]
    fn second_term_dominates_from_degree_four() {
        for d in 4..=6 {
            for big_r in 1..=10 {
                for m in 1..=10 {
                    let first = r_value(m, d) * (big_r + 1);
                    assert!(wooley_gamma_bound(big_r, m, d) > first, "d={d} R={big_r} m={m}");
                }
            }
        }
        // the first term can win for small degree and many linear directions
        assert!(r_value(400, 3) * 2u64 > wooley_gamma_bound(1, 400, 3));
    }

    #[test]
    fn tower_small_values() {
        assert_eq!(l_hmp(2).unwrap(), BigInt::zero());
        assert_eq!(l_hmp(3).unwrap(), BigInt::from(3));
        assert_eq!(n_hmp(2, &BigInt::zero()).unwrap(), BigInt::from(3));
        assert_eq!(l_hmp(4).unwrap(), BigInt::from(97));
        assert_eq!(l_hmp_memo(4).unwrap(), BigInt::from(97));
    }

    #[test]
    fn unirat_follows_the_closed_form() {
        assert_eq!(unirat_bound(4).unwrap(), BigInt::from(265_650_463_309_824u64));
        // log10 of 2^4 * 4 * (26 + L(5))^8 * 5^16, evaluated in floating point
        let l5: f64 = 252_694_544_886_958_321_667.0;
        let log10 = 64f64.log10() + 8.0 * (l5 + 26.0).log10() + 16.0 * 5f64.log10();
        let (lead, exp) = scientific(&unirat_bound(5).unwrap(), 3);
        assert_eq!(exp, log10.floor() as usize);
        assert_eq!(lead, format!("{:.0}", 100.0 * 10f64.powf(log10.fract())));
        assert_eq!((lead.as_str(), exp), ("162", 176));
    }

    #[test]
    fn tower_limits() {
        let l6 = l_hmp(6).unwrap();
        let digits = l6.to_string().len();
        assert!((900..1100).contains(&digits), "{digits}");
        assert!(matches!(l_hmp(8), Err(Error::ResourceExceeded { .. })));
        assert!(matches!(unirat_bound(8), Err(Error::ResourceExceeded { .. })));
    }
}
