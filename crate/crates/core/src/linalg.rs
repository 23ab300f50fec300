//! Exact linear algebra over the rationals and small parsing helpers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;
pub type RatMatrix = Vec<Vec<Rat>>;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"a"`, `"-a/b"` or `"a/b"` with arbitrary-size integers.
pub fn parse_rational(s: &str) -> Result<Rat> {
    let t = s.trim();
    let bad = || Error::Config(format!("cannot parse rational number {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(n, d))
        }
        None => {
            let n: BigInt = t.parse().map_err(|_| bad())?;
            Ok(Rat::from_integer(n))
        }
    }
}

pub fn format_rational(q: &Rat) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Serde adapter writing a rational as a `"a/b"` string.
pub mod rat_str {
    use super::{format_rational, parse_rational, Rat};
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rat, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rat, D::Error> {
        let t = String::deserialize(d)?;
        parse_rational(&t).map_err(D::Error::custom)
    }
}

/// Serde adapter for a list of rationals as strings.
pub mod rat_vec_str {
    use super::{format_rational, parse_rational, Rat};
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(format_rational).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rat>, D::Error> {
        let t = Vec::<String>::deserialize(d)?;
        t.iter().map(|x| parse_rational(x).map_err(D::Error::custom)).collect()
    }
}

pub fn rat_to_f64(q: &Rat) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(it: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    use num_integer::Integer;
    it.into_iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Row-echelon reduction; returns (rank, determinant of the leading square part when square).
fn eliminate(m: &mut RatMatrix) -> (usize, Rat) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut det = Rat::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            det = Rat::zero();
            continue;
        };
        if p != r {
            m.swap(p, r);
            det = -det;
        }
        let piv = m[r][c].clone();
        det *= &piv;
        for i in (r + 1)..rows {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] / &piv;
            for k in c..cols {
                let v = &f * &m[r][k];
                m[i][k] -= v;
            }
        }
        r += 1;
    }
    if r < rows.min(cols) {
        det = Rat::zero();
    }
    (r, det)
}

pub fn determinant(m: &RatMatrix) -> Rat {
    if m.is_empty() {
        return Rat::one();
    }
    let mut a = m.clone();
    eliminate(&mut a).1
}

pub fn rank(m: &RatMatrix) -> usize {
    let mut a = m.clone();
    eliminate(&mut a).0
}

/// Solves `m x = b` for square invertible `m`.
pub fn solve(m: &RatMatrix, b: &[Rat]) -> Option<Vec<Rat>> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for k in c..=n {
            a[c][k] = &a[c][k] / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..=n {
                    let v = &f * &a[c][k];
                    a[i][k] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rat::one() } else { Rat::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for k in 0..2 * n {
            a[c][k] = &a[c][k] / &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let v = &f * &a[c][k];
                    a[i][k] -= v;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn max_abs(v: &[Rat]) -> Rat {
    v.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse() {
        let m = vec![vec![rat(2), rat(1)], vec![rat(1), rat(1)]];
        assert_eq!(determinant(&m), rat(1));
        let inv = inverse(&m).unwrap();
        assert_eq!(inv, vec![vec![rat(1), rat(-1)], vec![rat(-1), rat(2)]]);
        let sing = vec![vec![rat(1), rat(2)], vec![rat(2), rat(4)]];
        assert!(inverse(&sing).is_none());
        assert_eq!(rank(&sing), 1);
    }

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-3/6").unwrap(), rat_frac(-1, 2));
        assert_eq!(format_rational(&rat_frac(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
