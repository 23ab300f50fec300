//! Integer lattices in column Hermite normal form, plus rational lattice
//! sums and intersections through duality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{common_denominator, inverse, transpose, Rat, RatMatrix};

/// Column HNF of the lattice spanned by `gens` (each a column vector of length `n`).
///
/// The result `h` is indexed `h[row][col]`, upper triangular with positive
/// diagonal, and every entry right of a diagonal entry lies in `[0, h[i][i])`.
pub fn hnf_columns(gens: &[Vec<BigInt>], n: usize) -> Result<Vec<Vec<BigInt>>> {
    let mut active: Vec<Vec<BigInt>> = gens
        .iter()
        .filter(|c| c.iter().any(|x| !x.is_zero()))
        .cloned()
        .collect();
    if active.iter().any(|c| c.len() != n) {
        return Err(Error::DimensionMismatch("generator length differs from lattice rank".into()));
    }
    let mut pivots: Vec<Option<Vec<BigInt>>> = vec![None; n];
    for row in (0..n).rev() {
        loop {
            let nz: Vec<usize> = (0..active.len()).filter(|&k| !active[k][row].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            let p = *nz.iter().min_by_key(|&&k| active[k][row].abs()).unwrap();
            let pv = active[p][row].clone();
            let pcol = active[p].clone();
            for &k in &nz {
                if k == p {
                    continue;
                }
                let q = active[k][row].div_floor(&pv);
                for (x, y) in active[k].iter_mut().zip(&pcol) {
                    *x -= &q * y;
                }
            }
        }
        let Some(p) = (0..active.len()).find(|&k| !active[k][row].is_zero()) else {
            return Err(Error::RankDeficient);
        };
        let mut col = active.swap_remove(p);
        if col[row].is_negative() {
            col.iter_mut().for_each(|x| *x = -&*x);
        }
        pivots[row] = Some(col);
        active.retain(|c| c.iter().any(|x| !x.is_zero()));
    }
    let mut cols: Vec<Vec<BigInt>> = pivots.into_iter().map(|c| c.unwrap()).collect();
    for j in 0..n {
        for i in (0..j).rev() {
            let q = cols[j][i].div_floor(&cols[i][i]);
            if !q.is_zero() {
                let ci = cols[i].clone();
                for (x, y) in cols[j].iter_mut().zip(&ci) {
                    *x -= &q * y;
                }
            }
        }
    }
    Ok((0..n).map(|r| (0..n).map(|c| cols[c][r].clone()).collect()).collect())
}

/// Columns of an `n x n` matrix stored as `m[row][col]`.
pub fn columns<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    transpose(m)
}

/// HNF of a lattice given by rational generator columns.
pub fn rational_hnf(gens: &[Vec<Rat>], n: usize) -> Result<RatMatrix> {
    let d = common_denominator(gens.iter().flatten());
    let int_gens: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|c| c.iter().map(|x| (x * Rat::from_integer(d.clone())).to_integer()).collect())
        .collect();
    let h = hnf_columns(&int_gens, n)?;
    let dq = Rat::from_integer(d);
    Ok(h
        .into_iter()
        .map(|r| r.into_iter().map(|x| Rat::from_integer(x) / &dq).collect())
        .collect())
}

/// Basis (as `[row][col]`) of the dual lattice `{y : y . x in Z for all x in L}`.
pub fn dual_basis(basis: &RatMatrix) -> Result<RatMatrix> {
    let inv = inverse(basis).ok_or(Error::RankDeficient)?;
    Ok(transpose(&inv))
}

/// Intersection of full-rank rational lattices, computed as the dual of the sum of duals.
pub fn intersect(bases: &[RatMatrix], n: usize) -> Result<RatMatrix> {
    let mut gens: Vec<Vec<Rat>> = Vec::new();
    for b in bases {
        gens.extend(columns(&dual_basis(b)?));
    }
    let sum = rational_hnf(&gens, n)?;
    let dual = dual_basis(&sum)?;
    rational_hnf(&columns(&dual), n)
}

pub fn to_i64_matrix(m: &[Vec<BigInt>]) -> Result<Vec<Vec<i64>>> {
    m.iter()
        .map(|r| {
            r.iter()
                .map(|x| i64::try_from(x).map_err(|_| Error::Overflow("lattice entry")))
                .collect()
        })
        .collect()
}

pub fn is_identity(m: &[Vec<BigInt>]) -> bool {
    m.iter().enumerate().all(|(i, r)| {
        r.iter()
            .enumerate()
            .all(|(j, x)| if i == j { x.is_one() } else { x.is_zero() })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{rat, rat_frac};

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn hnf_of_simple_lattices() {
        let h = hnf_columns(&[vec![b(2), b(0)], vec![b(0), b(2)], vec![b(4), b(6)]], 2).unwrap();
        assert_eq!(h, vec![vec![b(2), b(0)], vec![b(0), b(2)]]);
        // (1+i) in Z[i]: generators 1+i and i(1+i) = -1+i
        let h = hnf_columns(&[vec![b(1), b(1)], vec![b(-1), b(1)]], 2).unwrap();
        assert_eq!(h, vec![vec![b(2), b(1)], vec![b(0), b(1)]]);
        assert!(matches!(
            hnf_columns(&[vec![b(1), b(1)], vec![b(2), b(2)]], 2),
            Err(Error::RankDeficient)
        ));
    }

    #[test]
    fn intersection_of_rational_lattices() {
        let a = vec![vec![rat(2)]];
        let c = vec![vec![rat(3)]];
        assert_eq!(intersect(&[a, c], 1).unwrap(), vec![vec![rat(6)]]);
        let half = vec![vec![rat_frac(1, 2)]];
        let one = vec![vec![rat(1)]];
        assert_eq!(intersect(&[half, one], 1).unwrap(), vec![vec![rat(1)]]);
    }
}
