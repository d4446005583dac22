use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::Rational;
use crate::{Error, Result};

/// Clears denominators row by row, giving an integer matrix with the same row space.
fn integer_rows(a: &[Vec<Rational>], b: Option<&[Rational]>) -> Vec<Vec<BigInt>> {
    a.iter()
        .enumerate()
        .map(|(i, row)| {
            let mut full: Vec<&Rational> = row.iter().collect();
            if let Some(b) = b {
                full.push(&b[i]);
            }
            let l = full.iter().fold(BigInt::one(), |l, r| l.lcm(r.denom()));
            full.iter()
                .map(|r| (*r * Rational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect()
}

/// Fraction-free (Bareiss) forward elimination on the first `ncols` columns.
/// Returns the pivot columns; rows below the pivots are zero on those columns.
fn bareiss(m: &mut [Vec<BigInt>], ncols: usize) -> Vec<usize> {
    let rows = m.len();
    let width = m.first().map_or(0, Vec::len);
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for k in 0..ncols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][k].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in k + 1..width {
                let v = &m[r][k] * &m[i][j] - &m[i][k] * &m[r][j];
                m[i][j] = v / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[r][k].clone();
        pivots.push(k);
        r += 1;
    }
    pivots
}

/// Rank of a rational matrix.
pub fn rank(a: &[Vec<Rational>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let ncols = a[0].len();
    let mut m = integer_rows(a, None);
    bareiss(&mut m, ncols).len()
}

/// Solves `a x = b` exactly. `a` may have more rows than columns, in which
/// case every extra equation is checked.
pub fn solve_linear_exact(a: &[Vec<Rational>], b: &[Rational]) -> Result<Vec<Rational>> {
    assert_eq!(
        a.len(),
        b.len(),
        "row count of matrix and right-hand side differ"
    );
    let n = a.first().map_or(0, Vec::len);
    assert!(a.iter().all(|r| r.len() == n), "ragged matrix");
    let mut m = integer_rows(a, Some(b));
    let pivots = bareiss(&mut m, n);
    if pivots.len() < n {
        return Err(Error::Singular {
            rank: pivots.len(),
            unknowns: n,
        });
    }
    if m[n..].iter().any(|row| !row[n].is_zero()) {
        return Err(Error::Inconsistent);
    }
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Rational::from_integer(m[i][n].clone());
        for j in i + 1..n {
            acc -= Rational::from_integer(m[i][j].clone()) * &x[j];
        }
        x[i] = acc / Rational::from_integer(m[i][i].clone());
    }
    Ok(x)
}
