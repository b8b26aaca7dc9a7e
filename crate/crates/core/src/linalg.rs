//! Exact solution of integer linear systems by fraction-free (Bareiss)
//! elimination.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Outcome of solving `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Solution {
    /// The system has exactly one solution.
    Unique(Vec<BigRational>),
    /// No solution exists.
    Inconsistent,
    /// The system is consistent but the rank is below the number of unknowns.
    Underdetermined { rank: usize, unknowns: usize },
}

/// Solves `A x = b` for an integer matrix with any number of rows.
pub fn solve(a: &[Vec<BigInt>], b: &[BigInt]) -> Solution {
    let n = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let rows = m.len();
    let mut prev = BigInt::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in (c + 1)..=n {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                debug_assert!((&v % &prev).is_zero());
                m[i][j] = v / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[n].is_zero()) {
        return Solution::Inconsistent;
    }
    if r < n {
        return Solution::Underdetermined { rank: r, unknowns: n };
    }
    let mut x = vec![BigRational::zero(); n];
    for k in (0..r).rev() {
        let c = pivots[k];
        let mut acc = BigRational::from_integer(m[k][n].clone());
        for j in c + 1..n {
            if !m[k][j].is_zero() {
                acc -= BigRational::from_integer(m[k][j].clone()) * &x[j];
            }
        }
        x[c] = acc / BigRational::from_integer(m[k][c].clone());
    }
    Solution::Unique(x)
}

/// Solves a square integer system with small entries, returning `None`
/// unless the solution is unique and integral.
pub fn solve_integral(a: &[Vec<i64>], b: &[i64]) -> Option<Vec<i64>> {
    let a: Vec<Vec<BigInt>> = a
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let b: Vec<BigInt> = b.iter().map(|&v| BigInt::from(v)).collect();
    match solve(&a, &b) {
        Solution::Unique(x) => x
            .iter()
            .map(|q| {
                if q.is_integer() {
                    i64::try_from(q.to_integer()).ok()
                } else {
                    None
                }
            })
            .collect(),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(rows: &[&[i64]]) -> Vec<Vec<BigInt>> {
        rows.iter()
            .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
            .collect()
    }

    fn vb(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn unique_overdetermined_and_rational() {
        let a = big(&[&[2, 1], &[1, 3], &[3, 4]]);
        let s = solve(&a, &vb(&[3, 5, 8]));
        let q = |p: i64, d: i64| BigRational::new(p.into(), d.into());
        assert_eq!(s, Solution::Unique(vec![q(4, 5), q(7, 5)]));
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        let a = big(&[&[1, 1], &[2, 2]]);
        assert_eq!(solve(&a, &vb(&[1, 3])), Solution::Inconsistent);
        assert_eq!(
            solve(&a, &vb(&[1, 2])),
            Solution::Underdetermined { rank: 1, unknowns: 2 }
        );
    }

    #[test]
    fn integral_solutions() {
        assert_eq!(solve_integral(&[vec![2, -1], vec![-1, 2]], &[1, 1]), Some(vec![1, 1]));
        assert_eq!(solve_integral(&[vec![2, -1], vec![-1, 2]], &[1, 0]), None);
    }
}
