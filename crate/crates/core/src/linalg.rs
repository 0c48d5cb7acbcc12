//! Exact Gaussian elimination over the rationals.

use crate::Q;
use num_traits::{One, Zero};

/// Rank of a dense rational matrix given as rows.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for i in r + 1..m.len() {
            if m[i][c].is_zero() {
                continue;
            }
            let f = &m[i][c] * &inv;
            for k in c..cols {
                let t = &f * &m[r][k];
                m[i][k] -= t;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = Q::one() / &m[c][c];
        for k in c..=n {
            m[c][k] = &m[c][k] * &inv;
        }
        for i in 0..n {
            if i == c || m[i][c].is_zero() {
                continue;
            }
            let f = m[i][c].clone();
            for k in c..=n {
                let t = &f * &m[c][k];
                m[i][k] -= t;
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Inverse of a square rational matrix.
pub fn inverse(a: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = a.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let e: Vec<Q> = (0..n).map(|i| if i == j { Q::one() } else { Q::zero() }).collect();
        cols.push(solve(a, &e)?);
    }
    Some((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn rank_of_vandermonde_rows() {
        let rows = vec![vec![q(1), q(2)], vec![q(1), q(4)], vec![q(1), q(8)]];
        assert_eq!(rank(&rows), 2);
        assert_eq!(rank(&[vec![q(0), q(0)]]), 0);
    }

    #[test]
    fn solve_and_inverse() {
        let a = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&a, &[q(3), q(5)]).unwrap();
        assert_eq!(x, vec![crate::qf(4, 5), crate::qf(7, 5)]);
        let inv = inverse(&a).unwrap();
        assert_eq!(inv[0][0], crate::qf(3, 5));
        assert!(solve(&[vec![q(1), q(1)], vec![q(2), q(2)]], &[q(1), q(1)]).is_none());
    }
}
