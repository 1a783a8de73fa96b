//! Exact linear algebra over Q(q^{1/2}).
//!
//! Sizes stay small here (weight-space dimensions at desk scale), so plain
//! Gaussian elimination with rational-function entries is enough.

#![allow(clippy::needless_range_loop)]

use crate::scalars::RatFunc;

pub type Matrix = Vec<Vec<RatFunc>>;

/// LU factorization with row pivoting, reusable for many right-hand sides.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Matrix, // combined L (below diagonal, unit diagonal implied) and U
    perm: Vec<usize>,
}

impl Lu {
    /// None when the matrix is singular.
    pub fn factor(m: &Matrix) -> Option<Lu> {
        let n = m.len();
        let mut lu: Matrix = m.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let pivot = (k..n).find(|&r| !lu[r][k].is_zero())?;
            if pivot != k {
                lu.swap(k, pivot);
                perm.swap(k, pivot);
            }
            let inv = lu[k][k].inv().expect("pivot nonzero");
            for i in k + 1..n {
                if lu[i][k].is_zero() {
                    continue;
                }
                let factor = &lu[i][k] * &inv;
                for j in k + 1..n {
                    let delta = &factor * &lu[k][j];
                    let v = &lu[i][j] - &delta;
                    lu[i][j] = v;
                }
                lu[i][k] = factor;
            }
        }
        Some(Lu { n, lu, perm })
    }

    pub fn solve(&self, b: &[RatFunc]) -> Vec<RatFunc> {
        let n = self.n;
        let mut y: Vec<RatFunc> = (0..n).map(|i| b[self.perm[i]].clone()).collect();
        for i in 1..n {
            for j in 0..i {
                if self.lu[i][j].is_zero() || y[j].is_zero() {
                    continue;
                }
                let delta = &self.lu[i][j] * &y[j];
                y[i] = &y[i] - &delta;
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                if self.lu[i][j].is_zero() || y[j].is_zero() {
                    continue;
                }
                let delta = &self.lu[i][j] * &y[j];
                y[i] = &y[i] - &delta;
            }
            y[i] = &y[i] * &self.lu[i][i].inv().expect("pivot nonzero");
        }
        y
    }

    pub fn det(&self) -> RatFunc {
        let mut d = RatFunc::one();
        for i in 0..self.n {
            d = &d * &self.lu[i][i];
        }
        // permutation sign
        let mut seen = vec![false; self.n];
        let mut sign = 1i64;
        for i in 0..self.n {
            if seen[i] {
                continue;
            }
            let mut len = 0;
            let mut j = i;
            while !seen[j] {
                seen[j] = true;
                j = self.perm[j];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        if sign < 0 {
            -&d
        } else {
            d
        }
    }
}

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() }).collect())
        .collect()
}

pub fn det(m: &Matrix) -> RatFunc {
    match Lu::factor(m) {
        Some(lu) => lu.det(),
        None => RatFunc::zero(),
    }
}

/// Solve a (possibly non-square) exact system; None when inconsistent.
/// `a` is row-major with dimensions rows x cols and `b` has length rows.
pub fn solve_rectangular(a: &Matrix, b: &[RatFunc]) -> Option<Vec<RatFunc>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot nonzero");
        for j in col..=cols {
            m[row][j] = &m[row][j] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..=cols {
                    let delta = &factor * &m[row][j];
                    m[r][j] = &m[r][j] - &delta;
                }
            }
        }
        pivots.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    // inconsistent if a zero row has nonzero rhs
    for r in row..rows {
        if !m[r][cols].is_zero() {
            return None;
        }
    }
    let mut x = vec![RatFunc::zero(); cols];
    for (r, c) in pivots {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

/// Rank of an arbitrary matrix.
pub fn rank(a: &Matrix) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut m = a.to_vec();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let inv = m[rank][col].inv().expect("pivot nonzero");
        for j in col..cols {
            m[rank][j] = &m[rank][j] * &inv;
        }
        for r in 0..rows {
            if r != rank && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..cols {
                    let delta = &factor * &m[rank][j];
                    m[r][j] = &m[r][j] - &delta;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Basis of the right nullspace of `a`.
pub fn nullspace(a: &Matrix) -> Vec<Vec<RatFunc>> {
    let rows = a.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = a[0].len();
    let mut m = a.to_vec();
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, p);
        let inv = m[row][col].inv().expect("pivot nonzero");
        for j in col..cols {
            m[row][j] = &m[row][j] * &inv;
        }
        for r in 0..rows {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for j in col..cols {
                    let delta = &factor * &m[row][j];
                    m[r][j] = &m[r][j] - &delta;
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free {
        let mut v = vec![RatFunc::zero(); cols];
        v[fc] = RatFunc::one();
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -&m[r][fc];
        }
        basis.push(v);
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q() -> RatFunc {
        RatFunc::q_pow(1)
    }

    #[test]
    fn lu_solve_2x2() {
        // [[1, q], [q, 1]] x = [1, 0] -> x = (1/(1-q^2), -q/(1-q^2))
        let m = vec![vec![RatFunc::one(), q()], vec![q(), RatFunc::one()]];
        let lu = Lu::factor(&m).unwrap();
        let x = lu.solve(&[RatFunc::one(), RatFunc::zero()]);
        let det = &RatFunc::one() - &RatFunc::q_pow(2);
        assert_eq!(x[0], det.inv().unwrap());
        assert_eq!(x[1], -&(&q() * &det.inv().unwrap()));
        assert_eq!(lu.det(), det);
    }

    #[test]
    fn rank_and_nullspace() {
        let m = vec![
            vec![RatFunc::one(), q(), RatFunc::zero()],
            vec![q(), &q() * &q(), RatFunc::zero()],
        ];
        assert_eq!(rank(&m), 1);
        let ns = nullspace(&m);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for row in &m {
                let mut acc = RatFunc::zero();
                for (a, b) in row.iter().zip(v) {
                    acc += &(a * b);
                }
                assert!(acc.is_zero());
            }
        }
    }

    #[test]
    fn rectangular_solve() {
        let a = vec![
            vec![RatFunc::one(), RatFunc::zero()],
            vec![RatFunc::zero(), RatFunc::one()],
            vec![RatFunc::one(), RatFunc::one()],
        ];
        let b = vec![q(), RatFunc::one(), &q() + &RatFunc::one()];
        let x = solve_rectangular(&a, &b).unwrap();
        assert_eq!(x, vec![q(), RatFunc::one()]);
        let bad = vec![q(), RatFunc::one(), RatFunc::zero()];
        assert!(solve_rectangular(&a, &bad).is_none());
    }
}
