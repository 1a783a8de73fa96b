//! Symmetrizable Cartan data, the root lattice, and the symmetric form.

use num::bigint::BigInt;
use num::{One, Signed};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};
use crate::scalars::{LaurentHalf, RatFunc};

/// Sign used by `zeta_pow`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Element of the root lattice Q, stored by coordinates over the simple roots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootVec(pub Vec<i64>);

impl RootVec {
    pub fn zero(rank: usize) -> Self {
        RootVec(vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|a| *a == 0)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.iter().all(|a| *a >= 0)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn scaled(&self, k: i64) -> RootVec {
        RootVec(self.0.iter().map(|a| a * k).collect())
    }
}

impl Add<&RootVec> for &RootVec {
    type Output = RootVec;
    fn add(self, rhs: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&RootVec> for &RootVec {
    type Output = RootVec;
    fn sub(self, rhs: &RootVec) -> RootVec {
        RootVec(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &RootVec {
    type Output = RootVec;
    fn neg(self) -> RootVec {
        RootVec(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for RootVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", a)?;
        }
        write!(f, ")")
    }
}

/// Symmetrizable generalized Cartan matrix with a fixed symmetrizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    rank: usize,
    c: Vec<Vec<i64>>,
    d: Vec<i64>,
    sym: Vec<Vec<i64>>, // (alpha_i, alpha_j) = d_i c_ij
}

impl CartanDatum {
    pub fn new(c: Vec<Vec<i64>>, d: Vec<i64>) -> Result<Self> {
        let rank = c.len();
        if rank == 0 {
            return Err(Error::InvalidCartan("rank must be positive".into()));
        }
        if c.iter().any(|row| row.len() != rank) || d.len() != rank {
            return Err(Error::InvalidCartan("matrix and symmetrizer sizes disagree".into()));
        }
        for i in 0..rank {
            if c[i][i] != 2 {
                return Err(Error::InvalidCartan(format!("c[{i}][{i}] must be 2")));
            }
            if d[i] <= 0 {
                return Err(Error::InvalidCartan("symmetrizer entries must be positive".into()));
            }
            for j in 0..rank {
                if i != j && c[i][j] > 0 {
                    return Err(Error::InvalidCartan("off-diagonal entries must be <= 0".into()));
                }
                if (c[i][j] == 0) != (c[j][i] == 0) {
                    return Err(Error::InvalidCartan("zero pattern must be symmetric".into()));
                }
                if d[i] * c[i][j] != d[j] * c[j][i] {
                    return Err(Error::InvalidCartan("DC is not symmetric".into()));
                }
            }
        }
        let sym = (0..rank)
            .map(|i| (0..rank).map(|j| d[i] * c[i][j]).collect())
            .collect();
        Ok(CartanDatum { rank, c, d, sym })
    }

    /// Named finite-type presets, e.g. "A2", "B3", "G2".
    #[allow(clippy::needless_range_loop)]
    pub fn preset(name: &str) -> Result<Self> {
        let name = name.trim().to_uppercase();
        let (family, num) = name.split_at(1);
        let n: usize = num
            .parse()
            .map_err(|_| Error::InvalidCartan(format!("cannot parse type '{name}'")))?;
        let chain = |n: usize| -> Vec<Vec<i64>> {
            let mut c = vec![vec![0; n]; n];
            for i in 0..n {
                c[i][i] = 2;
                if i + 1 < n {
                    c[i][i + 1] = -1;
                    c[i + 1][i] = -1;
                }
            }
            c
        };
        match (family, n) {
            ("A", n) if n >= 1 => Self::new(chain(n), vec![1; n]),
            ("B", n) if n >= 2 => {
                let mut c = chain(n);
                c[n - 1][n - 2] = -2;
                let mut d = vec![2; n];
                d[n - 1] = 1;
                Self::new(c, d)
            }
            ("C", n) if n >= 2 => {
                let mut c = chain(n);
                c[n - 2][n - 1] = -2;
                let mut d = vec![1; n];
                d[n - 1] = 2;
                Self::new(c, d)
            }
            ("D", n) if n >= 3 => {
                let mut c = vec![vec![0; n]; n];
                for i in 0..n {
                    c[i][i] = 2;
                }
                for i in 0..n.saturating_sub(2) {
                    if i < n - 2 {
                        c[i][i + 1] = -1;
                        c[i + 1][i] = -1;
                    }
                }
                c[n - 3][n - 1] = -1;
                c[n - 1][n - 3] = -1;
                Self::new(c, vec![1; n])
            }
            ("E", n) if (6..=8).contains(&n) => {
                // Bourbaki numbering: chain 1-3-4-...-n, node 2 attached to 4.
                let mut c = vec![vec![0; n]; n];
                for i in 0..n {
                    c[i][i] = 2;
                }
                let mut link = |a: usize, b: usize| {
                    c[a - 1][b - 1] = -1;
                    c[b - 1][a - 1] = -1;
                };
                link(1, 3);
                link(2, 4);
                for k in 3..n {
                    link(k, k + 1);
                }
                Self::new(c, vec![1; n])
            }
            ("F", 4) => Self::new(
                vec![
                    vec![2, -1, 0, 0],
                    vec![-1, 2, -1, 0],
                    vec![0, -2, 2, -1],
                    vec![0, 0, -1, 2],
                ],
                vec![2, 2, 1, 1],
            ),
            ("G", 2) => Self::new(vec![vec![2, -1], vec![-3, 2]], vec![3, 1]),
            _ => Err(Error::InvalidCartan(format!("unknown type '{name}'"))),
        }
    }

    /// Plain-text format: first line n, then n rows of the matrix, then one
    /// row with the symmetrizer.
    pub fn from_text(text: &str) -> Result<Self> {
        let nums: Vec<i64> = text
            .split_whitespace()
            .map(|t| t.parse::<i64>().map_err(|_| Error::InvalidCartan(format!("bad token '{t}'"))))
            .collect::<Result<_>>()?;
        if nums.is_empty() {
            return Err(Error::InvalidCartan("empty input".into()));
        }
        let n = nums[0];
        if n <= 0 {
            return Err(Error::InvalidCartan("rank must be positive".into()));
        }
        let n = n as usize;
        if nums.len() != 1 + n * n + n {
            return Err(Error::InvalidCartan(format!(
                "expected {} integers, got {}",
                1 + n * n + n,
                nums.len()
            )));
        }
        let c: Vec<Vec<i64>> = (0..n).map(|i| nums[1 + i * n..1 + (i + 1) * n].to_vec()).collect();
        let d = nums[1 + n * n..].to_vec();
        Self::new(c, d)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn c(&self, i: usize, j: usize) -> i64 {
        self.c[i][j]
    }

    pub fn d(&self, i: usize) -> i64 {
        self.d[i]
    }

    /// (alpha_i, alpha_j).
    pub fn sym(&self, i: usize, j: usize) -> i64 {
        self.sym[i][j]
    }

    pub fn alpha(&self, i: usize) -> RootVec {
        let mut v = vec![0; self.rank];
        v[i] = 1;
        RootVec(v)
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.rank {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange(i, self.rank))
        }
    }

    /// The symmetric bilinear form on the root lattice.
    pub fn form(&self, a: &RootVec, b: &RootVec) -> i64 {
        let mut acc = 0;
        for i in 0..self.rank {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.rank {
                acc += a.0[i] * b.0[j] * self.sym[i][j];
            }
        }
        acc
    }

    /// <h_i, beta>.
    pub fn pairing_coroot(&self, i: usize, b: &RootVec) -> i64 {
        (0..self.rank).map(|j| self.c[i][j] * b.0[j]).sum()
    }

    /// ht(beta) = sum of |coordinates|.
    pub fn ht(&self, b: &RootVec) -> usize {
        b.0.iter().map(|a| a.unsigned_abs() as usize).sum()
    }

    /// ||beta||: coordinates replaced by absolute values.
    pub fn norm_abs(&self, b: &RootVec) -> RootVec {
        RootVec(b.0.iter().map(|a| a.abs()).collect())
    }

    /// alpha <= beta iff beta - alpha has nonnegative coordinates.
    pub fn leq_q(&self, a: &RootVec, b: &RootVec) -> bool {
        (b - a).is_nonnegative()
    }

    /// N(alpha) = (alpha, alpha)/2, always an integer.
    pub fn n_quad(&self, a: &RootVec) -> i64 {
        let s = self.form(a, a);
        debug_assert!(s % 2 == 0);
        s / 2
    }

    /// zeta^beta with the given sign: prod_i (1 - q_i^{±2})^{n_i}, beta in Q+.
    pub fn zeta_pow(&self, b: &RootVec, sign: Sign) -> Result<RatFunc> {
        if !b.is_nonnegative() {
            return Err(Error::NegativeCoordinate);
        }
        let mut out = RatFunc::one();
        for i in 0..self.rank {
            let e = match sign {
                Sign::Plus => 4 * self.d[i],
                Sign::Minus => -4 * self.d[i],
            };
            let factor = &RatFunc::one() - &RatFunc::v_pow(e);
            for _ in 0..b.0[i] {
                out = &out * &factor;
            }
        }
        Ok(out)
    }

    /// zeta^{-beta} for beta in Q+ (the inverse of `zeta_pow(beta, Plus)`).
    pub fn zeta_pow_neg(&self, b: &RootVec) -> Result<RatFunc> {
        self.zeta_pow(b, Sign::Plus)?.inv()
    }

    /// qq^beta = prod_i q_i^{n_i} = q^{sum d_i n_i}; any beta.
    pub fn qq_pow(&self, b: &RootVec) -> RatFunc {
        let e: i64 = (0..self.rank).map(|i| 2 * self.d[i] * b.0[i]).sum();
        RatFunc::v_pow(e)
    }

    /// qq^{beta/2} = q^{(sum d_i n_i)/2}; always a whole power of v.
    pub fn qq_half_pow(&self, b: &RootVec) -> RatFunc {
        let e: i64 = (0..self.rank).map(|i| self.d[i] * b.0[i]).sum();
        RatFunc::v_pow(e)
    }

    /// zeta_{i,±} = 1 - q_i^{±2}.
    pub fn zeta_i(&self, i: usize, sign: Sign) -> RatFunc {
        let e = match sign {
            Sign::Plus => 4 * self.d[i],
            Sign::Minus => -4 * self.d[i],
        };
        &RatFunc::one() - &RatFunc::v_pow(e)
    }

    /// q_i^{n} as a scalar.
    pub fn qi_pow(&self, i: usize, n: i64) -> RatFunc {
        RatFunc::v_pow(2 * self.d[i] * n)
    }

    /// q_i^{n/2} as a scalar.
    pub fn qi_half_pow(&self, i: usize, n: i64) -> RatFunc {
        RatFunc::v_pow(self.d[i] * n)
    }

    /// alpha_{i,m} = (-1)^m alpha_i.
    pub fn alpha_level(&self, i: usize, m: i64) -> RootVec {
        let a = self.alpha(i);
        if m.rem_euclid(2) == 0 {
            a
        } else {
            -&a
        }
    }

    /// [n]_i, [n]_i! and binomials in q_i as scalars.
    pub fn q_int_i(&self, n: u64, i: usize) -> RatFunc {
        RatFunc::from_laurent(crate::scalars::q_int(n, self.d[i]))
    }

    pub fn q_factorial_i(&self, n: u64, i: usize) -> RatFunc {
        RatFunc::from_laurent(crate::scalars::q_factorial(n, self.d[i]))
    }

    pub fn q_binom_i(&self, m: u64, n: u64, i: usize) -> RatFunc {
        RatFunc::from_laurent(crate::scalars::q_binom(m, n, self.d[i]))
    }

    /// Simple reflection s_i acting on the root lattice.
    pub fn reflect(&self, i: usize, b: &RootVec) -> RootVec {
        let k = self.pairing_coroot(i, b);
        let mut out = b.clone();
        out.0[i] -= k;
        out
    }

    /// Finite type iff the symmetrized matrix is positive definite.
    pub fn is_finite_type(&self) -> bool {
        // leading principal minors of (d_i c_ij), exact integer arithmetic
        let n = self.rank;
        let mut m: Vec<Vec<BigInt>> =
            (0..n).map(|i| (0..n).map(|j| BigInt::from(self.sym[i][j])).collect()).collect();
        // fraction-free elimination (Bareiss): after step k-1, m[k][k] is the
        // (k+1)-th leading principal minor; positive definite iff all > 0
        let mut prev = BigInt::one();
        for k in 0..n {
            if !m[k][k].is_positive() {
                return false;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = &t / &prev;
                }
            }
            prev = m[k][k].clone();
        }
        true
    }

    /// All positive roots of a finite-type datum, by reflection closure.
    pub fn positive_roots(&self) -> Result<Vec<RootVec>> {
        if !self.is_finite_type() {
            return Err(Error::UnsupportedType);
        }
        let mut roots: Vec<RootVec> = (0..self.rank).map(|i| self.alpha(i)).collect();
        let mut seen: std::collections::BTreeSet<RootVec> = roots.iter().cloned().collect();
        let mut k = 0;
        while k < roots.len() {
            let b = roots[k].clone();
            for i in 0..self.rank {
                let r = self.reflect(i, &b);
                if r.is_nonnegative() && !seen.contains(&r) {
                    seen.insert(r.clone());
                    roots.push(r);
                }
            }
            k += 1;
            if roots.len() > 100_000 {
                return Err(Error::UnsupportedType);
            }
        }
        roots.sort();
        Ok(roots)
    }
}

pub fn render_weight(b: &RootVec) -> String {
    b.to_string()
}

/// The scalar 1 - q_i^{2} ... kept for readability at call sites.
pub fn one_minus_qi2(cartan: &CartanDatum, i: usize) -> RatFunc {
    cartan.zeta_i(i, Sign::Plus)
}

#[allow(unused)]
fn laurent_one() -> LaurentHalf {
    LaurentHalf::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_form() {
        let c = CartanDatum::preset("A2").unwrap();
        let a1 = c.alpha(0);
        let a2 = c.alpha(1);
        assert_eq!(c.form(&a1, &a2), -1);
        assert_eq!(c.form(&a1, &a1), 2);
    }

    #[test]
    fn b2_form() {
        let c = CartanDatum::preset("B2").unwrap();
        assert_eq!(c.d(0), 2);
        assert_eq!(c.d(1), 1);
        assert_eq!(c.form(&c.alpha(0), &c.alpha(1)), -2);
        assert_eq!(c.form(&c.alpha(0), &c.alpha(0)), 4);
    }

    #[test]
    fn ht_and_norm() {
        let c = CartanDatum::preset("A2").unwrap();
        let minus = -&(&c.alpha(0) + &c.alpha(1));
        assert_eq!(c.ht(&minus), 2);
        let mixed = &c.alpha(0) - &c.alpha(1);
        assert_eq!(c.norm_abs(&mixed), &c.alpha(0) + &c.alpha(1));
        assert_eq!(c.ht(&RootVec::zero(2)), 0);
    }

    #[test]
    fn leq_q_examples() {
        let c = CartanDatum::preset("A2").unwrap();
        assert!(c.leq_q(&RootVec::zero(2), &c.alpha(0)));
        assert!(!c.leq_q(&c.alpha(0), &c.alpha(1)));
        assert!(c.leq_q(&c.alpha(0), &(&c.alpha(0) + &c.alpha(1))));
    }

    #[test]
    fn n_quad_examples() {
        let c = CartanDatum::preset("A2").unwrap();
        assert_eq!(c.n_quad(&(&c.alpha(0) + &c.alpha(1))), 1);
        assert_eq!(c.n_quad(&c.alpha(0)), 1);
        assert_eq!(c.n_quad(&RootVec::zero(2)), 0);
        let g = CartanDatum::preset("G2").unwrap();
        assert_eq!(c.n_quad(&c.alpha(1)), g.d(1));
        assert_eq!(g.n_quad(&g.alpha(0)), 3);
    }

    #[test]
    fn zeta_and_levels() {
        let c = CartanDatum::preset("A2").unwrap();
        let z1 = c.zeta_pow(&c.alpha(0), Sign::Plus).unwrap();
        assert_eq!(z1, &RatFunc::one() - &RatFunc::q_pow(2));
        assert!(c.zeta_pow(&RootVec::zero(2), Sign::Plus).unwrap().is_one());
        let z = c.zeta_pow(&(&c.alpha(0) + &c.alpha(1)), Sign::Plus).unwrap();
        let f = &RatFunc::one() - &RatFunc::q_pow(2);
        assert_eq!(z, &f * &f);
        assert_eq!(c.zeta_pow(&(-&c.alpha(0)), Sign::Plus), Err(Error::NegativeCoordinate));
        assert_eq!(c.alpha_level(0, 0), c.alpha(0));
        assert_eq!(c.alpha_level(0, 1), -&c.alpha(0));
        assert_eq!(c.alpha_level(0, -2), c.alpha(0));
    }

    #[test]
    fn finite_type_detection() {
        for t in ["A1", "A3", "B2", "C3", "D4", "E6", "F4", "G2"] {
            assert!(CartanDatum::preset(t).unwrap().is_finite_type(), "{t}");
        }
        let affine = CartanDatum::new(vec![vec![2, -2], vec![-2, 2]], vec![1, 1]).unwrap();
        assert!(!affine.is_finite_type());
        assert_eq!(affine.positive_roots(), Err(Error::UnsupportedType));
    }

    #[test]
    fn positive_root_counts() {
        let counts = [("A2", 3), ("B2", 4), ("G2", 6), ("A3", 6), ("D4", 12), ("F4", 24), ("E6", 36)];
        for (t, n) in counts {
            let c = CartanDatum::preset(t).unwrap();
            assert_eq!(c.positive_roots().unwrap().len(), n, "{t}");
        }
    }

    #[test]
    fn from_text_roundtrip() {
        let text = "2\n2 -1\n-1 2\n1 1\n";
        let c = CartanDatum::from_text(text).unwrap();
        assert_eq!(c, CartanDatum::preset("A2").unwrap());
    }

    #[test]
    fn rejects_bad_data() {
        assert!(CartanDatum::new(vec![vec![2, -1], vec![-2, 2]], vec![1, 1]).is_err());
        assert!(CartanDatum::new(vec![vec![2, 1], vec![1, 2]], vec![1, 1]).is_err());
        assert!(CartanDatum::new(vec![vec![2, -1], vec![0, 2]], vec![1, 1]).is_err());
    }
}
