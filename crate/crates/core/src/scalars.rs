//! Exact arithmetic in Z[q^{±1/2}] and the field Q(q^{1/2}).
//!
//! Everything is expressed internally in the variable v = q^{1/2}, so all
//! exponents are integers: a stored exponent `e` means q^{e/2}. `LaurentHalf`
//! is a Laurent polynomial in v with arbitrary-precision integer coefficients;
//! `RatFunc` is a reduced fraction of two of them with a canonical choice of
//! representative, so equality is structural. No rounding happens anywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Signed, Zero};

use crate::error::{Error, Result};

/// Laurent polynomial in v = q^{1/2} with integer coefficients.
///
/// Invariant: no stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LaurentHalf {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentHalf {
    pub fn zero() -> Self {
        LaurentHalf { coeffs: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::term(0, BigInt::one())
    }

    /// Single term c * v^e (dropped when c = 0).
    pub fn term(e: i64, c: BigInt) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(e, c);
        }
        LaurentHalf { coeffs }
    }

    pub fn int(n: i64) -> Self {
        Self::term(0, BigInt::from(n))
    }

    /// v^e = q^{e/2}.
    pub fn v_pow(e: i64) -> Self {
        Self::term(e, BigInt::one())
    }

    /// q^n.
    pub fn q_pow(n: i64) -> Self {
        Self::term(2 * n, BigInt::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    /// True if the polynomial is a single term c * v^0.
    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty() || (self.coeffs.len() == 1 && self.coeffs.contains_key(&0))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&i64, &BigInt)> {
        self.coeffs.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// All exponents are even, i.e. the element lies in Z[q^{±1}].
    pub fn whole_q_powers(&self) -> bool {
        self.coeffs.keys().all(|e| e % 2 == 0)
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut out = LaurentHalf::zero();
        for (e, c) in pairs {
            out.add_term(e, c);
        }
        out
    }

    pub fn to_pairs(&self) -> Vec<(i64, BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c.clone())).collect()
    }

    fn add_term(&mut self, e: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    /// Multiply by v^e.
    pub fn shifted(&self, e: i64) -> Self {
        LaurentHalf { coeffs: self.coeffs.iter().map(|(k, c)| (k + e, c.clone())).collect() }
    }

    /// v -> v^{-1} on every term.
    pub fn bar(&self) -> Self {
        LaurentHalf { coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.clone())).collect() }
    }

    pub fn scaled(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return LaurentHalf::zero();
        }
        LaurentHalf { coeffs: self.coeffs.iter().map(|(k, x)| (*k, x * c)).collect() }
    }

    /// gcd of all coefficients (zero polynomial gives 0).
    pub fn content(&self) -> BigInt {
        let mut g = BigInt::zero();
        for c in self.coeffs.values() {
            g = g.gcd(c);
        }
        g
    }

    /// Dense coefficient vector together with the valuation (lowest exponent).
    fn to_dense(&self) -> (Vec<BigInt>, i64) {
        if self.is_zero() {
            return (vec![], 0);
        }
        let lo = self.min_exp().unwrap();
        let hi = self.max_exp().unwrap();
        let mut dense = vec![BigInt::zero(); (hi - lo + 1) as usize];
        for (e, c) in &self.coeffs {
            dense[(e - lo) as usize] = c.clone();
        }
        (dense, lo)
    }

    fn from_dense(dense: &[BigInt], lo: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        for (k, c) in dense.iter().enumerate() {
            if !c.is_zero() {
                coeffs.insert(lo + k as i64, c.clone());
            }
        }
        LaurentHalf { coeffs }
    }

    /// Exact division, None when the division leaves a remainder.
    pub fn div_exact(&self, rhs: &LaurentHalf) -> Option<LaurentHalf> {
        if rhs.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(LaurentHalf::zero());
        }
        let (a, alo) = self.to_dense();
        let (b, blo) = rhs.to_dense();
        let q = poly_div_exact(&a, &b)?;
        Some(LaurentHalf::from_dense(&q, alo - blo))
    }

    /// Canonical associate: lowest exponent 0 and positive lowest coefficient.
    pub fn canonical_associate(&self) -> LaurentHalf {
        if self.is_zero() {
            return LaurentHalf::zero();
        }
        let lo = self.min_exp().unwrap();
        let mut out = self.shifted(-lo);
        if out.coeff(0).is_negative() {
            out = -&out;
        }
        out
    }

    /// gcd in Z[v^{±1}] (integer content included), canonical associate.
    pub fn gcd(&self, other: &LaurentHalf) -> LaurentHalf {
        if self.is_zero() {
            return other.canonical_associate();
        }
        if other.is_zero() {
            return self.canonical_associate();
        }
        let (a, _) = self.to_dense();
        let (b, _) = other.to_dense();
        let c = poly_content(&a).gcd(&poly_content(&b));
        let g = poly_gcd(&poly_primitive(&a), &poly_primitive(&b));
        LaurentHalf::from_dense(&g, 0).scaled(&c).canonical_associate()
    }

    /// lcm in Z[v^{±1}], canonical associate.
    pub fn lcm(&self, other: &LaurentHalf) -> LaurentHalf {
        if self.is_zero() || other.is_zero() {
            return LaurentHalf::zero();
        }
        let g = self.gcd(other);
        let q = self.div_exact(&g).expect("gcd divides");
        (&q * other).canonical_associate()
    }

    /// Evaluate at v = r (debug-only rational specialization).
    pub fn eval_v(&self, r: &BigRational) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            let p = if *e >= 0 {
                num::pow::pow(r.clone(), *e as usize)
            } else {
                if r.is_zero() {
                    return None;
                }
                num::pow::pow(r.clone(), (-*e) as usize).recip()
            };
            acc += BigRational::from(c.clone()) * p;
        }
        Some(acc)
    }
}

impl Add<&LaurentHalf> for &LaurentHalf {
    type Output = LaurentHalf;
    fn add(self, rhs: &LaurentHalf) -> LaurentHalf {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub<&LaurentHalf> for &LaurentHalf {
    type Output = LaurentHalf;
    fn sub(self, rhs: &LaurentHalf) -> LaurentHalf {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, -c.clone());
        }
        out
    }
}

impl Mul<&LaurentHalf> for &LaurentHalf {
    type Output = LaurentHalf;
    fn mul(self, rhs: &LaurentHalf) -> LaurentHalf {
        let mut out = LaurentHalf::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentHalf {
    type Output = LaurentHalf;
    fn neg(self) -> LaurentHalf {
        LaurentHalf { coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c.clone())).collect() }
    }
}

// --- integer polynomial helpers (dense, index = exponent) ---

fn poly_trim(p: &mut Vec<BigInt>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_content(p: &[BigInt]) -> BigInt {
    let mut g = BigInt::zero();
    for c in p {
        g = g.gcd(c);
    }
    g
}

fn poly_primitive(p: &[BigInt]) -> Vec<BigInt> {
    let g = poly_content(p);
    if g.is_zero() || g.is_one() {
        return p.to_vec();
    }
    p.iter().map(|c| c / &g).collect()
}

/// Pseudo-remainder of a by b (deg a >= deg b, b nonzero).
fn poly_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let dr = r.len() - 1;
        let lr = r.last().unwrap().clone();
        for c in r.iter_mut() {
            *c *= &lb;
        }
        let shift = dr - db;
        for k in 0..=db {
            let delta = &lr * &b[k];
            r[k + shift] -= delta;
        }
        poly_trim(&mut r);
    }
    r
}

/// Primitive gcd of two integer polynomials, with positive leading coefficient.
fn poly_gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut a = poly_primitive(a);
    let mut b = poly_primitive(b);
    poly_trim(&mut a);
    poly_trim(&mut b);
    if a.is_empty() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let r = poly_prem(&a, &b);
        a = b;
        b = poly_primitive(&r);
    }
    if a.last().is_some_and(|c| c.is_negative()) {
        for c in a.iter_mut() {
            *c = -c.clone();
        }
    }
    a
}

/// Exact polynomial division over Z, None when not exact.
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut b = b.to_vec();
    poly_trim(&mut b);
    if b.is_empty() {
        return None;
    }
    if r.is_empty() {
        return Some(vec![]);
    }
    if r.len() < b.len() {
        return None;
    }
    let mut q = vec![BigInt::zero(); r.len() - b.len() + 1];
    let lb = b.last().unwrap().clone();
    while r.len() >= b.len() && !r.is_empty() {
        let lr = r.last().unwrap().clone();
        let (c, rem) = lr.div_rem(&lb);
        if !rem.is_zero() {
            return None;
        }
        let shift = r.len() - b.len();
        q[shift] = c.clone();
        for k in 0..b.len() {
            let delta = &c * &b[k];
            r[k + shift] -= delta;
        }
        poly_trim(&mut r);
    }
    if r.is_empty() {
        Some(q)
    } else {
        None
    }
}

/// Element of Q(q^{1/2}) as a reduced fraction of Laurent polynomials in v.
///
/// Canonical form: den is nonzero with lowest exponent 0 and positive lowest
/// coefficient, gcd(num, den) = 1 as polynomials in v and the integer contents
/// of num and den are coprime. Equality and hashing are structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: LaurentHalf,
    den: LaurentHalf,
}

impl Default for RatFunc {
    fn default() -> Self {
        RatFunc::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: LaurentHalf::zero(), den: LaurentHalf::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: LaurentHalf::one(), den: LaurentHalf::one() }
    }

    pub fn int(n: i64) -> Self {
        RatFunc { num: LaurentHalf::int(n), den: LaurentHalf::one() }
    }

    pub fn from_bigint(n: BigInt) -> Self {
        RatFunc { num: LaurentHalf::term(0, n), den: LaurentHalf::one() }
    }

    pub fn from_rational(r: &BigRational) -> Self {
        Self::new(
            LaurentHalf::term(0, r.numer().clone()),
            LaurentHalf::term(0, r.denom().clone()),
        )
        .expect("denominator of a rational is nonzero")
    }

    /// v^e = q^{e/2}.
    pub fn v_pow(e: i64) -> Self {
        RatFunc { num: LaurentHalf::v_pow(e), den: LaurentHalf::one() }
    }

    /// q^n.
    pub fn q_pow(n: i64) -> Self {
        RatFunc { num: LaurentHalf::q_pow(n), den: LaurentHalf::one() }
    }

    pub fn from_laurent(p: LaurentHalf) -> Self {
        RatFunc { num: p, den: LaurentHalf::one() }
    }

    pub fn new(num: LaurentHalf, den: LaurentHalf) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: LaurentHalf, den: LaurentHalf) -> Self {
        debug_assert!(!den.is_zero());
        if num.is_zero() {
            return RatFunc::zero();
        }
        if den.is_one() {
            return RatFunc { num, den };
        }
        let (nd, nlo) = num.to_dense();
        let (dd, dlo) = den.to_dense();
        // strip integer content
        let cn = poly_content(&nd);
        let cd = poly_content(&dd);
        let g = cn.gcd(&cd);
        let nd: Vec<BigInt> = nd.iter().map(|c| c / &g).collect();
        let dd: Vec<BigInt> = dd.iter().map(|c| c / &g).collect();
        // strip polynomial gcd
        let pg = poly_gcd(&nd, &dd);
        let (nd, dd) = if pg.len() > 1 {
            (
                poly_div_exact(&nd, &pg).expect("gcd divides num"),
                poly_div_exact(&dd, &pg).expect("gcd divides den"),
            )
        } else {
            (nd, dd)
        };
        // sign: lowest coefficient of den positive
        let neg = dd.iter().find(|c| !c.is_zero()).is_some_and(|c| c.is_negative());
        let fix = |v: Vec<BigInt>| -> Vec<BigInt> {
            if neg {
                v.into_iter().map(|c| -c).collect()
            } else {
                v
            }
        };
        let nd = fix(nd);
        let dd = fix(dd);
        // den gets valuation 0, the shift moves into num
        let dval = dd.iter().position(|c| !c.is_zero()).unwrap() as i64;
        let num = LaurentHalf::from_dense(&nd, nlo - dlo - dval);
        let den = LaurentHalf::from_dense(&dd, -dval);
        RatFunc { num, den }
    }

    pub fn num(&self) -> &LaurentHalf {
        &self.num
    }

    pub fn den(&self) -> &LaurentHalf {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn inv(&self) -> Result<RatFunc> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(Self::reduced(self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, rhs: &RatFunc) -> Result<RatFunc> {
        Ok(self * &rhs.inv()?)
    }

    /// The bar involution q^{1/2} -> q^{-1/2}.
    pub fn bar(&self) -> RatFunc {
        Self::reduced(self.num.bar(), self.den.bar())
    }

    /// True when the denominator is a (nonzero) integer constant, i.e. the
    /// element is a Laurent polynomial over Q.
    pub fn is_laurent(&self) -> bool {
        self.den.is_constant()
    }

    /// True when the denominator is 1, i.e. the element lies in Z[q^{±1/2}].
    pub fn is_integer_laurent(&self) -> bool {
        self.den.is_one()
    }

    /// True when the element lies in Z[q^{±1}] (integer coefficients, whole
    /// powers of q only).
    pub fn is_integer_laurent_whole_powers(&self) -> bool {
        self.den.is_one() && self.num.whole_q_powers()
    }

    /// v-adic valuation, None for zero. Nonnegative iff regular at q = 0.
    pub fn valuation(&self) -> Option<i64> {
        self.num.min_exp()
    }

    /// First `n` coefficients of the power-series expansion at v = 0 as exact
    /// rationals. Fails with NotRegularAtZero when there is a pole.
    pub fn series_at_zero_rational(&self, n: usize) -> Result<Vec<BigRational>> {
        if self.is_zero() {
            return Ok(vec![BigRational::zero(); n]);
        }
        if self.num.min_exp().unwrap() < 0 {
            return Err(Error::NotRegularAtZero);
        }
        let d0 = BigRational::from(self.den.coeff(0));
        let mut out: Vec<BigRational> = Vec::with_capacity(n);
        for k in 0..n as i64 {
            let mut acc = BigRational::from(self.num.coeff(k));
            for j in 1..=k {
                let dj = self.den.coeff(j);
                if dj.is_zero() {
                    continue;
                }
                acc -= BigRational::from(dj) * &out[(k - j) as usize];
            }
            out.push(acc / &d0);
        }
        Ok(out)
    }

    /// First `n` series coefficients at v = 0, required to be integers.
    pub fn series_at_zero(&self, n: usize) -> Result<Vec<BigInt>> {
        let rat = self.series_at_zero_rational(n)?;
        rat.into_iter()
            .map(|c| {
                if c.is_integer() {
                    Ok(c.to_integer())
                } else {
                    Err(Error::NonIntegerSeries)
                }
            })
            .collect()
    }

    /// Evaluate at v = r (debug-only rational specialization); None when the
    /// denominator vanishes there.
    pub fn eval_v(&self, r: &BigRational) -> Option<BigRational> {
        let d = self.den.eval_v(r)?;
        if d.is_zero() {
            return None;
        }
        let n = self.num.eval_v(r)?;
        Some(n / d)
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc { num: &self.num + &rhs.num, den: LaurentHalf::one() };
        }
        let num = &(&self.num * &rhs.den) + &(&rhs.num * &self.den);
        let den = &self.den * &rhs.den;
        RatFunc::reduced(num, den)
    }
}

impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.is_zero() || rhs.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc { num: &self.num * &rhs.num, den: LaurentHalf::one() };
        }
        RatFunc::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc { num: -&self.num, den: self.den.clone() }
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl AddAssign<&RatFunc> for RatFunc {
    fn add_assign(&mut self, rhs: &RatFunc) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&RatFunc> for RatFunc {
    fn sub_assign(&mut self, rhs: &RatFunc) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&RatFunc> for RatFunc {
    fn mul_assign(&mut self, rhs: &RatFunc) {
        *self = &*self * rhs;
    }
}

// --- q-integers ---

/// [n]_{q_i} with q_i = q^{d}; a symmetric Laurent polynomial.
pub fn q_int(n: u64, d: i64) -> LaurentHalf {
    let mut out = LaurentHalf::zero();
    for k in 0..n as i64 {
        out.add_term(2 * d * (2 * k - n as i64 + 1), BigInt::one());
    }
    out
}

/// [n]_{q_i}!.
pub fn q_factorial(n: u64, d: i64) -> LaurentHalf {
    let mut out = LaurentHalf::one();
    for k in 1..=n {
        out = &out * &q_int(k, d);
    }
    out
}

/// Gaussian binomial [m over n]_{q_i}.
pub fn q_binom(m: u64, n: u64, d: i64) -> LaurentHalf {
    if n > m {
        return LaurentHalf::zero();
    }
    let mut out = LaurentHalf::one();
    for k in 1..=n {
        out = &out * &q_int(m - n + k, d);
        out = out.div_exact(&q_int(k, d)).expect("q-binomials are Laurent polynomials");
    }
    out
}

// --- rendering ---

fn exp_str(e: i64) -> String {
    // e is the v-exponent, i.e. the element is q^{e/2}
    if e == 0 {
        return String::new();
    }
    if e % 2 == 0 {
        let k = e / 2;
        if k == 1 {
            "q".to_string()
        } else if k > 1 {
            format!("q^{}", k)
        } else {
            format!("q^{{{}}}", k)
        }
    } else {
        format!("q^{{{}/2}}", e)
    }
}

impl fmt::Display for LaurentHalf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.coeffs {
            let mag = c.abs();
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
                first = false;
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let q = exp_str(*e);
            if q.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", q)?;
            } else {
                write!(f, "{}*{}", mag, q)?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            return write!(f, "{}", self.num);
        }
        let n = format!("{}", self.num);
        let d = format!("{}", self.den);
        let np = if self.num.num_terms() > 1 { format!("({})", n) } else { n };
        let dp = if self.den.num_terms() > 1 { format!("({})", d) } else { d };
        write!(f, "{}/{}", np, dp)
    }
}
