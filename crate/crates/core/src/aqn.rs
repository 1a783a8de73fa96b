//! The quantum unipotent coordinate ring A_q(n), carried on U_q^-(g) through
//! the isomorphism iota, together with the twisted bar endomorphism, the
//! integral form, dual PBW vectors (finite type) and the upper global basis.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed};

use crate::cartan::RootVec;
use crate::error::{Error, Result};
use crate::linalg::{self, Lu, Matrix};
use crate::scalars::{LaurentHalf, RatFunc};
use crate::uqneg::{depth_root, Algebra, Depth, FreeElem, UqmElem};

/// Element of A_q(n), stored by its carrier iota^{-1}(f) in U_q^-(g).
///
/// Multiplication of carriers is multiplication in A_q(n); the generator <i>
/// has carrier (1 - q_i^2) f_i.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct AqnElem {
    pub carrier: UqmElem,
}

impl AqnElem {
    pub fn zero() -> Self {
        AqnElem { carrier: UqmElem::zero() }
    }

    pub fn one(rank: usize) -> Self {
        AqnElem { carrier: UqmElem::one(rank) }
    }

    pub fn is_zero(&self) -> bool {
        self.carrier.is_zero()
    }

    pub fn add(&self, rhs: &AqnElem) -> AqnElem {
        AqnElem { carrier: self.carrier.add(&rhs.carrier) }
    }

    pub fn scale(&self, c: &RatFunc) -> AqnElem {
        AqnElem { carrier: self.carrier.scale(c) }
    }

    /// Weight in Q^- for a homogeneous element.
    pub fn weight(&self) -> Option<RootVec> {
        self.carrier.weight()
    }
}

impl Algebra {
    /// The dual generator <i> = iota((1 - q_i^2) f_i).
    pub fn aqn_generator(&self, i: usize) -> Result<AqnElem> {
        let f = self.uq_generator(i)?;
        Ok(AqnElem { carrier: f.scale(&self.zeta_i(i)) })
    }

    /// iota(u), i.e. the A_q(n) element carried by u.
    pub fn iota(&self, u: UqmElem) -> AqnElem {
        AqnElem { carrier: u }
    }

    pub fn aqn_mul(&self, a: &AqnElem, b: &AqnElem) -> Result<AqnElem> {
        Ok(AqnElem { carrier: self.uq_mul(&a.carrier, &b.carrier)? })
    }

    fn kform_components(&self, depth: &Depth, v1: &[RatFunc], v2: &[RatFunc]) -> Result<RatFunc> {
        let basis = self.weight_basis(depth)?;
        let mut acc = RatFunc::zero();
        for (a, x) in v1.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (b, y) in v2.iter().enumerate() {
                if y.is_zero() || basis.gram[a][b].is_zero() {
                    continue;
                }
                acc += &(&(x * y) * &basis.gram[a][b]);
            }
        }
        Ok(acc)
    }

    /// The form << , >> on A_q(n): on carriers u, v of weight beta it equals
    /// zeta^{beta} <u, v> (and 0 across distinct weights).
    pub fn aform(&self, x: &AqnElem, y: &AqnElem) -> Result<RatFunc> {
        let mut acc = RatFunc::zero();
        for (depth, v1) in &x.carrier.coords {
            let Some(v2) = y.carrier.coords.get(depth) else {
                continue;
            };
            let k = self.kform_components(depth, v1, v2)?;
            if k.is_zero() {
                continue;
            }
            let zeta = self.cartan().zeta_pow_neg(&depth_root(depth))?;
            acc += &(&zeta * &k);
        }
        Ok(acc)
    }

    /// The canonical pairing of f in A_q(n) against u in U_q^-(g).
    pub fn pair_against_u(&self, f: &AqnElem, u: &UqmElem) -> Result<RatFunc> {
        let mut acc = RatFunc::zero();
        for (depth, v1) in &f.carrier.coords {
            let Some(v2) = u.coords.get(depth) else {
                continue;
            };
            let k = self.kform_components(depth, v1, v2)?;
            if k.is_zero() {
                continue;
            }
            let zeta = self.cartan().zeta_pow_neg(&depth_root(depth))?;
            acc += &(&zeta * &k);
        }
        Ok(acc)
    }

    /// The twisted bar endomorphism of A_q(n): on a word in the dual
    /// generators it reverses the word, bars the coefficient and multiplies by
    /// the q-power collected from c(fg) = q^{(wt f, wt g)} c(g) c(f).
    pub fn c_map(&self, f: &AqnElem) -> Result<AqnElem> {
        let expanded = self.expand(&f.carrier)?;
        let mut out = FreeElem::zero();
        for (w, p) in &expanded.terms {
            // E(w) = sum over ordered pairs of positions of (alpha_a, alpha_b)
            let mut e = 0i64;
            for a in 0..w.len() {
                for b in a + 1..w.len() {
                    e += self.cartan().sym(w[a], w[b]);
                }
            }
            let dsum: i64 = w.iter().map(|&k| self.cartan().d(k)).sum();
            let mut coeff = p.bar();
            coeff *= &RatFunc::v_pow(2 * e + 4 * dsum);
            if w.len() % 2 == 1 {
                coeff = -coeff;
            }
            let mut rev = w.clone();
            rev.reverse();
            out.insert(rev, coeff);
        }
        Ok(AqnElem { carrier: self.reduce(&out)? })
    }

    /// Membership in the integral form: all pairings against the divided-power
    /// spanning set of U_{Z[q^{±1}]}^- lie in Z[q^{±1}].
    pub fn is_integral_aqn(&self, f: &AqnElem) -> Result<bool> {
        for depth in f.carrier.coords.keys() {
            for m in self.divided_monomials(depth)?.iter() {
                let v = self.pair_against_u(f, m)?;
                if !v.is_integer_laurent_whole_powers() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// iota(zeta_i^{-n} e_i'^{(n)}(a)) for the carrier a of `f`; preserves the
    /// integral form.
    pub fn zeta_scaled_eprime(&self, i: usize, n: u64, f: &AqnElem) -> Result<AqnElem> {
        let mut x = self.expand(&f.carrier)?;
        for _ in 0..n {
            x = self.e_prime(i, &x);
        }
        let mut scalar = self.cartan().q_factorial_i(n, i).inv().expect("nonzero");
        let zeta_inv = self.zeta_i(i).inv().expect("nonzero");
        for _ in 0..n {
            scalar = &scalar * &zeta_inv;
        }
        Ok(AqnElem { carrier: self.reduce(&x.scale(&scalar))? })
    }

    /// Membership in the lattice spanned by the upper global basis:
    /// self-pairing regular at q = 0 with integer series prefix.
    pub fn lup_member(&self, f: &AqnElem) -> Result<bool> {
        let s = self.aform(f, f)?;
        match s.series_at_zero(self.series_depth()) {
            Ok(_) => Ok(true),
            Err(Error::NotRegularAtZero) | Err(Error::NonIntegerSeries) => Ok(false),
            Err(e) => Err(e),
        }
    }
}

/// A reduced word for the longest element of a finite-type Weyl group,
/// together with the convex order beta_1 < ... < beta_l it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedWord {
    pub word: Vec<usize>,
    pub roots: Vec<RootVec>,
}

impl ReducedWord {
    pub fn new(alg: &Algebra, word: Vec<usize>) -> Result<Self> {
        let cartan = alg.cartan();
        let all = cartan.positive_roots()?;
        if word.len() != all.len() {
            return Err(Error::InvalidReducedWord(format!(
                "length {} but the type has {} positive roots",
                word.len(),
                all.len()
            )));
        }
        let mut roots: Vec<RootVec> = Vec::with_capacity(word.len());
        for (k, &ik) in word.iter().enumerate() {
            cartan.check_index(ik)?;
            let mut b = cartan.alpha(ik);
            for &i in word[..k].iter().rev() {
                b = cartan.reflect(i, &b);
            }
            if !b.is_nonnegative() {
                return Err(Error::InvalidReducedWord(format!(
                    "prefix of length {} is not reduced",
                    k + 1
                )));
            }
            if roots.contains(&b) {
                return Err(Error::InvalidReducedWord("repeated root".into()));
            }
            roots.push(b);
        }
        Ok(ReducedWord { word, roots })
    }

    /// Lexicographically smallest reduced word, by greedy extension.
    pub fn lex_smallest(alg: &Algebra) -> Result<Self> {
        let cartan = alg.cartan();
        let total = cartan.positive_roots()?.len();
        let mut word: Vec<usize> = Vec::with_capacity(total);
        for _ in 0..total {
            let mut found = None;
            'search: for i in 0..cartan.rank() {
                // l(w s_i) > l(w) iff w(alpha_i) is positive
                let mut b = cartan.alpha(i);
                for &j in word.iter().rev() {
                    b = cartan.reflect(j, &b);
                }
                if b.is_nonnegative() {
                    found = Some(i);
                    break 'search;
                }
            }
            let i = found.ok_or_else(|| {
                Error::InvalidReducedWord("greedy search stalled before w0".into())
            })?;
            word.push(i);
        }
        Self::new(alg, word)
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

/// Dual PBW vectors attached to a reduced word: F(beta_k) for every positive
/// root, built by the minimal-pair q-bracket with a Gram-Schmidt fallback and
/// verified against integrality, q = 0 normalization and orthogonality.
pub struct DualPbw {
    pub rw: ReducedWord,
    pub vectors: Vec<AqnElem>,
}

impl DualPbw {
    pub fn new(alg: &Algebra, rw: ReducedWord) -> Result<Arc<Self>> {
        let l = rw.len();
        let mut vectors: Vec<Option<AqnElem>> = vec![None; l];
        let mut order: Vec<usize> = (0..l).collect();
        order.sort_by_key(|&k| alg.cartan().ht(&rw.roots[k]));
        for &k in &order {
            let beta = &rw.roots[k];
            if alg.cartan().ht(beta) == 1 {
                let i = beta.0.iter().position(|&a| a == 1).unwrap();
                vectors[k] = Some(alg.aqn_generator(i)?);
                continue;
            }
            let depth: Depth = beta.0.iter().map(|&a| a as usize).collect();
            let mut f: Option<AqnElem> = None;
            if let Some(dir) = bracket_candidate(alg, &rw, &vectors, k)? {
                if let Ok(cand) = normalize_root_vector(alg, &depth, &dir) {
                    if verify_root_vector(alg, &rw, &vectors, k, &cand)? {
                        f = Some(cand);
                    }
                }
            }
            let f = match f {
                Some(f) => f,
                None => {
                    let dir = gram_schmidt_direction(alg, &rw, &vectors, k)?;
                    let cand = normalize_root_vector(alg, &depth, &dir)?;
                    if !verify_root_vector(alg, &rw, &vectors, k, &cand)? {
                        return Err(Error::VerificationFailed(format!(
                            "dual root vector at position {k} fails (a)-(c)"
                        )));
                    }
                    cand
                }
            };
            vectors[k] = Some(f);
        }
        Ok(Arc::new(DualPbw { rw, vectors: vectors.into_iter().map(|v| v.unwrap()).collect() }))
    }

    pub fn root(&self, k: usize) -> &RootVec {
        &self.rw.roots[k]
    }

    pub fn len(&self) -> usize {
        self.rw.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rw.is_empty()
    }
}

/// Exponent vectors a with sum a_k beta_k = target (coordinates of a depth).
pub fn exponent_vectors(roots: &[RootVec], target: &Depth) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize; roots.len()];
    let target: Vec<i64> = target.iter().map(|&a| a as i64).collect();
    fn rec(
        roots: &[RootVec],
        k: usize,
        remaining: &mut Vec<i64>,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining.iter().all(|&a| a == 0) {
            let mut c = current.clone();
            for a in c.iter_mut().skip(k) {
                *a = 0;
            }
            out.push(c);
            return;
        }
        if k == roots.len() {
            return;
        }
        // max multiplicity of roots[k] inside remaining
        let mut max = i64::MAX;
        for (r, rem) in roots[k].0.iter().zip(remaining.iter()) {
            if *r > 0 {
                max = max.min(rem / r);
            }
        }
        if max == i64::MAX {
            max = 0;
        }
        for n in (0..=max.max(0)).rev() {
            for (slot, r) in remaining.iter_mut().zip(roots[k].0.iter()) {
                *slot -= n * r;
            }
            let ok = remaining.iter().all(|&a| a >= 0);
            if ok {
                current[k] = n as usize;
                rec(roots, k + 1, remaining, current, out);
            }
            for (slot, r) in remaining.iter_mut().zip(roots[k].0.iter()) {
                *slot += n * r;
            }
        }
        current[k] = 0;
    }
    let mut remaining = target;
    rec(roots, 0, &mut remaining, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Ordered product F(beta_l)^{a_l} ... F(beta_1)^{a_1} without the q-power.
fn raw_monomial(alg: &Algebra, vectors: &[Option<AqnElem>], a: &[usize]) -> Result<AqnElem> {
    let rank = alg.rank();
    let mut acc = AqnElem::one(rank);
    for k in (0..a.len()).rev() {
        for _ in 0..a[k] {
            let f = vectors[k].as_ref().expect("smaller-height vector already built");
            acc = alg.aqn_mul(&acc, f)?;
        }
    }
    Ok(acc)
}

fn bracket_candidate(
    alg: &Algebra,
    rw: &ReducedWord,
    vectors: &[Option<AqnElem>],
    k: usize,
) -> Result<Option<AqnElem>> {
    // minimal pair: gamma = beta_a < beta_k < beta_b = delta with
    // gamma + delta = beta_k, a maximal then b minimal
    let mut best: Option<(usize, usize)> = None;
    for a in (0..k).rev() {
        for b in k + 1..rw.len() {
            if (&rw.roots[a] + &rw.roots[b]) == rw.roots[k] {
                best = Some((a, b));
                break;
            }
        }
        if best.is_some() {
            break;
        }
    }
    let Some((a, b)) = best else {
        return Ok(None);
    };
    let (gamma, delta) = (&rw.roots[a], &rw.roots[b]);
    let pairing = alg.cartan().form(gamma, delta);
    let denom = &RatFunc::one() - &RatFunc::q_pow(-2 * pairing);
    if denom.is_zero() {
        return Ok(None);
    }
    let fg = vectors[a].as_ref().unwrap();
    let fd = vectors[b].as_ref().unwrap();
    let lhs = alg.aqn_mul(fg, fd)?;
    let rhs = alg.aqn_mul(fd, fg)?.scale(&RatFunc::q_pow(-pairing));
    let num = lhs.add(&rhs.scale(&-&RatFunc::one()));
    Ok(Some(num.scale(&denom.inv()?)))
}

/// (a) integral, (b) self-pairing in 1 + q Z[[q]] prefix, (c) orthogonal to
/// monomials in the other roots of the same weight.
fn verify_root_vector(
    alg: &Algebra,
    rw: &ReducedWord,
    vectors: &[Option<AqnElem>],
    k: usize,
    f: &AqnElem,
) -> Result<bool> {
    if !alg.is_integral_aqn(f)? {
        return Ok(false);
    }
    let s = alg.aform(f, f)?;
    match s.series_at_zero(1) {
        Ok(prefix) if prefix == vec![BigInt::one()] => {}
        _ => return Ok(false),
    }
    let depth: Depth = rw.roots[k].0.iter().map(|&a| a as usize).collect();
    for a in exponent_vectors(&rw.roots, &depth) {
        if a.iter().enumerate().all(|(j, &n)| (j == k) == (n == 1) || n == 0)
            && a[k] == 1
        {
            continue; // the unit vector at k itself
        }
        let m = raw_monomial(alg, vectors, &a)?;
        if !alg.aform(f, &m)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The one-dimensional orthogonal complement of the monomials in the other
/// roots, with an arbitrary scale.
fn gram_schmidt_direction(
    alg: &Algebra,
    rw: &ReducedWord,
    vectors: &[Option<AqnElem>],
    k: usize,
) -> Result<AqnElem> {
    let depth: Depth = rw.roots[k].0.iter().map(|&a| a as usize).collect();
    let basis = alg.weight_basis(&depth)?;
    let dim = basis.dim();
    let mut rows: Matrix = Vec::new();
    for a in exponent_vectors(&rw.roots, &depth) {
        if a[k] > 0 {
            continue; // skip the unit vector at k
        }
        let m = raw_monomial(alg, vectors, &a)?;
        let coords = m.carrier.coords.get(&depth).cloned().unwrap_or_default();
        // constraint <x, m> = 0 reads x^T (G m) = 0
        let mut row = vec![RatFunc::zero(); dim];
        for (col, slot) in row.iter_mut().enumerate() {
            for (b, c) in coords.iter().enumerate() {
                if !c.is_zero() && !basis.gram[col][b].is_zero() {
                    *slot += &(&basis.gram[col][b] * c);
                }
            }
        }
        rows.push(row);
    }
    let null = linalg::nullspace(&rows);
    if null.len() != 1 {
        return Err(Error::VerificationFailed(format!(
            "orthogonal complement at position {k} has dimension {}",
            null.len()
        )));
    }
    Ok(AqnElem {
        carrier: UqmElem { coords: [(depth, null.into_iter().next().unwrap())].into() },
    })
}

/// Canonical representative on a ray: the primitive integral vector (the
/// pairings against the divided-power lattice acquire content 1 in
/// Z[q^{±1}]), with the q-power fixed by the valuation of the self-pairing
/// and the sign by the first nonzero pairing.
pub fn normalize_root_vector(alg: &Algebra, depth: &Depth, x: &AqnElem) -> Result<AqnElem> {
    let duals = alg.divided_monomials(depth)?;
    let mut pairings: Vec<RatFunc> = Vec::new();
    let mut den = LaurentHalf::one();
    for m in duals.iter() {
        let v = alg.pair_against_u(x, m)?;
        if !v.is_zero() {
            den = den.lcm(v.den());
            pairings.push(v);
        }
    }
    if pairings.is_empty() {
        return Err(Error::VerificationFailed(
            "candidate pairs to zero against the whole lattice".into(),
        ));
    }
    let mut g = LaurentHalf::zero();
    for p in &pairings {
        let lift = p.num() * &den.div_exact(p.den()).expect("lcm divides");
        g = g.gcd(&lift);
    }
    let mut f = x.scale(&RatFunc::new(den, g)?);
    // the q-power: the self-pairing valuation must be an even v-power
    let s = alg.aform(&f, &f)?;
    let val = s
        .valuation()
        .ok_or_else(|| Error::VerificationFailed("zero self-pairing".into()))?;
    if val % 2 != 0 {
        return Err(Error::NormalizationFailed("odd valuation of self-pairing".into()));
    }
    f = f.scale(&RatFunc::v_pow(-val / 2));
    let s = alg.aform(&f, &f)?;
    if s.series_at_zero_rational(1)?[0] != BigRational::one() {
        return Err(Error::NormalizationFailed(
            "self-pairing constant term of the primitive vector is not 1".into(),
        ));
    }
    // sign: first nonzero pairing has a positive lowest coefficient
    for m in duals.iter() {
        let v = alg.pair_against_u(&f, m)?;
        if v.is_zero() {
            continue;
        }
        let lead = v.num().coeff(v.num().min_exp().unwrap());
        if lead.is_negative() {
            f = f.scale(&-&RatFunc::one());
        }
        break;
    }
    Ok(f)
}

/// Dual PBW monomial: the convex-descending product with the unique q-power
/// making the self-pairing lie in 1 + q Z[[q]].
pub fn dual_pbw_monomial(alg: &Algebra, pbw: &DualPbw, a: &[usize]) -> Result<AqnElem> {
    let vectors: Vec<Option<AqnElem>> = pbw.vectors.iter().cloned().map(Some).collect();
    let p = raw_monomial(alg, &vectors, a)?;
    let s = alg.aform(&p, &p)?;
    let val = s
        .valuation()
        .ok_or_else(|| Error::NormalizationFailed("zero self-pairing".into()))?;
    if val % 2 != 0 {
        return Err(Error::NormalizationFailed(
            "self-pairing valuation is not an even v-power".into(),
        ));
    }
    let m = p.scale(&RatFunc::v_pow(-val / 2));
    let s = alg.aform(&m, &m)?;
    let c0 = s.series_at_zero_rational(1)?[0].clone();
    if c0 != BigRational::one() {
        return Err(Error::NormalizationFailed(format!(
            "self-pairing constant term {c0} cannot be fixed by a q-power"
        )));
    }
    Ok(m)
}

/// One weight block of the upper global basis: dual PBW monomials, the
/// triangular c-fixing outputs and both change-of-basis matrices.
pub struct GupBlock {
    pub depth: Depth,
    pub indices: Vec<Vec<usize>>,
    pub monomials: Vec<AqnElem>,
    pub basis_dim: usize,
    pub g: Vec<AqnElem>,
    /// g_over_m[j] = expansion of g[j] over the monomial basis (diagonal 1).
    pub g_over_m: Matrix,
    m_lu: Lu,
    order: Vec<usize>,
}

impl GupBlock {
    /// Expand a homogeneous element of this weight over the monomial basis.
    pub fn expand_over_m(&self, x: &AqnElem) -> Vec<RatFunc> {
        let coords = x
            .carrier
            .coords
            .get(&self.depth)
            .cloned()
            .unwrap_or_else(|| vec![RatFunc::zero(); self.basis_dim]);
        self.m_lu.solve(&coords)
    }

    /// Expand over the G basis.
    pub fn expand_over_g(&self, x: &AqnElem) -> Vec<RatFunc> {
        triangular_convert(&self.expand_over_m(x), &self.g_over_m, &self.order)
    }

    pub fn local_index_of(&self, a: &[usize]) -> Option<usize> {
        self.indices.iter().position(|x| x == a)
    }
}

/// Cache of upper-global-basis blocks for a fixed reduced word.
pub struct GupTable {
    alg: Arc<Algebra>,
    pbw: Arc<DualPbw>,
    blocks: RwLock<HashMap<Depth, Arc<GupBlock>>>,
}

impl GupTable {
    pub fn new(alg: Arc<Algebra>, pbw: Arc<DualPbw>) -> Self {
        GupTable { alg, pbw, blocks: RwLock::new(HashMap::new()) }
    }

    pub fn algebra(&self) -> &Arc<Algebra> {
        &self.alg
    }

    pub fn pbw(&self) -> &Arc<DualPbw> {
        &self.pbw
    }

    pub fn block(&self, depth: &Depth) -> Result<Arc<GupBlock>> {
        if let Some(b) = self.blocks.read().unwrap().get(depth) {
            return Ok(b.clone());
        }
        let built = self.build_block(depth)?;
        let mut cache = self.blocks.write().unwrap();
        let entry = cache.entry(depth.clone()).or_insert_with(|| Arc::new(built));
        Ok(entry.clone())
    }

    /// G^up attached to a local PBW index.
    pub fn gup(&self, a: &[usize]) -> Result<AqnElem> {
        let depth = self.index_depth(a);
        let block = self.block(&depth)?;
        let j = block
            .local_index_of(a)
            .ok_or_else(|| Error::VerificationFailed("index missing from its block".into()))?;
        Ok(block.g[j].clone())
    }

    pub fn index_depth(&self, a: &[usize]) -> Depth {
        let rank = self.alg.rank();
        let mut depth = vec![0usize; rank];
        for (k, &n) in a.iter().enumerate() {
            for (slot, r) in depth.iter_mut().zip(self.pbw.rw.roots[k].0.iter()) {
                *slot += n * (*r as usize);
            }
        }
        depth
    }

    /// All depths with height between 1 and `h`.
    pub fn depths_to_height(&self, h: usize) -> Vec<Depth> {
        let rank = self.alg.rank();
        let mut out = Vec::new();
        let mut current = vec![0usize; rank];
        fn rec(out: &mut Vec<Depth>, current: &mut Depth, k: usize, left: usize) {
            if k == current.len() {
                if current.iter().any(|&a| a > 0) {
                    out.push(current.clone());
                }
                return;
            }
            for n in 0..=left {
                current[k] = n;
                rec(out, current, k + 1, left - n);
            }
            current[k] = 0;
        }
        rec(&mut out, &mut current, 0, h);
        out.sort();
        out
    }

    fn build_block(&self, depth: &Depth) -> Result<GupBlock> {
        let alg = &*self.alg;
        let basis = alg.weight_basis(depth)?;
        let dim = basis.dim();
        let indices = exponent_vectors(&self.pbw.rw.roots, depth);
        if indices.len() != dim {
            return Err(Error::VerificationFailed(format!(
                "{} PBW indices but weight-space dimension {} at {:?}",
                indices.len(),
                dim,
                depth
            )));
        }
        let monomials: Vec<AqnElem> = indices
            .iter()
            .map(|a| dual_pbw_monomial(alg, &self.pbw, a))
            .collect::<Result<_>>()?;
        // pairwise orthogonality of dual PBW monomials
        for i in 0..monomials.len() {
            for j in 0..i {
                if !alg.aform(&monomials[i], &monomials[j])?.is_zero() {
                    return Err(Error::VerificationFailed(
                        "dual PBW monomials are not pairwise orthogonal".into(),
                    ));
                }
            }
        }
        let m_rows: Matrix = monomials
            .iter()
            .map(|m| {
                m.carrier
                    .coords
                    .get(depth)
                    .cloned()
                    .unwrap_or_else(|| vec![RatFunc::zero(); dim])
            })
            .collect();
        // columns of the solve are the monomial coordinates
        let m_cols: Matrix =
            (0..dim).map(|r| (0..dim).map(|c| m_rows[c][r].clone()).collect()).collect();
        drop(m_rows);
        let m_lu = Lu::factor(&m_cols)
            .ok_or_else(|| Error::VerificationFailed("monomials do not span the block".into()))?;
        // expansions of c(M_j) over the monomial basis
        let mut transitions: Matrix = Vec::with_capacity(indices.len());
        for m in &monomials {
            let cm = alg.c_map(m)?;
            let coords = cm.carrier.coords.get(depth).cloned().unwrap_or_else(|| vec![RatFunc::zero(); dim]);
            let p = m_lu.solve(&coords);
            for (j2, c) in p.iter().enumerate() {
                if !c.is_integer_laurent_whole_powers() {
                    return Err(Error::NonIntegralTransition(format!(
                        "c(M) coefficient {c} at index {:?}",
                        indices[j2]
                    )));
                }
            }
            transitions.push(p);
        }
        let order = topological_order(&transitions)?;
        // triangular c-fixing in dependency order
        let n = indices.len();
        let mut g: Vec<Option<AqnElem>> = vec![None; n];
        let mut g_over_m: Vec<Option<Vec<RatFunc>>> = vec![None; n];
        let mut processed: Vec<usize> = Vec::new();
        for &j in &order {
            if !transitions[j][j].is_one() {
                return Err(Error::Triangularity(format!(
                    "diagonal coefficient of c(M) is {} at {:?}",
                    transitions[j][j], indices[j]
                )));
            }
            let mut w = transitions[j].clone();
            w[j] = RatFunc::zero();
            // convert the correction over M into an expansion over processed G
            let mut g_coeffs: Vec<(usize, RatFunc)> = Vec::new();
            for &jp in processed.iter().rev() {
                if w[jp].is_zero() {
                    continue;
                }
                let p = w[jp].clone();
                let exp = g_over_m[jp].as_ref().unwrap();
                for (slot, c) in w.iter_mut().zip(exp) {
                    if !c.is_zero() {
                        *slot -= &(&p * c);
                    }
                }
                g_coeffs.push((jp, p));
            }
            if w.iter().any(|c| !c.is_zero()) {
                return Err(Error::Triangularity(format!(
                    "correction of c(M) escapes the processed span at {:?}",
                    indices[j]
                )));
            }
            // split each antisymmetric transition p = f(q) - f(q^{-1})
            let mut elem = monomials[j].clone();
            let mut row = vec![RatFunc::zero(); n];
            row[j] = RatFunc::one();
            for (jp, p) in g_coeffs {
                let bar = p.bar();
                if !(&bar + &p).is_zero() {
                    return Err(Error::NonAntisymmetric(format!(
                        "transition {p} at {:?}",
                        indices[j]
                    )));
                }
                let f = positive_part(&p);
                if f.is_zero() {
                    continue;
                }
                elem = elem.add(&g[jp].as_ref().unwrap().scale(&f));
                let exp = g_over_m[jp].as_ref().unwrap().clone();
                for (slot, c) in row.iter_mut().zip(&exp) {
                    if !c.is_zero() {
                        *slot += &(&f * c);
                    }
                }
            }
            g[j] = Some(elem);
            g_over_m[j] = Some(row);
            processed.push(j);
        }
        Ok(GupBlock {
            depth: depth.clone(),
            indices,
            monomials,
            basis_dim: dim,
            g: g.into_iter().map(|x| x.unwrap()).collect(),
            g_over_m: g_over_m.into_iter().map(|x| x.unwrap()).collect(),
            m_lu,
            order,
        })
    }
}

/// Keep only the strictly positive powers of q (the f(q) part of an
/// antisymmetric Laurent polynomial).
pub fn positive_part(p: &RatFunc) -> RatFunc {
    let num = p.num();
    let kept = LaurentHalf::from_pairs(
        num.iter().filter(|(e, _)| **e > 0).map(|(e, c)| (*e, c.clone())),
    );
    RatFunc::from_laurent(kept)
}

/// Dependency order: process j' before j whenever j' appears in the
/// correction of c(M_j). Fails on cycles.
fn topological_order(transitions: &Matrix) -> Result<Vec<usize>> {
    let n = transitions.len();
    let mut state = vec![0u8; n]; // 0 unvisited, 1 in progress, 2 done
    let mut order = Vec::with_capacity(n);
    fn visit(
        j: usize,
        transitions: &Matrix,
        state: &mut Vec<u8>,
        order: &mut Vec<usize>,
    ) -> Result<()> {
        match state[j] {
            2 => return Ok(()),
            1 => return Err(Error::Triangularity("cycle in transition supports".into())),
            _ => {}
        }
        state[j] = 1;
        for j2 in 0..transitions.len() {
            if j2 != j && !transitions[j][j2].is_zero() {
                visit(j2, transitions, state, order)?;
            }
        }
        state[j] = 2;
        order.push(j);
        Ok(())
    }
    for j in 0..n {
        visit(j, transitions, &mut state, &mut order)?;
    }
    Ok(order)
}

/// Solve w = sum c_j G_j given the unitriangular rows of G over M and the
/// processing order (dependencies first).
fn triangular_convert(w: &[RatFunc], g_over_m: &Matrix, order: &[usize]) -> Vec<RatFunc> {
    let mut w = w.to_vec();
    let mut out = vec![RatFunc::zero(); w.len()];
    for &j in order.iter().rev() {
        if w[j].is_zero() {
            continue;
        }
        let c = w[j].clone();
        for (slot, x) in w.iter_mut().zip(&g_over_m[j]) {
            if !x.is_zero() {
                *slot -= &(&c * x);
            }
        }
        out[j] = c;
    }
    debug_assert!(w.iter().all(|c| c.is_zero()));
    out
}
