//! The negative half U_q^-(g), realized as the free algebra on the f_i modulo
//! the radical of the Kashiwara form.
//!
//! Equality is decided through canonical coordinates: for each weight we cache
//! a maximal form-independent set of words (greedy Gram-rank scan in
//! lexicographic order) together with the LU factorization of its Gram matrix.
//! The form itself is computed by the e'-adjunction recursion; the coproduct
//! is never materialized.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::cartan::{CartanDatum, RootVec, Sign};
use crate::error::{Error, Result};
use crate::linalg::{Lu, Matrix};
use crate::scalars::RatFunc;

/// Monomial in the generators f_i, stored as the sequence of indices.
pub type Word = Vec<usize>;

/// Letter multiset of a word: depth[i] = multiplicity of f_i. The weight of
/// a word of depth d is -sum d_i alpha_i.
pub type Depth = Vec<usize>;

pub fn word_depth(word: &Word, rank: usize) -> Depth {
    let mut d = vec![0usize; rank];
    for &i in word {
        d[i] += 1;
    }
    d
}

pub fn depth_root(depth: &Depth) -> RootVec {
    RootVec(depth.iter().map(|&a| a as i64).collect())
}

pub fn depth_height(depth: &Depth) -> usize {
    depth.iter().sum()
}

/// Element of the free algebra on the f_i over Q(q^{1/2}).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreeElem {
    pub terms: BTreeMap<Word, RatFunc>,
}

impl FreeElem {
    pub fn zero() -> Self {
        FreeElem::default()
    }

    pub fn one() -> Self {
        Self::word(vec![])
    }

    pub fn word(w: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(w, RatFunc::one());
        FreeElem { terms }
    }

    pub fn generator(i: usize) -> Self {
        Self::word(vec![i])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn insert(&mut self, w: Word, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += &c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &FreeElem) -> FreeElem {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> FreeElem {
        if c.is_zero() {
            return FreeElem::zero();
        }
        let mut out = FreeElem::zero();
        for (w, x) in &self.terms {
            out.insert(w.clone(), x * c);
        }
        out
    }

    pub fn mul(&self, rhs: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                out.insert(w, c1 * c2);
            }
        }
        out
    }

    /// Word reversal with coefficients untouched (the * anti-involution).
    pub fn reversed(&self) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, c) in &self.terms {
            let mut r = w.clone();
            r.reverse();
            out.insert(r, c.clone());
        }
        out
    }

    /// The bar automorphism: generators fixed, coefficients barred.
    pub fn barred(&self) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, c) in &self.terms {
            out.insert(w.clone(), c.bar());
        }
        out
    }

    pub fn max_height(&self, rank: usize) -> usize {
        self.terms.keys().map(|w| word_depth(w, rank).iter().sum()).max().unwrap_or(0)
    }
}

/// Cached basis of one weight space: a maximal form-independent set of words
/// together with its (invertible) Gram matrix.
#[derive(Debug)]
pub struct WeightBasis {
    pub depth: Depth,
    pub words: Vec<Word>,
    pub gram: Matrix,
    lu: Lu,
}

impl WeightBasis {
    pub fn dim(&self) -> usize {
        self.words.len()
    }

    /// Coordinates from a vector of pairings against `words`.
    pub fn coords_from_pairings(&self, pairings: &[RatFunc]) -> Vec<RatFunc> {
        self.lu.solve(pairings)
    }
}

/// Element of U_q^-(g) in canonical coordinates over the cached weight bases.
///
/// Two elements are equal iff all coordinates agree; components whose
/// coordinate vector vanishes are not stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct UqmElem {
    pub coords: BTreeMap<Depth, Vec<RatFunc>>,
}

impl UqmElem {
    pub fn zero() -> Self {
        UqmElem::default()
    }

    pub fn one(rank: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(vec![0; rank], vec![RatFunc::one()]);
        UqmElem { coords }
    }

    /// The basis element `idx` of the weight space of `depth`.
    pub fn basis_word(depth: Depth, dim: usize, idx: usize) -> Self {
        let mut v = vec![RatFunc::zero(); dim];
        v[idx] = RatFunc::one();
        let mut coords = BTreeMap::new();
        coords.insert(depth, v);
        UqmElem { coords }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add(&self, rhs: &UqmElem) -> UqmElem {
        let mut out = self.coords.clone();
        for (d, v) in &rhs.coords {
            match out.entry(d.clone()) {
                std::collections::btree_map::Entry::Vacant(slot) => {
                    slot.insert(v.clone());
                }
                std::collections::btree_map::Entry::Occupied(mut slot) => {
                    for (a, b) in slot.get_mut().iter_mut().zip(v) {
                        *a += b;
                    }
                    if slot.get().iter().all(|c| c.is_zero()) {
                        slot.remove();
                    }
                }
            }
        }
        UqmElem { coords: out }
    }

    pub fn scale(&self, c: &RatFunc) -> UqmElem {
        if c.is_zero() {
            return UqmElem::zero();
        }
        UqmElem {
            coords: self
                .coords
                .iter()
                .map(|(d, v)| (d.clone(), v.iter().map(|x| x * c).collect()))
                .collect(),
        }
    }

    /// Weight of a homogeneous element (in Q^-), None for 0 or mixed weights.
    pub fn weight(&self) -> Option<RootVec> {
        if self.coords.len() != 1 {
            return None;
        }
        let d = self.coords.keys().next().unwrap();
        Some(-&depth_root(d))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.coords.len() <= 1
    }
}

/// Shared computation context: the Cartan datum, the height bound, and all
/// read-mostly caches (form values, weight bases, divided-power spanning
/// sets). Safe to share across threads; weight bases are built on demand with
/// a double-checked insert.
pub struct Algebra {
    cartan: CartanDatum,
    max_height: usize,
    series_depth: usize,
    kform_cache: RwLock<HashMap<(Word, Word), RatFunc>>,
    basis_cache: RwLock<HashMap<Depth, Arc<WeightBasis>>>,
    word_reduce_cache: RwLock<HashMap<Word, Arc<Vec<RatFunc>>>>,
    divided_cache: RwLock<HashMap<Depth, Arc<Vec<UqmElem>>>>,
}

impl Algebra {
    pub fn new(cartan: CartanDatum) -> Self {
        Algebra {
            cartan,
            max_height: 6,
            series_depth: 8,
            kform_cache: RwLock::new(HashMap::new()),
            basis_cache: RwLock::new(HashMap::new()),
            word_reduce_cache: RwLock::new(HashMap::new()),
            divided_cache: RwLock::new(HashMap::new()),
        }
    }

    pub fn with_max_height(mut self, bound: usize) -> Self {
        self.max_height = bound;
        self
    }

    pub fn with_series_depth(mut self, depth: usize) -> Self {
        self.series_depth = depth;
        self
    }

    pub fn cartan(&self) -> &CartanDatum {
        &self.cartan
    }

    pub fn rank(&self) -> usize {
        self.cartan.rank()
    }

    pub fn max_height(&self) -> usize {
        self.max_height
    }

    pub fn series_depth(&self) -> usize {
        self.series_depth
    }

    fn check_height(&self, needed: usize) -> Result<()> {
        if needed > self.max_height {
            Err(Error::HeightBoundExceeded { bound: self.max_height, needed })
        } else {
            Ok(())
        }
    }

    // --- derivations ---

    /// e'_i, the adjoint of left multiplication by f_i. Weight shifts by
    /// +alpha_i; on a word it removes one letter i at a time with the q-power
    /// collected from the letters passed over on the left.
    pub fn e_prime(&self, i: usize, x: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, c) in &x.terms {
            let mut passed = 0i64;
            for (k, &letter) in w.iter().enumerate() {
                if letter == i {
                    let mut rest = w.clone();
                    rest.remove(k);
                    let coeff = c * &RatFunc::v_pow(2 * (-passed));
                    out.insert(rest, coeff);
                }
                passed += self.cartan.sym(i, letter);
            }
        }
        out
    }

    /// e*_i = * ∘ e'_i ∘ *, the adjoint of right multiplication by f_i.
    pub fn e_star(&self, i: usize, x: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (w, c) in &x.terms {
            let mut passed = 0i64;
            for (k, &letter) in w.iter().enumerate().rev() {
                if letter == i {
                    let mut rest = w.clone();
                    rest.remove(k);
                    let coeff = c * &RatFunc::v_pow(2 * (-passed));
                    out.insert(rest, coeff);
                }
                passed += self.cartan.sym(i, letter);
            }
        }
        out
    }

    // --- the Kashiwara form ---

    /// Form value on a pair of words, by the recursion
    /// <f_i u, z> = <u, e'_i(z)>, memoized. Values lie in Z[q^{±1}].
    pub fn kform_words(&self, w1: &Word, w2: &Word) -> RatFunc {
        if w1.len() != w2.len() {
            return RatFunc::zero();
        }
        if w1.is_empty() {
            return RatFunc::one();
        }
        let rank = self.rank();
        if word_depth(w1, rank) != word_depth(w2, rank) {
            return RatFunc::zero();
        }
        let key = (w1.clone(), w2.clone());
        if let Some(v) = self.kform_cache.read().unwrap().get(&key) {
            return v.clone();
        }
        let i = w1[0];
        let tail: Word = w1[1..].to_vec();
        let dz = self.e_prime(i, &FreeElem::word(w2.clone()));
        let mut acc = RatFunc::zero();
        for (w, c) in &dz.terms {
            let sub = self.kform_words(&tail, w);
            if !sub.is_zero() {
                acc += &(c * &sub);
            }
        }
        self.kform_cache.write().unwrap().insert(key, acc.clone());
        acc
    }

    /// Kashiwara form on free elements (zero across distinct weights).
    pub fn kform(&self, x: &FreeElem, y: &FreeElem) -> RatFunc {
        let mut acc = RatFunc::zero();
        for (w1, c1) in &x.terms {
            for (w2, c2) in &y.terms {
                if w1.len() != w2.len() {
                    continue;
                }
                let k = self.kform_words(w1, w2);
                if !k.is_zero() {
                    acc += &(&(c1 * c2) * &k);
                }
            }
        }
        acc
    }

    // --- weight bases and reduction ---

    /// Basis of the weight space of `depth`: greedy scan of the words of that
    /// depth in lexicographic order, keeping a word iff it increases the Gram
    /// rank over Q(q^{1/2}).
    pub fn weight_basis(&self, depth: &Depth) -> Result<Arc<WeightBasis>> {
        self.check_height(depth_height(depth))?;
        if let Some(b) = self.basis_cache.read().unwrap().get(depth) {
            return Ok(b.clone());
        }
        let built = self.build_weight_basis(depth);
        let mut cache = self.basis_cache.write().unwrap();
        // double-checked: keep the first construction
        let entry = cache.entry(depth.clone()).or_insert_with(|| Arc::new(built));
        Ok(entry.clone())
    }

    fn build_weight_basis(&self, depth: &Depth) -> WeightBasis {
        let words = enumerate_words(depth);
        let mut chosen: Vec<Word> = Vec::new();
        let mut gram: Matrix = Vec::new();
        let mut lu: Option<Lu> = None;
        for w in words {
            let pairings: Vec<RatFunc> = chosen.iter().map(|b| self.kform_words(&w, b)).collect();
            let diag = self.kform_words(&w, &w);
            let schur = match &lu {
                None => diag.clone(),
                Some(f) => {
                    let c = f.solve(&pairings);
                    let mut acc = diag.clone();
                    for (r, x) in pairings.iter().zip(&c) {
                        acc -= &(r * x);
                    }
                    acc
                }
            };
            if schur.is_zero() {
                continue;
            }
            for (row, p) in gram.iter_mut().zip(&pairings) {
                row.push(p.clone());
            }
            let mut new_row = pairings.clone();
            new_row.push(diag);
            gram.push(new_row);
            chosen.push(w);
            lu = Some(Lu::factor(&gram).expect("accepted Gram stays invertible"));
        }
        let lu = lu.unwrap_or_else(|| Lu::factor(&Vec::new()).expect("empty LU"));
        WeightBasis { depth: depth.clone(), words: chosen, gram, lu }
    }

    fn reduce_word(&self, w: &Word) -> Result<(Depth, Arc<Vec<RatFunc>>)> {
        let depth = word_depth(w, self.rank());
        if let Some(v) = self.word_reduce_cache.read().unwrap().get(w) {
            return Ok((depth, v.clone()));
        }
        let basis = self.weight_basis(&depth)?;
        let pairings: Vec<RatFunc> =
            basis.words.iter().map(|b| self.kform_words(w, b)).collect();
        let coords = Arc::new(basis.coords_from_pairings(&pairings));
        self.word_reduce_cache.write().unwrap().insert(w.clone(), coords.clone());
        Ok((depth, coords))
    }

    /// Canonical coordinates of a free element modulo the radical of the form.
    pub fn reduce(&self, x: &FreeElem) -> Result<UqmElem> {
        let mut acc: BTreeMap<Depth, Vec<RatFunc>> = BTreeMap::new();
        for (w, c) in &x.terms {
            let (depth, coords) = self.reduce_word(w)?;
            let dim = coords.len();
            let slot = acc.entry(depth).or_insert_with(|| vec![RatFunc::zero(); dim]);
            for (a, b) in slot.iter_mut().zip(coords.iter()) {
                *a += &(b * c);
            }
        }
        acc.retain(|_, v| v.iter().any(|c| !c.is_zero()));
        Ok(UqmElem { coords: acc })
    }

    pub fn is_zero_uq(&self, x: &FreeElem) -> Result<bool> {
        Ok(self.reduce(x)?.is_zero())
    }

    /// Expansion of canonical coordinates back into basis words.
    pub fn expand(&self, x: &UqmElem) -> Result<FreeElem> {
        let mut out = FreeElem::zero();
        for (depth, v) in &x.coords {
            let basis = self.weight_basis(depth)?;
            for (w, c) in basis.words.iter().zip(v) {
                out.insert(w.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn uq_generator(&self, i: usize) -> Result<UqmElem> {
        self.cartan.check_index(i)?;
        self.reduce(&FreeElem::generator(i))
    }

    pub fn uq_mul(&self, a: &UqmElem, b: &UqmElem) -> Result<UqmElem> {
        self.reduce(&self.expand(a)?.mul(&self.expand(b)?))
    }

    pub fn e_prime_u(&self, i: usize, x: &UqmElem) -> Result<UqmElem> {
        self.reduce(&self.e_prime(i, &self.expand(x)?))
    }

    pub fn e_star_u(&self, i: usize, x: &UqmElem) -> Result<UqmElem> {
        self.reduce(&self.e_star(i, &self.expand(x)?))
    }

    /// The * anti-involution (word reversal) on canonical elements.
    pub fn star_u(&self, x: &UqmElem) -> Result<UqmElem> {
        self.reduce(&self.expand(x)?.reversed())
    }

    /// The bar automorphism of U_q^-(g): fixes the generators, inverts
    /// q^{1/2}. This is the involution entering the adjoint definition of the
    /// twisted bar on A_q(n).
    pub fn bar_u(&self, x: &UqmElem) -> Result<UqmElem> {
        self.reduce(&self.expand(x)?.barred())
    }

    pub fn kform_u(&self, x: &UqmElem, y: &UqmElem) -> Result<RatFunc> {
        Ok(self.kform(&self.expand(x)?, &self.expand(y)?))
    }

    // --- Serre relations and divided powers ---

    /// The alternating q-binomial sum for i != j (a generator of the radical).
    pub fn serre_element(&self, i: usize, j: usize) -> Result<FreeElem> {
        self.cartan.check_index(i)?;
        self.cartan.check_index(j)?;
        if i == j {
            return Err(Error::EqualIndices);
        }
        let b = (1 - self.cartan.c(i, j)) as u64;
        let mut out = FreeElem::zero();
        for k in 0..=b {
            let mut w: Word = Vec::with_capacity(b as usize + 1);
            w.extend(std::iter::repeat_n(i, k as usize));
            w.push(j);
            w.extend(std::iter::repeat_n(i, (b - k) as usize));
            let mut c = self.cartan.q_binom_i(b, k, i);
            if k % 2 == 1 {
                c = -c;
            }
            out.insert(w, c);
        }
        Ok(out)
    }

    /// The e'-side Serre sum applied as an operator.
    pub fn serre_eprime_op(&self, i: usize, j: usize, x: &FreeElem) -> Result<FreeElem> {
        if i == j {
            return Err(Error::EqualIndices);
        }
        let b = (1 - self.cartan.c(i, j)) as u64;
        let mut out = FreeElem::zero();
        for k in 0..=b {
            let mut y = x.clone();
            for _ in 0..(b - k) {
                y = self.e_prime(i, &y);
            }
            y = self.e_prime(j, &y);
            for _ in 0..k {
                y = self.e_prime(i, &y);
            }
            let mut c = self.cartan.q_binom_i(b, k, i);
            if k % 2 == 1 {
                c = -c;
            }
            out = out.add(&y.scale(&c));
        }
        Ok(out)
    }

    /// f_i^{(n)} = f_i^n / [n]_i!.
    pub fn divided_power(&self, i: usize, n: u64) -> Result<UqmElem> {
        self.cartan.check_index(i)?;
        let w: Word = std::iter::repeat_n(i, n as usize).collect();
        let fact = self.cartan.q_factorial_i(n, i).inv().expect("[n]! is nonzero");
        self.reduce(&FreeElem::word(w).scale(&fact))
    }

    /// Spanning set of the Z[q^{±1}]-lattice in the given weight: canonical
    /// products of divided powers (adjacent indices distinct), cached.
    pub fn divided_monomials(&self, depth: &Depth) -> Result<Arc<Vec<UqmElem>>> {
        self.check_height(depth_height(depth))?;
        if let Some(v) = self.divided_cache.read().unwrap().get(depth) {
            return Ok(v.clone());
        }
        let mut seqs: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut current: Vec<(usize, usize)> = Vec::new();
        let mut remaining = depth.clone();
        collect_divided_sequences(&mut seqs, &mut current, &mut remaining, usize::MAX);
        let mut out = Vec::with_capacity(seqs.len());
        for seq in seqs {
            let mut word: Word = Vec::new();
            let mut scalar = RatFunc::one();
            for (i, n) in &seq {
                word.extend(std::iter::repeat_n(*i, *n));
                scalar =
                    &scalar * &self.cartan.q_factorial_i(*n as u64, *i).inv().expect("nonzero");
            }
            out.push(self.reduce(&FreeElem::word(word).scale(&scalar))?);
        }
        let arc = Arc::new(out);
        self.divided_cache.write().unwrap().insert(depth.clone(), arc.clone());
        Ok(arc)
    }

    /// The quantum-boson action x ⊗ y -> E(x)L(y): first multiply by `b` on
    /// the left, then apply the derivation chain of `a`.
    pub fn boson_act(&self, a: &FreeElem, b: &FreeElem, target: &FreeElem) -> FreeElem {
        let mut out = FreeElem::zero();
        for (wa, ca) in &a.terms {
            for (wb, cb) in &b.terms {
                let mut t = FreeElem::word(wb.clone()).mul(target);
                for &i in wa.iter().rev() {
                    t = self.e_prime(i, &t);
                }
                out = out.add(&t.scale(&(ca * cb)));
            }
        }
        out
    }

    /// zeta_i = 1 - q_i^2 as a scalar.
    pub fn zeta_i(&self, i: usize) -> RatFunc {
        self.cartan.zeta_i(i, Sign::Plus)
    }
}

/// All words with the given letter multiset, in lexicographic order.
pub fn enumerate_words(depth: &Depth) -> Vec<Word> {
    let total: usize = depth.iter().sum();
    let mut out = Vec::new();
    let mut current: Word = Vec::with_capacity(total);
    let mut counts = depth.clone();
    fn rec(out: &mut Vec<Word>, current: &mut Word, counts: &mut Depth, total: usize) {
        if current.len() == total {
            out.push(current.clone());
            return;
        }
        for i in 0..counts.len() {
            if counts[i] > 0 {
                counts[i] -= 1;
                current.push(i);
                rec(out, current, counts, total);
                current.pop();
                counts[i] += 1;
            }
        }
    }
    rec(&mut out, &mut current, &mut counts, total);
    out
}

fn collect_divided_sequences(
    out: &mut Vec<Vec<(usize, usize)>>,
    current: &mut Vec<(usize, usize)>,
    remaining: &mut Depth,
    last: usize,
) {
    if remaining.iter().all(|&n| n == 0) {
        out.push(current.clone());
        return;
    }
    for i in 0..remaining.len() {
        if i == last || remaining[i] == 0 {
            continue;
        }
        let max = remaining[i];
        for n in 1..=max {
            remaining[i] -= n;
            current.push((i, n));
            collect_divided_sequences(out, current, remaining, i);
            current.pop();
            remaining[i] += n;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a2() -> Algebra {
        Algebra::new(CartanDatum::preset("A2").unwrap())
    }

    fn q() -> RatFunc {
        RatFunc::q_pow(1)
    }

    #[test]
    fn e_prime_examples() {
        let alg = a2();
        // e'_1(f_1 f_2) = f_2
        let x = FreeElem::word(vec![0, 1]);
        assert_eq!(alg.e_prime(0, &x), FreeElem::word(vec![1]));
        // e'_i(1) = 0
        assert!(alg.e_prime(0, &FreeElem::one()).is_zero());
        // e'_1(f_2 f_1) = q f_2
        let y = FreeElem::word(vec![1, 0]);
        assert_eq!(alg.e_prime(0, &y), FreeElem::word(vec![1]).scale(&q()));
    }

    #[test]
    fn e_star_examples() {
        let alg = a2();
        assert_eq!(alg.e_star(0, &FreeElem::word(vec![1, 0])), FreeElem::word(vec![1]));
        assert!(alg.e_star(0, &FreeElem::one()).is_zero());
        // e'_i e*_j = e*_j e'_i on a sample
        let x = FreeElem::word(vec![0, 1, 0, 1]);
        let a = alg.e_star(1, &alg.e_prime(0, &x));
        let b = alg.e_prime(0, &alg.e_star(1, &x));
        assert_eq!(a, b);
    }

    #[test]
    fn kform_examples() {
        let alg = a2();
        assert!(alg.kform_words(&vec![0], &vec![0]).is_one());
        assert!(alg.kform_words(&vec![], &vec![]).is_one());
        // <f_1 f_2, f_2 f_1> = q
        assert_eq!(alg.kform_words(&vec![0, 1], &vec![1, 0]), q());
    }

    #[test]
    fn weight_basis_examples() {
        let alg = a2();
        let b = alg.weight_basis(&vec![1, 0]).unwrap();
        assert_eq!(b.words, vec![vec![0]]);
        assert!(b.gram[0][0].is_one());

        let b = alg.weight_basis(&vec![1, 1]).unwrap();
        assert_eq!(b.words, vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(b.gram[0][1], q());
        assert_eq!(b.gram[1][0], q());

        // weight 2a1 + a2: three words, Gram rank 2
        let words = enumerate_words(&vec![2, 1]);
        assert_eq!(words.len(), 3);
        let gram: Matrix = words
            .iter()
            .map(|w1| words.iter().map(|w2| alg.kform_words(w1, w2)).collect())
            .collect();
        assert_eq!(crate::linalg::rank(&gram), 2);
        let b = alg.weight_basis(&vec![2, 1]).unwrap();
        assert_eq!(b.dim(), 2);
    }

    #[test]
    fn serre_reduces_to_zero() {
        let alg = a2();
        let s = alg.serre_element(0, 1).unwrap();
        // f_1^2 f_2 - (q + q^{-1}) f_1 f_2 f_1 + f_2 f_1^2
        assert_eq!(s.terms.len(), 3);
        assert_eq!(
            s.terms.get(&vec![0, 1, 0]).unwrap(),
            &-&alg.cartan().q_int_i(2, 0)
        );
        assert!(alg.is_zero_uq(&s).unwrap());
        // two-sided multiples also die
        let m = FreeElem::word(vec![1]).mul(&s).mul(&FreeElem::word(vec![0]));
        assert!(alg.is_zero_uq(&m).unwrap());
        assert!(alg.serre_element(0, 0).is_err());
    }

    #[test]
    fn reduce_examples() {
        let alg = a2();
        let r = alg.reduce(&FreeElem::generator(0)).unwrap();
        assert_eq!(r.coords.get(&vec![1, 0]).unwrap(), &vec![RatFunc::one()]);
        let x = FreeElem::word(vec![0, 1]).add(&FreeElem::word(vec![1, 0]).scale(&-&RatFunc::one()));
        let r = alg.reduce(&x).unwrap();
        assert_eq!(
            r.coords.get(&vec![1, 1]).unwrap(),
            &vec![RatFunc::one(), -&RatFunc::one()]
        );
    }

    #[test]
    fn divided_power_examples() {
        let alg = a2();
        assert_eq!(alg.divided_power(0, 0).unwrap(), UqmElem::one(2));
        let d2 = alg.divided_power(0, 2).unwrap();
        let f2 = alg.reduce(&FreeElem::word(vec![0, 0])).unwrap();
        assert_eq!(f2, d2.scale(&alg.cartan().q_int_i(2, 0)));
    }

    #[test]
    fn star_preserves_form() {
        let alg = a2();
        let x = FreeElem::word(vec![0, 1, 1]).add(&FreeElem::word(vec![1, 0, 1]).scale(&q()));
        let y = FreeElem::word(vec![1, 1, 0]);
        let lhs = alg.kform(&x.reversed(), &y.reversed());
        let rhs = alg.kform(&x, &y);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn boson_examples() {
        let alg = a2();
        // E(f_i) L(1) f_i = 1
        let r = alg.boson_act(&FreeElem::generator(0), &FreeElem::one(), &FreeElem::generator(0));
        assert_eq!(r, FreeElem::one());
        // E(1) L(f_i) x = f_i x
        let x = FreeElem::word(vec![1, 0]);
        let r = alg.boson_act(&FreeElem::one(), &FreeElem::generator(0), &x);
        assert_eq!(r, FreeElem::word(vec![0, 1, 0]));
    }

    #[test]
    fn context_is_shareable_across_threads() {
        fn assert_sync_send<T: Sync + Send>() {}
        assert_sync_send::<Algebra>();
        assert_sync_send::<UqmElem>();
        assert_sync_send::<WeightBasis>();
    }

    #[test]
    fn height_bound_is_enforced() {
        let alg = Algebra::new(CartanDatum::preset("A2").unwrap()).with_max_height(3);
        let err = alg.weight_basis(&vec![2, 2]).unwrap_err();
        assert_eq!(err, Error::HeightBoundExceeded { bound: 3, needed: 4 });
    }
}
