//! The bosonic extension: level-graded generators f_{i,m} subject to
//! per-level quantum Serre relations and cross-level q-commutation with a
//! delta correction.
//!
//! Elements are kept in normal form: levels strictly decrease from left to
//! right, and within a level the factor is expanded over the cached weight
//! basis of U_q^-(g). Rewriting is a bubble sort on level inversions (each
//! swap removes one inversion, the delta term shortens the word), followed by
//! per-level reduction, so equality is structural.

use std::collections::BTreeMap;

use crate::aqn::AqnElem;
use crate::cartan::RootVec;
use crate::error::{Error, Result};
use crate::scalars::RatFunc;
use crate::uqneg::{depth_height, depth_root, word_depth, Algebra, Depth, FreeElem, UqmElem, Word};

/// Generator f_{i,m}: index i at level m.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LevelLetter {
    pub level: i32,
    pub index: usize,
}

pub type HatWord = Vec<LevelLetter>;

/// Linear combination of normal monomials.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HatElem {
    terms: BTreeMap<HatWord, RatFunc>,
}

impl HatElem {
    pub fn zero() -> Self {
        HatElem::default()
    }

    pub fn one() -> Self {
        Self::scalar(RatFunc::one())
    }

    pub fn scalar(c: RatFunc) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        HatElem { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<HatWord, RatFunc> {
        &self.terms
    }

    fn insert(&mut self, w: HatWord, c: RatFunc) {
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

    pub fn add(&self, rhs: &HatElem) -> HatElem {
        let mut out = self.clone();
        for (w, c) in &rhs.terms {
            out.insert(w.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> HatElem {
        if c.is_zero() {
            return HatElem::zero();
        }
        HatElem { terms: self.terms.iter().map(|(w, x)| (w.clone(), x * c)).collect() }
    }

    /// Levels occurring in the support.
    pub fn level_window(&self) -> Option<(i32, i32)> {
        let mut window: Option<(i32, i32)> = None;
        for w in self.terms.keys() {
            for l in w {
                window = Some(match window {
                    None => (l.level, l.level),
                    Some((a, b)) => (a.min(l.level), b.max(l.level)),
                });
            }
        }
        window
    }
}

/// Blocks of a level-sorted word: (level, word of indices), levels strictly
/// decreasing.
pub fn split_blocks(w: &HatWord) -> Vec<(i32, Word)> {
    let mut out: Vec<(i32, Word)> = Vec::new();
    for l in w {
        match out.last_mut() {
            Some((level, word)) if *level == l.level => word.push(l.index),
            _ => out.push((l.level, vec![l.index])),
        }
    }
    out
}

impl Algebra {
    /// wt(f_{i,m}) = (-1)^{m+1} alpha_i.
    pub fn letter_weight(&self, l: LevelLetter) -> RootVec {
        self.cartan().alpha_level(l.index, l.level as i64 + 1)
    }

    pub fn hat_word_weight(&self, w: &HatWord) -> RootVec {
        let mut acc = RootVec::zero(self.rank());
        for l in w {
            acc = &acc + &self.letter_weight(*l);
        }
        acc
    }

    /// Weight of a homogeneous element (None for zero or mixed weights).
    pub fn hat_weight(&self, x: &HatElem) -> Option<RootVec> {
        let mut it = x.terms.keys();
        let first = self.hat_word_weight(it.next()?);
        for w in it {
            if self.hat_word_weight(w) != first {
                return None;
            }
        }
        Some(first)
    }

    /// Split into weight-homogeneous components.
    pub fn hat_components(&self, x: &HatElem) -> Vec<(RootVec, HatElem)> {
        let mut map: BTreeMap<RootVec, HatElem> = BTreeMap::new();
        for (w, c) in &x.terms {
            let wt = self.hat_word_weight(w);
            map.entry(wt).or_insert_with(HatElem::zero).insert(w.clone(), c.clone());
        }
        map.into_iter().collect()
    }

    /// The generator f_{i,m} as an element.
    pub fn hat_gen(&self, i: usize, m: i32) -> Result<HatElem> {
        self.cartan().check_index(i)?;
        let mut out = HatElem::zero();
        out.insert(vec![LevelLetter { level: m, index: i }], RatFunc::one());
        Ok(out)
    }

    /// Normal form of an arbitrary combination of words in the f_{i,m}.
    pub fn normalize(
        &self,
        terms: impl IntoIterator<Item = (HatWord, RatFunc)>,
    ) -> Result<HatElem> {
        let mut worklist: Vec<(HatWord, RatFunc)> = terms.into_iter().collect();
        let mut sorted: Vec<(HatWord, RatFunc)> = Vec::new();
        while let Some((w, c)) = worklist.pop() {
            if c.is_zero() {
                continue;
            }
            let inversion =
                (0..w.len().saturating_sub(1)).find(|&k| w[k].level < w[k + 1].level);
            let Some(k) = inversion else {
                sorted.push((w, c));
                continue;
            };
            let (li, lj) = (w[k], w[k + 1]); // (i, m) before (j, p) with m < p
            let parity = (lj.level - li.level + 1).rem_euclid(2);
            let mut e = self.cartan().sym(li.index, lj.index);
            if parity == 1 {
                e = -e;
            }
            let mut swapped = w.clone();
            swapped.swap(k, k + 1);
            worklist.push((swapped, &c * &RatFunc::q_pow(e)));
            if lj.index == li.index && lj.level == li.level + 1 {
                let mut shorter = w.clone();
                shorter.drain(k..k + 2);
                worklist.push((shorter, &c * &self.zeta_i(li.index)));
            }
        }
        // per-level reduction of each level-sorted word
        let mut out = HatElem::zero();
        for (w, c) in sorted {
            let blocks = split_blocks(&w);
            let mut partial: Vec<(HatWord, RatFunc)> = vec![(Vec::new(), c)];
            for (level, word) in blocks {
                let reduced = self.reduce(&FreeElem::word(word))?;
                let mut next = Vec::new();
                for (prefix, pc) in &partial {
                    for (depth, coords) in &reduced.coords {
                        let basis = self.weight_basis(depth)?;
                        for (bw, bc) in basis.words.iter().zip(coords) {
                            if bc.is_zero() {
                                continue;
                            }
                            let mut nw = prefix.clone();
                            nw.extend(bw.iter().map(|&i| LevelLetter { level, index: i }));
                            next.push((nw, pc * bc));
                        }
                    }
                }
                partial = next;
            }
            for (w, c) in partial {
                out.insert(w, c);
            }
        }
        Ok(out)
    }

    pub fn hat_mul(&self, x: &HatElem, y: &HatElem) -> Result<HatElem> {
        let mut products = Vec::new();
        for (w1, c1) in &x.terms {
            for (w2, c2) in &y.terms {
                let mut w = w1.clone();
                w.extend_from_slice(w2);
                products.push((w, c1 * c2));
            }
        }
        self.normalize(products)
    }

    /// The per-level embedding L_m: U_q^-(g) -> A[m], f_i -> f_{i,m}.
    pub fn l_m(&self, u: &UqmElem, m: i32) -> Result<HatElem> {
        let mut out = HatElem::zero();
        for (depth, coords) in &u.coords {
            let basis = self.weight_basis(depth)?;
            for (bw, bc) in basis.words.iter().zip(coords) {
                if bc.is_zero() {
                    continue;
                }
                let w: HatWord = bw.iter().map(|&i| LevelLetter { level: m, index: i }).collect();
                out.insert(w, bc.clone());
            }
        }
        Ok(out)
    }

    /// phi_m: A_q(n) -> A[m], with phi_m(<i>) = q_i^{1/2} f_{i,m}; on
    /// carriers phi_m(iota(a)) = qq^{-wt(a)/2} zeta^{wt(a)} L_m(a).
    pub fn phi_m(&self, f: &AqnElem, m: i32) -> Result<HatElem> {
        let mut out = HatElem::zero();
        for (depth, coords) in &f.carrier.coords {
            let root = depth_root(depth);
            let scalar =
                &self.cartan().qq_half_pow(&root) * &self.cartan().zeta_pow_neg(&root)?;
            let component = UqmElem { coords: [(depth.clone(), coords.clone())].into() };
            out = out.add(&self.l_m(&component, m)?.scale(&scalar));
        }
        Ok(out)
    }

    /// Inverse of phi_m on A[m].
    pub fn phi_inv_m(&self, x: &HatElem, m: i32) -> Result<AqnElem> {
        let mut coords: BTreeMap<Depth, Vec<RatFunc>> = BTreeMap::new();
        for (w, c) in &x.terms {
            let blocks = split_blocks(w);
            if blocks.len() > 1 || blocks.iter().any(|(l, _)| *l != m) {
                return Err(Error::InhomogeneousInput);
            }
            let word: Word = blocks.into_iter().next().map(|(_, w)| w).unwrap_or_default();
            let depth = word_depth(&word, self.rank());
            let basis = self.weight_basis(&depth)?;
            let idx = basis
                .words
                .iter()
                .position(|b| b == &word)
                .expect("normal monomials use basis words");
            let slot = coords
                .entry(depth.clone())
                .or_insert_with(|| vec![RatFunc::zero(); basis.dim()]);
            slot[idx] += c;
        }
        let mut carrier = UqmElem::zero();
        for (depth, v) in coords {
            let root = depth_root(&depth);
            let scalar = (&self.cartan().qq_half_pow(&root)
                * &self.cartan().zeta_pow_neg(&root)?)
                .inv()?;
            let part = UqmElem { coords: [(depth, v)].into() }.scale(&scalar);
            carrier = carrier.add(&part);
        }
        Ok(AqnElem { carrier })
    }

    /// The automorphism shifting every level by `s` (s = 1 is the shift
    /// automorphism paired with the form); fixes q. Normal monomials stay
    /// normal under a level shift.
    pub fn shift_d(&self, x: &HatElem, s: i32) -> HatElem {
        HatElem {
            terms: x
                .terms
                .iter()
                .map(|(w, c)| {
                    (
                        w.iter()
                            .map(|l| LevelLetter { level: l.level + s, index: l.index })
                            .collect(),
                        c.clone(),
                    )
                })
                .collect(),
        }
    }

    /// The anti-automorphism shifting levels by +1 and inverting q^{1/2}.
    pub fn anti_d(&self, x: &HatElem) -> Result<HatElem> {
        self.normalize(x.terms.iter().map(|(w, c)| {
            let mut r: HatWord = w
                .iter()
                .map(|l| LevelLetter { level: l.level + 1, index: l.index })
                .collect();
            r.reverse();
            (r, c.bar())
        }))
    }

    /// The bar anti-automorphism: fixes the generators, inverts q^{1/2}.
    pub fn bar_h(&self, x: &HatElem) -> Result<HatElem> {
        self.normalize(x.terms.iter().map(|(w, c)| {
            let mut r = w.clone();
            r.reverse();
            (r, c.bar())
        }))
    }

    /// The star anti-automorphism f_{i,p} -> f_{i,-p}.
    pub fn star_h(&self, x: &HatElem) -> Result<HatElem> {
        self.normalize(x.terms.iter().map(|(w, c)| {
            let mut r: HatWord =
                w.iter().map(|l| LevelLetter { level: -l.level, index: l.index }).collect();
            r.reverse();
            (r, c.clone())
        }))
    }

    /// c(x) = q^{N(wt x)} bar(x) on a homogeneous element.
    pub fn c_h(&self, x: &HatElem) -> Result<HatElem> {
        if x.is_zero() {
            return Ok(HatElem::zero());
        }
        let wt = self.hat_weight(x).ok_or(Error::InhomogeneousInput)?;
        let n = self.cartan().n_quad(&wt);
        Ok(self.bar_h(x)?.scale(&RatFunc::q_pow(n)))
    }

    /// sigma(x) = q^{-N(wt x)/2} x on a homogeneous element.
    pub fn sigma_h(&self, x: &HatElem) -> Result<HatElem> {
        if x.is_zero() {
            return Ok(HatElem::zero());
        }
        let wt = self.hat_weight(x).ok_or(Error::InhomogeneousInput)?;
        let n = self.cartan().n_quad(&wt);
        Ok(x.scale(&RatFunc::v_pow(-n)))
    }

    /// E_{i,m}(x) = [x, f_{i,m+1}]_q, per homogeneous component.
    pub fn e_op(&self, i: usize, m: i32, x: &HatElem) -> Result<HatElem> {
        let f = self.hat_gen(i, m + 1)?;
        let mut out = HatElem::zero();
        for (wt, comp) in self.hat_components(x) {
            let e = self.cartan().form(&wt, &self.cartan().alpha_level(i, m as i64));
            let lhs = self.hat_mul(&comp, &f)?;
            let rhs = self.hat_mul(&f, &comp)?.scale(&RatFunc::q_pow(-e));
            out = out.add(&lhs).add(&rhs.scale(&-&RatFunc::one()));
        }
        Ok(out)
    }

    /// E*_{i,m}(x) = [f_{i,m-1}, x]_q, per homogeneous component.
    pub fn estar_op(&self, i: usize, m: i32, x: &HatElem) -> Result<HatElem> {
        let f = self.hat_gen(i, m - 1)?;
        let mut out = HatElem::zero();
        for (wt, comp) in self.hat_components(x) {
            let e = self.cartan().form(&self.cartan().alpha_level(i, m as i64), &wt);
            let lhs = self.hat_mul(&f, &comp)?;
            let rhs = self.hat_mul(&comp, &f)?.scale(&RatFunc::q_pow(-e));
            out = out.add(&lhs).add(&rhs.scale(&-&RatFunc::one()));
        }
        Ok(out)
    }

    /// Divided power E_{i,m}^{(n)} = E_{i,m}^n / [n]_i!.
    pub fn e_div(&self, i: usize, m: i32, n: u64, x: &HatElem) -> Result<HatElem> {
        let mut acc = x.clone();
        for _ in 0..n {
            acc = self.e_op(i, m, &acc)?;
        }
        Ok(acc.scale(&self.cartan().q_factorial_i(n, i).inv().expect("nonzero")))
    }

    /// Projection onto the empty normal monomial.
    pub fn mn_proj(&self, x: &HatElem) -> RatFunc {
        x.terms.get(&Vec::new()).cloned().unwrap_or_else(RatFunc::zero)
    }

    /// The bilinear form (x, y) = Mn(x · Dbar(y)).
    pub fn hform(&self, x: &HatElem, y: &HatElem) -> Result<RatFunc> {
        Ok(self.mn_proj(&self.hat_mul(x, &self.shift_d(y, 1))?))
    }

    /// The normalized form <<x, y>> = q^{-N(wt x)} (x, y) on homogeneous
    /// elements.
    pub fn pairform(&self, x: &HatElem, y: &HatElem) -> Result<RatFunc> {
        if x.is_zero() || y.is_zero() {
            return Ok(RatFunc::zero());
        }
        let wx = self.hat_weight(x).ok_or(Error::InhomogeneousInput)?;
        let wy = self.hat_weight(y).ok_or(Error::InhomogeneousInput)?;
        if wx != wy {
            return Ok(RatFunc::zero());
        }
        let n = self.cartan().n_quad(&wx);
        Ok(&RatFunc::q_pow(-n) * &self.hform(x, y)?)
    }

    /// Total height of a strongly homogeneous element.
    pub fn ht_strong(&self, x: &HatElem) -> Result<usize> {
        if x.is_zero() {
            return Ok(0);
        }
        let mut profile: Option<Vec<(i32, Depth)>> = None;
        for w in x.terms.keys() {
            let p: Vec<(i32, Depth)> = split_blocks(w)
                .into_iter()
                .map(|(l, word)| (l, word_depth(&word, self.rank())))
                .collect();
            match &profile {
                None => profile = Some(p),
                Some(existing) if *existing == p => {}
                _ => return Err(Error::NotStronglyHomogeneous),
            }
        }
        Ok(profile.unwrap().iter().map(|(_, d)| depth_height(d)).sum())
    }

    /// Membership in the integral form: all pairings against ordered products
    /// of phi_k iota(divided-power monomials) lie in Z[q^{±1}].
    pub fn is_integral_hat(&self, x: &HatElem) -> Result<bool> {
        for (_, comp) in self.hat_components(x) {
            let mut profiles: Vec<Vec<(i32, Depth)>> = Vec::new();
            for w in comp.terms.keys() {
                let p: Vec<(i32, Depth)> = split_blocks(w)
                    .into_iter()
                    .map(|(l, word)| (l, word_depth(&word, self.rank())))
                    .collect();
                if !profiles.contains(&p) {
                    profiles.push(p);
                }
            }
            for profile in profiles {
                for y in self.dual_test_vectors(&profile)? {
                    let v = self.pairform(&comp, &y)?;
                    if !v.is_integer_laurent_whole_powers() {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }

    /// Ordered products of phi_k(iota(m_k)) over all tuples of divided-power
    /// monomials matching the per-level weights of `profile`.
    fn dual_test_vectors(&self, profile: &[(i32, Depth)]) -> Result<Vec<HatElem>> {
        let mut out = vec![HatElem::one()];
        for (level, depth) in profile {
            let duals = self.divided_monomials(depth)?;
            let mut next = Vec::with_capacity(out.len() * duals.len());
            for prefix in &out {
                for u in duals.iter() {
                    let factor = self.phi_m(&AqnElem { carrier: u.clone() }, *level)?;
                    next.push(self.hat_mul(prefix, &factor)?);
                }
            }
            out = next;
        }
        Ok(out)
    }
}

// --- the faithful serial representation ---

/// Pure tensor profile: (level, basis word) pairs with levels strictly
/// decreasing; trivial slots are omitted.
pub type StateProfile = Vec<(i32, Word)>;

/// Element of the serial module: a linear combination of level profiles of
/// basis words. The constructor [`TensorState::pure`] takes a finitely
/// supported map level -> UqmElem; sums arise from the module action.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TensorState {
    terms: BTreeMap<StateProfile, RatFunc>,
}

impl TensorState {
    /// The vacuum 1 ⊗ 1 ⊗ ...
    pub fn vacuum() -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), RatFunc::one());
        TensorState { terms }
    }

    pub fn zero() -> Self {
        TensorState::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<StateProfile, RatFunc> {
        &self.terms
    }

    fn insert(&mut self, p: StateProfile, c: RatFunc) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(p) {
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

    pub fn add(&self, rhs: &TensorState) -> TensorState {
        let mut out = self.clone();
        for (p, c) in &rhs.terms {
            out.insert(p.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &RatFunc) -> TensorState {
        if c.is_zero() {
            return TensorState::zero();
        }
        TensorState { terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect() }
    }

    /// Pure tensor with the given slot entries.
    pub fn pure(alg: &Algebra, slots: &BTreeMap<i32, UqmElem>) -> Result<TensorState> {
        let mut out = TensorState::vacuum();
        let mut levels: Vec<i32> = slots.keys().copied().collect();
        levels.sort_unstable_by(|a, b| b.cmp(a));
        for level in levels {
            out = replace_level(alg, &out, level, &slots[&level])?;
        }
        Ok(out)
    }
}

fn replace_level(alg: &Algebra, s: &TensorState, level: i32, u: &UqmElem) -> Result<TensorState> {
    let mut out = TensorState::zero();
    for (profile, c) in &s.terms {
        for (new_profile, factor) in expand_slot(alg, profile, level, u)? {
            out.insert(new_profile, &factor * c);
        }
    }
    Ok(out)
}

/// All profiles obtained from `profile` by setting slot `level` to each basis
/// component of `u`.
fn expand_slot(
    alg: &Algebra,
    profile: &StateProfile,
    level: i32,
    u: &UqmElem,
) -> Result<Vec<(StateProfile, RatFunc)>> {
    let base: StateProfile = profile.iter().filter(|(l, _)| *l != level).cloned().collect();
    let mut out = Vec::new();
    for (depth, coords) in &u.coords {
        if depth_height(depth) == 0 {
            // scalar slot: the profile omits the level entirely
            let c = coords[0].clone();
            if !c.is_zero() {
                out.push((base.clone(), c));
            }
            continue;
        }
        let basis = alg.weight_basis(depth)?;
        for (bw, bc) in basis.words.iter().zip(coords) {
            if bc.is_zero() {
                continue;
            }
            let mut p = base.clone();
            let pos = p.partition_point(|(l, _)| *l > level);
            p.insert(pos, (level, bw.clone()));
            out.push((p, bc.clone()));
        }
    }
    Ok(out)
}

fn slot_elem(alg: &Algebra, profile: &StateProfile, level: i32) -> Result<UqmElem> {
    match profile.iter().find(|(l, _)| *l == level) {
        None => Ok(UqmElem::one(alg.rank())),
        Some((_, w)) => alg.reduce(&FreeElem::word(w.clone())),
    }
}

impl Algebra {
    /// The action of f_{i,m} on the serial module: the derivation term at
    /// level m+1 with scalar -(1 - q_i^{-2}) and the multiplication term at
    /// level m, both twisted by q^{(alpha_{i,m}, hwt of levels > m)}.
    pub fn act_f(&self, i: usize, m: i32, s: &TensorState) -> Result<TensorState> {
        self.cartan().check_index(i)?;
        let alpha_im = self.cartan().alpha_level(i, m as i64);
        let zbar = self.cartan().zeta_i(i, crate::cartan::Sign::Minus);
        let mut out = TensorState::zero();
        for (profile, c) in &s.terms {
            // hwt of the part strictly above level m
            let mut hwt = RootVec::zero(self.rank());
            for (l, w) in profile.iter().filter(|(l, _)| *l > m) {
                let sign = if l.rem_euclid(2) == 0 { -1 } else { 1 };
                hwt = &hwt + &depth_root(&word_depth(w, self.rank())).scaled(sign);
            }
            let power = RatFunc::q_pow(self.cartan().form(&alpha_im, &hwt));
            let scale = &power * c;
            // derivation term: e*_i at level m+1
            let y = slot_elem(self, profile, m + 1)?;
            let dy = self.e_star_u(i, &y)?;
            if !dy.is_zero() {
                let coeff = -&(&scale * &zbar);
                for (p, factor) in expand_slot(self, profile, m + 1, &dy)? {
                    out.insert(p, &factor * &coeff);
                }
            }
            // multiplication term: f_i at level m
            let z = slot_elem(self, profile, m)?;
            let fz = self.uq_mul(&self.uq_generator(i)?, &z)?;
            for (p, factor) in expand_slot(self, profile, m, &fz)? {
                out.insert(p, &factor * &scale);
            }
        }
        Ok(out)
    }

    /// Apply a normal-form element to a state, letter by letter.
    pub fn act_elem(&self, x: &HatElem, s: &TensorState) -> Result<TensorState> {
        let mut out = TensorState::zero();
        for (w, c) in x.terms() {
            let mut acc = s.clone();
            for l in w.iter().rev() {
                acc = self.act_f(l.index, l.level, &acc)?;
            }
            out = out.add(&acc.scale(c));
        }
        Ok(out)
    }

    /// F: the extension acting on the vacuum.
    pub fn f_map(&self, x: &HatElem) -> Result<TensorState> {
        self.act_elem(x, &TensorState::vacuum())
    }

    /// G: the ordered product of the slot embeddings.
    pub fn g_map(&self, s: &TensorState) -> Result<HatElem> {
        let mut out = HatElem::zero();
        for (profile, c) in &s.terms {
            let mut w: HatWord = Vec::new();
            for (level, word) in profile {
                w.extend(word.iter().map(|&i| LevelLetter { level: *level, index: i }));
            }
            out.insert(w, c.clone());
        }
        Ok(out)
    }
}
