//! The global basis of the bosonic extension: extended-crystal indexing, the
//! product basis P(b), the triangular c-fixing recursion for G(b), expansion
//! of lattice elements, and the standard elements built from dual PBW
//! monomials.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, RwLock};

use crate::aqn::{dual_pbw_monomial, GupTable};
use crate::bosonic::{split_blocks, HatElem};
use crate::cartan::RootVec;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalars::RatFunc;
use crate::uqneg::{depth_height, word_depth, Algebra, Depth};

/// Local index: PBW exponent vector over the convex order (finite type).
pub type LocalIdx = Vec<usize>;

/// Per-level weight profile of a normal monomial.
type ProfileKey = Vec<(i32, Depth)>;

/// Element of the extended crystal: a finitely supported map from levels to
/// local indices (trivial entries are not stored).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExtCrystalIndex {
    pub entries: BTreeMap<i32, LocalIdx>,
}

impl ExtCrystalIndex {
    /// The unit element (all levels trivial).
    pub fn unit() -> Self {
        ExtCrystalIndex::default()
    }

    /// The index with `local` at level m and the unit elsewhere.
    pub fn e_m(m: i32, local: LocalIdx) -> Self {
        let mut entries = BTreeMap::new();
        if local.iter().any(|&a| a > 0) {
            entries.insert(m, local);
        }
        ExtCrystalIndex { entries }
    }

    pub fn insert(&mut self, m: i32, local: LocalIdx) {
        if local.iter().any(|&a| a > 0) {
            self.entries.insert(m, local);
        } else {
            self.entries.remove(&m);
        }
    }

    pub fn is_unit(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn local(&self, m: i32) -> Option<&LocalIdx> {
        self.entries.get(&m)
    }

    /// Smallest window [a, b] containing the support (None when trivial).
    pub fn window(&self) -> Option<(i32, i32)> {
        let min = *self.entries.keys().next()?;
        let max = *self.entries.keys().next_back()?;
        Some((min, max))
    }
}

/// Report of a star-compatibility check on a weight block.
#[derive(Debug, Clone)]
pub struct StarReport {
    pub pairs: Vec<(ExtCrystalIndex, ExtCrystalIndex)>,
}

/// One computed global-basis element.
#[derive(Debug, Clone)]
pub struct GbEntry {
    pub index: ExtCrystalIndex,
    pub element: HatElem,
    pub weight: RootVec,
    /// Expansion of the element over the P basis, diagonal coefficient 1.
    pub p_expansion: Vec<(ExtCrystalIndex, RatFunc)>,
}

/// Global-basis computation context: a finite-type upper-global-basis table
/// plus the memo table of computed entries. Weight blocks can be explored in
/// any order; the recursion is well-founded on total strong height.
pub struct GlobalBasis {
    gup: Arc<GupTable>,
    entries: RwLock<HashMap<ExtCrystalIndex, Arc<GbEntry>>>,
}

impl GlobalBasis {
    pub fn new(gup: Arc<GupTable>) -> Self {
        GlobalBasis { gup, entries: RwLock::new(HashMap::new()) }
    }

    pub fn gup(&self) -> &Arc<GupTable> {
        &self.gup
    }

    fn alg(&self) -> &Algebra {
        self.gup.algebra()
    }

    /// Per-level weight of a local index as an element of Q+.
    pub fn local_depth(&self, a: &LocalIdx) -> Depth {
        self.gup.index_depth(a)
    }

    /// Total weight of P(b) (signs alternate with the level).
    pub fn index_weight(&self, b: &ExtCrystalIndex) -> RootVec {
        let rank = self.alg().rank();
        let mut acc = RootVec::zero(rank);
        for (k, local) in &b.entries {
            let d = crate::uqneg::depth_root(&self.local_depth(local));
            let sign = if k.rem_euclid(2) == 0 { -1 } else { 1 };
            acc = &acc + &d.scaled(sign);
        }
        acc
    }

    /// Total strong height of P(b).
    pub fn strong_height(&self, b: &ExtCrystalIndex) -> usize {
        b.entries.values().map(|a| depth_height(&self.local_depth(a))).sum()
    }

    /// The componentwise preorder: ||wt(b_k)|| <= ||wt(b'_k)|| at every level.
    pub fn preceq(&self, a: &ExtCrystalIndex, b: &ExtCrystalIndex) -> bool {
        let levels: std::collections::BTreeSet<i32> =
            a.entries.keys().chain(b.entries.keys()).copied().collect();
        let rank = self.alg().rank();
        for k in levels {
            let da = a.local(k).map(|x| self.local_depth(x)).unwrap_or_else(|| vec![0; rank]);
            let db = b.local(k).map(|x| self.local_depth(x)).unwrap_or_else(|| vec![0; rank]);
            if da.iter().zip(&db).any(|(x, y)| x > y) {
                return false;
            }
        }
        true
    }

    /// Strict part of the preorder.
    pub fn prec(&self, a: &ExtCrystalIndex, b: &ExtCrystalIndex) -> bool {
        self.preceq(a, b) && !self.preceq(b, a)
    }

    /// P(b): the descending-level ordered product of phi_k(Gup(b_k)).
    pub fn p_elem(&self, b: &ExtCrystalIndex) -> Result<HatElem> {
        let alg = self.alg();
        let mut out = HatElem::one();
        let mut levels: Vec<i32> = b.entries.keys().copied().collect();
        levels.sort_unstable_by(|x, y| y.cmp(x));
        for k in levels {
            let g = self.gup.gup(b.local(k).unwrap())?;
            out = alg.hat_mul(&out, &alg.phi_m(&g, k)?)?;
        }
        Ok(out)
    }

    /// The profile (level -> weight) of a normal monomial.
    fn word_profile(&self, w: &crate::bosonic::HatWord) -> ProfileKey {
        let rank = self.alg().rank();
        split_blocks(w).into_iter().map(|(l, word)| (l, word_depth(&word, rank))).collect()
    }

    /// All indices whose per-level weights match the profile.
    fn profile_indices(&self, profile: &ProfileKey) -> Result<Vec<ExtCrystalIndex>> {
        let mut out = vec![ExtCrystalIndex::unit()];
        for (level, depth) in profile {
            let block = self.gup.block(depth)?;
            let mut next = Vec::with_capacity(out.len() * block.indices.len());
            for prefix in &out {
                for local in &block.indices {
                    let mut b = prefix.clone();
                    b.insert(*level, local.clone());
                    next.push(b);
                }
            }
            out = next;
        }
        Ok(out)
    }

    /// Exact expansion of an element over the P basis, profile block by
    /// profile block.
    pub fn expand_in_p(&self, x: &HatElem) -> Result<Vec<(ExtCrystalIndex, RatFunc)>> {
        let mut by_profile: BTreeMap<ProfileKey, Vec<(crate::bosonic::HatWord, RatFunc)>> =
            BTreeMap::new();
        for (w, c) in x.terms() {
            by_profile.entry(self.word_profile(w)).or_default().push((w.clone(), c.clone()));
        }
        let mut out: BTreeMap<ExtCrystalIndex, RatFunc> = BTreeMap::new();
        for (profile, terms) in by_profile {
            let candidates = self.profile_indices(&profile)?;
            let ps: Vec<HatElem> =
                candidates.iter().map(|b| self.p_elem(b)).collect::<Result<_>>()?;
            // row space: all monomials appearing anywhere in this block
            let mut monomials: Vec<crate::bosonic::HatWord> = Vec::new();
            for p in &ps {
                for w in p.terms().keys() {
                    if !monomials.contains(w) {
                        monomials.push(w.clone());
                    }
                }
            }
            for (w, _) in &terms {
                if !monomials.contains(w) {
                    monomials.push(w.clone());
                }
            }
            monomials.sort();
            let a: Matrix = monomials
                .iter()
                .map(|w| {
                    ps.iter()
                        .map(|p| p.terms().get(w).cloned().unwrap_or_else(RatFunc::zero))
                        .collect()
                })
                .collect();
            let rhs: Vec<RatFunc> = monomials
                .iter()
                .map(|w| {
                    terms
                        .iter()
                        .find(|(tw, _)| tw == w)
                        .map(|(_, c)| c.clone())
                        .unwrap_or_else(RatFunc::zero)
                })
                .collect();
            let sol = linalg::solve_rectangular(&a, &rhs).ok_or(Error::NotInSpan)?;
            for (b, c) in candidates.into_iter().zip(sol) {
                if !c.is_zero() {
                    let slot = out.entry(b).or_insert_with(RatFunc::zero);
                    *slot += &c;
                }
            }
        }
        Ok(out.into_iter().filter(|(_, c)| !c.is_zero()).collect())
    }

    /// The global-basis element G(b), by the triangular c-fixing recursion.
    pub fn g_elem(&self, b: &ExtCrystalIndex) -> Result<Arc<GbEntry>> {
        if let Some(e) = self.entries.read().unwrap().get(b) {
            return Ok(e.clone());
        }
        let alg = self.alg();
        let sh = self.strong_height(b);
        let p = self.p_elem(b)?;
        let weight = self.index_weight(b);
        let cp = alg.c_h(&p)?;
        let diff = cp.add(&p.scale(&-&RatFunc::one()));
        let entry = if diff.is_zero() {
            GbEntry {
                index: b.clone(),
                element: p,
                weight,
                p_expansion: vec![(b.clone(), RatFunc::one())],
            }
        } else {
            let correction = self.expand_in_p(&diff)?;
            for (bp, c) in &correction {
                if !self.prec(bp, b) {
                    return Err(Error::Triangularity(format!(
                        "c(P) correction at a non-smaller index {bp:?}"
                    )));
                }
                if self.strong_height(bp) >= sh {
                    return Err(Error::Triangularity(
                        "correction does not drop the strong height".into(),
                    ));
                }
                if !c.is_integer_laurent_whole_powers() {
                    return Err(Error::NonIntegralTransition(format!("{c} at {bp:?}")));
                }
            }
            // convert the correction to the G basis (entries have strictly
            // smaller strong height, so the recursion terminates)
            let mut over_p: BTreeMap<ExtCrystalIndex, RatFunc> = correction.into_iter().collect();
            let mut g_coeffs: Vec<(Arc<GbEntry>, RatFunc)> = Vec::new();
            loop {
                let next = over_p
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .max_by_key(|(bp, _)| self.strong_height(bp))
                    .map(|(bp, c)| (bp.clone(), c.clone()));
                let Some((bp, c)) = next else {
                    break;
                };
                let sub = self.g_elem(&bp)?;
                for (bq, x) in &sub.p_expansion {
                    let slot = over_p.entry(bq.clone()).or_insert_with(RatFunc::zero);
                    *slot -= &(&c * x);
                }
                g_coeffs.push((sub, c));
            }
            let mut element = p;
            let mut p_expansion: BTreeMap<ExtCrystalIndex, RatFunc> = BTreeMap::new();
            p_expansion.insert(b.clone(), RatFunc::one());
            for (sub, pc) in g_coeffs {
                let bar = pc.bar();
                if !(&bar + &pc).is_zero() {
                    return Err(Error::NonAntisymmetric(format!(
                        "transition {pc} at {:?}",
                        sub.index
                    )));
                }
                let f = crate::aqn::positive_part(&pc);
                if f.is_zero() {
                    continue;
                }
                element = element.add(&sub.element.scale(&f));
                for (bq, x) in &sub.p_expansion {
                    let slot = p_expansion.entry(bq.clone()).or_insert_with(RatFunc::zero);
                    *slot += &(&f * x);
                }
            }
            GbEntry {
                index: b.clone(),
                element,
                weight,
                p_expansion: p_expansion.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            }
        };
        let mut cache = self.entries.write().unwrap();
        let entry = cache.entry(b.clone()).or_insert_with(|| Arc::new(entry));
        Ok(entry.clone())
    }

    /// The normalized element q^{-N(wt)/2} G(b); bar-invariant.
    pub fn g_tilde(&self, b: &ExtCrystalIndex) -> Result<HatElem> {
        let g = self.g_elem(b)?;
        self.alg().sigma_h(&g.element)
    }

    /// Exact expansion of an element over the G basis.
    pub fn expand_in_g(&self, x: &HatElem) -> Result<BTreeMap<ExtCrystalIndex, RatFunc>> {
        let mut over_p: BTreeMap<ExtCrystalIndex, RatFunc> =
            self.expand_in_p(x)?.into_iter().collect();
        let mut out: BTreeMap<ExtCrystalIndex, RatFunc> = BTreeMap::new();
        loop {
            let next = over_p
                .iter()
                .filter(|(_, c)| !c.is_zero())
                .max_by_key(|(bp, _)| self.strong_height(bp))
                .map(|(bp, c)| (bp.clone(), c.clone()));
            let Some((bp, c)) = next else {
                break;
            };
            let sub = self.g_elem(&bp)?;
            for (bq, x) in &sub.p_expansion {
                let slot = over_p.entry(bq.clone()).or_insert_with(RatFunc::zero);
                *slot -= &(&c * x);
            }
            out.insert(bp, c);
        }
        Ok(out)
    }

    /// The standard monomial: the descending-level product of the per-level
    /// dual PBW monomials.
    pub fn m_monomial(&self, c: &ExtCrystalIndex) -> Result<HatElem> {
        let alg = self.alg();
        let mut out = HatElem::one();
        let mut levels: Vec<i32> = c.entries.keys().copied().collect();
        levels.sort_unstable_by(|x, y| y.cmp(x));
        for k in levels {
            let m = dual_pbw_monomial(alg, self.gup.pbw(), c.local(k).unwrap())?;
            out = alg.hat_mul(&out, &alg.phi_m(&m, k)?)?;
        }
        Ok(out)
    }

    /// The normalized standard element q^{-N(wt)/2} M(c).
    pub fn e_standard(&self, c: &ExtCrystalIndex) -> Result<HatElem> {
        self.alg().sigma_h(&self.m_monomial(c)?)
    }

    /// All indices supported in the window with the given total strong-height
    /// bound.
    pub fn indices_in_window(
        &self,
        window: (i32, i32),
        max_sh: usize,
    ) -> Result<Vec<ExtCrystalIndex>> {
        // local indices grouped by height
        let mut by_height: Vec<Vec<LocalIdx>> = vec![Vec::new(); max_sh + 1];
        by_height[0].push(vec![0; self.gup.pbw().len()]);
        for depth in self.gup.depths_to_height(max_sh) {
            let h = depth_height(&depth);
            let block = self.gup.block(&depth)?;
            by_height[h].extend(block.indices.iter().cloned());
        }
        let mut out = vec![ExtCrystalIndex::unit()];
        for level in window.0..=window.1 {
            let mut next = Vec::new();
            for b in &out {
                let used = self.strong_height(b);
                for heights in by_height.iter().take(max_sh - used + 1) {
                    for local in heights {
                        let mut nb = b.clone();
                        nb.insert(level, local.clone());
                        next.push(nb);
                    }
                }
            }
            out = next;
        }
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Check that star maps the G's of one weight block bijectively onto the
    /// G's of the mirrored block.
    pub fn star_orbit_check(
        &self,
        weight: &RootVec,
        window: (i32, i32),
        max_sh: usize,
    ) -> Result<StarReport> {
        let alg = self.alg();
        let source: Vec<ExtCrystalIndex> = self
            .indices_in_window(window, max_sh)?
            .into_iter()
            .filter(|b| &self.index_weight(b) == weight)
            .collect();
        let mirrored = (-window.1, -window.0);
        let targets: Vec<ExtCrystalIndex> = self
            .indices_in_window(mirrored, max_sh)?
            .into_iter()
            .filter(|b| &self.index_weight(b) == weight)
            .collect();
        let target_elems: Vec<(ExtCrystalIndex, HatElem)> = targets
            .iter()
            .map(|b| Ok((b.clone(), self.g_elem(b)?.element.clone())))
            .collect::<Result<_>>()?;
        let mut pairs = Vec::new();
        let mut used: Vec<bool> = vec![false; target_elems.len()];
        for b in &source {
            let starred = alg.star_h(&self.g_elem(b)?.element)?;
            let hit = target_elems
                .iter()
                .enumerate()
                .find(|(j, (_, e))| !used[*j] && *e == starred);
            match hit {
                Some((j, (bt, _))) => {
                    used[j] = true;
                    pairs.push((b.clone(), bt.clone()));
                }
                None => return Err(Error::SetMismatch),
            }
        }
        if used.iter().filter(|u| **u).count() != source.len() {
            return Err(Error::SetMismatch);
        }
        Ok(StarReport { pairs })
    }

    /// Export the memo table as (index, P-expansion) rows for persistence.
    pub fn export_entries(&self) -> Vec<(ExtCrystalIndex, Vec<(ExtCrystalIndex, RatFunc)>)> {
        let cache = self.entries.read().unwrap();
        let mut rows: Vec<_> =
            cache.values().map(|e| (e.index.clone(), e.p_expansion.clone())).collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        rows
    }

    /// Re-install previously computed entries from their P-expansions.
    pub fn import_entries(
        &self,
        rows: Vec<(ExtCrystalIndex, Vec<(ExtCrystalIndex, RatFunc)>)>,
    ) -> Result<usize> {
        let mut installed = 0;
        for (index, pexp) in rows {
            let diag = pexp.iter().find(|(b, _)| *b == index);
            if !diag.is_some_and(|(_, c)| c.is_one()) {
                return Err(Error::Triangularity("cached entry lacks a unit diagonal".into()));
            }
            let mut element = HatElem::zero();
            for (b, c) in &pexp {
                element = element.add(&self.p_elem(b)?.scale(c));
            }
            let weight = self.index_weight(&index);
            let entry =
                Arc::new(GbEntry { index: index.clone(), element, weight, p_expansion: pexp });
            self.entries.write().unwrap().entry(index).or_insert(entry);
            installed += 1;
        }
        Ok(installed)
    }
}
