//! Randomized and exhaustive verification suites, shared by the CLI `verify`
//! command and the acceptance tests. Every suite is deterministic for a fixed
//! seed and returns one result line per check.

use std::collections::BTreeMap;
use std::sync::Arc;

use num::bigint::BigInt;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::aqn::{AqnElem, DualPbw, GupTable, ReducedWord};
use crate::bosonic::{HatElem, HatWord, LevelLetter, TensorState};
use crate::cartan::CartanDatum;
use crate::error::Result;
use crate::globalbasis::{ExtCrystalIndex, GlobalBasis};
use crate::linalg;
use crate::scalars::RatFunc;
use crate::uqneg::{depth_height, Algebra, Depth, FreeElem, Word};

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: Option<String>,
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub seed: u64,
    pub trials: u64,
    pub checks: Vec<CheckResult>,
}

impl SuiteReport {
    fn new(suite: &str, seed: u64, trials: u64) -> Self {
        SuiteReport { suite: suite.to_string(), passed: true, seed, trials, checks: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: Option<String>) {
        if !passed {
            self.passed = false;
        }
        self.checks.push(CheckResult { name: name.into(), passed, detail });
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

// --- random generators ---

fn rand_scalar(rng: &mut ChaCha8Rng) -> RatFunc {
    let mut acc = RatFunc::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let c = loop {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                break c;
            }
        };
        let e = rng.gen_range(-4i64..=4);
        acc += &(&RatFunc::int(c) * &RatFunc::v_pow(e));
    }
    if acc.is_zero() {
        RatFunc::one()
    } else {
        acc
    }
}

fn rand_word(rng: &mut ChaCha8Rng, rank: usize, len: usize) -> Word {
    (0..len).map(|_| rng.gen_range(0..rank)).collect()
}

fn rand_depth(rng: &mut ChaCha8Rng, rank: usize, max_ht: usize) -> Depth {
    let h = rng.gen_range(0..=max_ht);
    let mut d = vec![0usize; rank];
    for _ in 0..h {
        d[rng.gen_range(0..rank)] += 1;
    }
    d
}

fn rand_hat_elem(
    alg: &Algebra,
    rng: &mut ChaCha8Rng,
    window: (i32, i32),
    max_len: usize,
    terms: usize,
) -> Result<HatElem> {
    let rank = alg.rank();
    let mut raw: Vec<(HatWord, RatFunc)> = Vec::new();
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_len);
        let w: HatWord = (0..len)
            .map(|_| LevelLetter {
                level: rng.gen_range(window.0..=window.1),
                index: rng.gen_range(0..rank),
            })
            .collect();
        raw.push((w, rand_scalar(rng)));
    }
    alg.normalize(raw)
}

fn rand_state(
    alg: &Algebra,
    rng: &mut ChaCha8Rng,
    window: (i32, i32),
    per_level_ht: usize,
) -> Result<TensorState> {
    let rank = alg.rank();
    let mut out = TensorState::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let mut slots: BTreeMap<i32, crate::uqneg::UqmElem> = BTreeMap::new();
        for level in window.0..=window.1 {
            if rng.gen_bool(0.5) {
                let len = rng.gen_range(1..=per_level_ht);
                let w = rand_word(rng, rank, len);
                slots.insert(level, alg.reduce(&FreeElem::word(w))?);
            }
        }
        let pure = TensorState::pure(alg, &slots)?;
        out = out.add(&pure.scale(&rand_scalar(rng)));
    }
    if out.is_zero() {
        Ok(TensorState::vacuum())
    } else {
        Ok(out)
    }
}

/// Random nonzero element of the weight space `depth` embedded at `level`.
fn rand_block_elem(
    alg: &Algebra,
    rng: &mut ChaCha8Rng,
    level: i32,
    depth: &Depth,
) -> Result<HatElem> {
    let basis = alg.weight_basis(depth)?;
    let mut raw: Vec<(HatWord, RatFunc)> = Vec::new();
    let picks = rng.gen_range(1..=basis.dim().clamp(1, 2));
    for _ in 0..picks {
        let w = &basis.words[rng.gen_range(0..basis.dim())];
        let hw: HatWord = w.iter().map(|&i| LevelLetter { level, index: i }).collect();
        raw.push((hw, rand_scalar(rng)));
    }
    alg.normalize(raw)
}

fn rand_free_elem(alg: &Algebra, rng: &mut ChaCha8Rng, max_ht: usize, terms: usize) -> FreeElem {
    let rank = alg.rank();
    let mut out = FreeElem::zero();
    for _ in 0..terms {
        let len = rng.gen_range(0..=max_ht);
        out.insert(rand_word(rng, rank, len), rand_scalar(rng));
    }
    if out.is_zero() {
        FreeElem::one()
    } else {
        out
    }
}

fn rand_aqn_homogeneous(alg: &Algebra, rng: &mut ChaCha8Rng, depth: &Depth) -> Result<AqnElem> {
    let basis = alg.weight_basis(depth)?;
    let mut x = FreeElem::zero();
    for _ in 0..rng.gen_range(1..=2) {
        let w = basis.words[rng.gen_range(0..basis.dim())].clone();
        x.insert(w, rand_scalar(rng));
    }
    if x.is_zero() {
        x = FreeElem::word(basis.words[0].clone());
    }
    Ok(AqnElem { carrier: alg.reduce(&x)? })
}

// --- operator application helpers ---

fn act_power(alg: &Algebra, i: usize, m: i32, n: u64, s: &TensorState) -> Result<TensorState> {
    let mut t = s.clone();
    for _ in 0..n {
        t = alg.act_f(i, m, &t)?;
    }
    Ok(t)
}

/// The quantum Serre operator at one level, applied to a state.
pub fn serre_op_state(
    alg: &Algebra,
    i: usize,
    j: usize,
    p: i32,
    s: &TensorState,
) -> Result<TensorState> {
    let b = (1 - alg.cartan().c(i, j)) as u64;
    let mut acc = TensorState::zero();
    for k in 0..=b {
        let mut t = act_power(alg, i, p, b - k, s)?;
        t = alg.act_f(j, p, &t)?;
        t = act_power(alg, i, p, k, &t)?;
        let mut c = alg.cartan().q_binom_i(b, k, i);
        if k % 2 == 1 {
            c = -c;
        }
        acc = acc.add(&t.scale(&c));
    }
    Ok(acc)
}

fn max_serre_degree(cartan: &CartanDatum) -> usize {
    let mut b = 0;
    for i in 0..cartan.rank() {
        for j in 0..cartan.rank() {
            if i != j {
                b = b.max((1 - cartan.c(i, j)) as usize);
            }
        }
    }
    b
}

fn all_depths(rank: usize, max_ht: usize) -> Vec<Depth> {
    fn rec(out: &mut Vec<Depth>, current: &mut Depth, k: usize, left: usize) {
        if k == current.len() {
            out.push(current.clone());
            return;
        }
        for n in 0..=left {
            current[k] = n;
            rec(out, current, k + 1, left - n);
        }
        current[k] = 0;
    }
    let mut out = Vec::new();
    let mut current = vec![0usize; rank];
    rec(&mut out, &mut current, 0, max_ht);
    out.sort();
    out
}

// --- suites ---

/// Defining relations on the serial module (both families), on random states.
pub fn suite_relations(cartan: &CartanDatum, seed: u64, trials: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("relations", seed, trials);
    let bound = 3 + max_serre_degree(cartan) + 1;
    let alg = Algebra::new(cartan.clone()).with_max_height(bound);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = (-1i32, 2i32);
    let rank = cartan.rank();
    for t in 0..trials {
        let s = rand_state(&alg, &mut rng, window, 3)?;
        // (a) quantum Serre at a fixed level
        if rank > 1 {
            let i = rng.gen_range(0..rank);
            let j = loop {
                let j = rng.gen_range(0..rank);
                if j != i {
                    break j;
                }
            };
            let p = rng.gen_range(window.0..=window.1);
            let z = serre_op_state(&alg, i, j, p, &s)?;
            report.check(
                format!("serre i={i} j={j} p={p} trial={t}"),
                z.is_zero(),
                (!z.is_zero()).then(|| format!("{} residual terms", z.terms().len())),
            );
        }
        // (b) cross-level commutation with the delta correction
        let i = rng.gen_range(0..rank);
        let j = rng.gen_range(0..rank);
        let m = rng.gen_range(window.0..window.1);
        let p = rng.gen_range(m + 1..=window.1);
        let lhs = alg.act_f(i, m, &alg.act_f(j, p, &s)?)?;
        let sign = if (p - m + 1).rem_euclid(2) == 0 { 1 } else { -1 };
        let e = sign * cartan.sym(i, j);
        let mut rhs = alg.act_f(j, p, &alg.act_f(i, m, &s)?)?.scale(&RatFunc::q_pow(e));
        if j == i && p == m + 1 {
            rhs = rhs.add(&s.scale(&alg.zeta_i(i)));
        }
        report.check(format!("boson i={i} m={m} j={j} p={p} trial={t}"), lhs == rhs, None);
    }
    Ok(report)
}

/// Serial decomposition: G o F and F o G are the identity.
pub fn suite_serial(cartan: &CartanDatum, seed: u64, trials: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("serial", seed, trials);
    let alg = Algebra::new(cartan.clone()).with_max_height(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let window = (-1i32, 2i32);
    for t in 0..trials {
        let x = rand_hat_elem(&alg, &mut rng, window, 4, 2)?;
        let gf = alg.g_map(&alg.f_map(&x)?)?;
        report.check(format!("G(F(x))=x trial={t}"), gf == x, None);
        let s = rand_state(&alg, &mut rng, window, 2)?;
        let fg = alg.f_map(&alg.g_map(&s)?)?;
        report.check(format!("F(G(s))=s trial={t}"), fg == s, None);
    }
    Ok(report)
}

/// The closed-form values of both forms and the dual-generator pairings.
pub fn suite_closed_forms(cartan: &CartanDatum) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("closed_forms", 0, 0);
    let alg = Algebra::new(cartan.clone()).with_max_height(8);
    for i in 0..cartan.rank() {
        let f = alg.hat_gen(i, 0)?;
        let mut power = HatElem::one();
        let mut product = RatFunc::one();
        for n in 1..=4u64 {
            power = alg.hat_mul(&power, &f)?;
            product = &product * &(&RatFunc::one() - &alg.cartan().qi_pow(i, 2 * n as i64));
            let h = alg.hform(&power, &power)?;
            report.check(format!("hform f_{i}^{n}"), h == product, Some(format!("{h}")));
            let p = alg.pairform(&power, &power)?;
            let expect = &alg.cartan().qi_pow(i, -((n * n) as i64)) * &product;
            report.check(format!("pairform f_{i}^{n}"), p == expect, Some(format!("{p}")));
        }
    }
    for i in 0..cartan.rank() {
        for j in 0..cartan.rank() {
            let v = alg.aform(&alg.aqn_generator(i)?, &alg.aqn_generator(j)?)?;
            let expect = if i == j { alg.zeta_i(i) } else { RatFunc::zero() };
            report.check(format!("aform <{i}>,<{j}>"), v == expect, Some(format!("{v}")));
            if i != j && cartan.sym(i, j) < 0 {
                let e = cartan.sym(i, j);
                let gi = alg.aqn_generator(i)?;
                let gj = alg.aqn_generator(j)?;
                let num = alg
                    .aqn_mul(&gi, &gj)?
                    .add(&alg.aqn_mul(&gj, &gi)?.scale(&-&RatFunc::q_pow(-e)));
                let den = &RatFunc::one() - &RatFunc::q_pow(-2 * e);
                let angij = num.scale(&den.inv()?);
                let v = alg.aform(&angij, &angij)?;
                let expect = &(&alg.zeta_i(i) * &alg.zeta_i(j)) * &den.inv()?;
                report.check(format!("aform <{i}{j}>"), v == expect, Some(format!("{v}")));
            }
        }
    }
    Ok(report)
}

/// Structural properties of both bilinear forms on random elements.
pub fn suite_forms(cartan: &CartanDatum, seed: u64, trials: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("forms", seed, trials);
    let alg = Algebra::new(cartan.clone()).with_max_height(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = cartan.rank();
    let window = (-1i32, 2i32);
    for t in 0..trials {
        let x = rand_hat_elem(&alg, &mut rng, window, 4, 2)?;
        let y = rand_hat_elem(&alg, &mut rng, window, 4, 2)?;
        // symmetry and invariance
        let xy = alg.hform(&x, &y)?;
        report.check(format!("symmetry t={t}"), xy == alg.hform(&y, &x)?, None);
        let shifted = alg.hform(&alg.shift_d(&x, 1), &alg.shift_d(&y, 1))?;
        report.check(format!("shift-invariance t={t}"), xy == shifted, None);
        let starred = alg.hform(&alg.star_h(&y)?, &alg.star_h(&x)?)?;
        report.check(format!("star-invariance t={t}"), xy == starred, None);
        // sliding adjunction
        let i = rng.gen_range(0..rank);
        let m = rng.gen_range(window.0..=window.1);
        let lhs = alg.mn_proj(&alg.hat_mul(&alg.hat_gen(i, m - 1)?, &x)?);
        let rhs = alg.mn_proj(&alg.hat_mul(&x, &alg.hat_gen(i, m + 1)?)?);
        report.check(format!("sliding t={t}"), lhs == rhs, None);
        // form adjunctions
        let fx = alg.hat_mul(&alg.hat_gen(i, m)?, &x)?;
        let yf = alg.hat_mul(&y, &alg.hat_gen(i, m + 1)?)?;
        report.check(
            format!("f-adjunction-left t={t}"),
            alg.hform(&fx, &y)? == alg.hform(&x, &yf)?,
            None,
        );
        let xf = alg.hat_mul(&x, &alg.hat_gen(i, m)?)?;
        let fy = alg.hat_mul(&alg.hat_gen(i, m - 1)?, &y)?;
        report.check(
            format!("f-adjunction-right t={t}"),
            alg.hform(&xf, &y)? == alg.hform(&x, &fy)?,
            None,
        );
        // E-adjunction on half spaces (levels <= m resp. >= m, with m = 1)
        let m = 1;
        let xl = rand_hat_elem(&alg, &mut rng, (-1, m), 3, 2)?;
        let yl = rand_hat_elem(&alg, &mut rng, (-1, m), 3, 2)?;
        let lhs = alg.hform(&alg.hat_mul(&alg.hat_gen(i, m)?, &xl)?, &yl)?;
        let rhs = alg.hform(&xl, &alg.e_op(i, m, &yl)?)?;
        report.check(format!("E-adjunction t={t}"), lhs == rhs, None);
        let u = rand_hat_elem(&alg, &mut rng, (m, 2), 3, 2)?;
        let v = rand_hat_elem(&alg, &mut rng, (m, 2), 3, 2)?;
        let lhs = alg.hform(&u, &alg.hat_mul(&v, &alg.hat_gen(i, m)?)?)?;
        let rhs = alg.hform(&alg.estar_op(i, m, &u)?, &v)?;
        report.check(format!("Estar-adjunction t={t}"), lhs == rhs, None);
        // divided-power pair adjunction on homogeneous elements of the lower
        // half space
        let n = rng.gen_range(1..=2u64);
        let dx = rand_depth(&mut rng, rank, 2);
        let xl = rand_block_elem(&alg, &mut rng, 0, &dx)?;
        let mut fnx = xl.clone();
        for _ in 0..n {
            fnx = alg.hat_mul(&alg.hat_gen(i, m)?, &fnx)?;
        }
        fnx = fnx.scale(&alg.cartan().q_factorial_i(n, i).inv()?);
        let zl = rand_block_elem(&alg, &mut rng, 0, &dx)?;
        let mut yl = zl.clone();
        for _ in 0..n {
            yl = alg.hat_mul(&alg.hat_gen(i, m)?, &yl)?;
        }
        let wx = alg.hat_weight(&xl).unwrap();
        let scalar = &alg.cartan().qi_pow(i, -((n * n) as i64))
            * &RatFunc::q_pow(
                n as i64 * alg.cartan().form(&alg.cartan().alpha_level(i, m as i64), &wx),
            );
        let lhs = alg.pairform(&fnx, &yl)?;
        let rhs = &scalar * &alg.pairform(&xl, &alg.e_div(i, m, n, &yl)?)?;
        report.check(format!("pair-divided t={t}"), lhs == rhs, None);
        // level factorization with the exact q-power
        let a = rng.gen_range(-1..=0);
        let b = a + rng.gen_range(1..=2);
        let mut xs: Vec<HatElem> = Vec::new();
        let mut ys: Vec<HatElem> = Vec::new();
        for k in (a..=b).rev() {
            let d = rand_depth(&mut rng, rank, 2);
            xs.push(rand_block_elem(&alg, &mut rng, k, &d)?);
            ys.push(rand_block_elem(&alg, &mut rng, k, &d)?);
        }
        let mut x_prod = HatElem::one();
        let mut y_prod = HatElem::one();
        for (xk, yk) in xs.iter().zip(&ys) {
            x_prod = alg.hat_mul(&x_prod, xk)?;
            y_prod = alg.hat_mul(&y_prod, yk)?;
        }
        let mut power = 0i64;
        for s in 0..xs.len() {
            for tt in s + 1..xs.len() {
                // xs is level-descending, so position order matches level order
                // reversed: sum over pairs of distinct levels
                let ws = alg.hat_weight(&xs[s]).unwrap();
                let wt = alg.hat_weight(&xs[tt]).unwrap();
                power += alg.cartan().form(&ws, &wt);
            }
        }
        let mut product = RatFunc::q_pow(power);
        let mut pair_product = RatFunc::one();
        for (xk, yk) in xs.iter().zip(&ys) {
            product = &product * &alg.hform(xk, yk)?;
            pair_product = &pair_product * &alg.pairform(xk, yk)?;
        }
        report.check(
            format!("factorization t={t}"),
            alg.hform(&x_prod, &y_prod)? == product,
            None,
        );
        report.check(
            format!("pair-factorization t={t}"),
            alg.pairform(&x_prod, &y_prod)? == pair_product,
            None,
        );
        // phi isometry
        let d = rand_depth(&mut rng, rank, 3);
        let fa = rand_aqn_homogeneous(&alg, &mut rng, &d)?;
        let fb = rand_aqn_homogeneous(&alg, &mut rng, &d)?;
        let mlev = rng.gen_range(-1..=2);
        let lhs = alg.pairform(&alg.phi_m(&fa, mlev)?, &alg.phi_m(&fb, mlev)?)?;
        report.check(format!("phi-isometry t={t}"), lhs == alg.aform(&fa, &fb)?, None);
    }
    Ok(report)
}

/// Nondegeneracy of the form on the two-level bi-weight blocks.
pub fn suite_gram(cartan: &CartanDatum, per_level_ht: usize) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gram", 0, 0);
    let alg = Algebra::new(cartan.clone()).with_max_height((2 * per_level_ht).max(6));
    let depths = all_depths(cartan.rank(), per_level_ht);
    for d1 in &depths {
        for d0 in &depths {
            let b1 = alg.weight_basis(d1)?;
            let b0 = alg.weight_basis(d0)?;
            let mut monomials: Vec<HatElem> = Vec::new();
            for w1 in &b1.words {
                for w0 in &b0.words {
                    let mut w: HatWord =
                        w1.iter().map(|&i| LevelLetter { level: 1, index: i }).collect();
                    w.extend(w0.iter().map(|&i| LevelLetter { level: 0, index: i }));
                    monomials.push(alg.normalize([(w, RatFunc::one())])?);
                }
            }
            let mut gram: linalg::Matrix = Vec::with_capacity(monomials.len());
            for x in &monomials {
                let mut row = Vec::with_capacity(monomials.len());
                for y in &monomials {
                    row.push(alg.hform(x, y)?);
                }
                gram.push(row);
            }
            let det = linalg::det(&gram);
            report.check(
                format!("gram block {:?}|{:?}", d1, d0),
                !det.is_zero(),
                Some(format!("dim {}", monomials.len())),
            );
        }
    }
    Ok(report)
}

/// Quantum boson algebra: both presentations vanish as operators, and the
/// derivation/multiplication operators of bounded height are independent.
pub fn suite_boson(cartan: &CartanDatum, seed: u64, trials: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("boson", seed, trials);
    let alg = Algebra::new(cartan.clone()).with_max_height(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = cartan.rank();
    for i in 0..rank {
        for j in 0..rank {
            if i == j {
                continue;
            }
            let s = alg.serre_element(i, j)?;
            report.check(format!("serre f-side {i},{j}"), alg.is_zero_uq(&s)?, None);
        }
    }
    for t in 0..trials {
        let x = rand_free_elem(&alg, &mut rng, 3, 2);
        if rank > 1 {
            let i = rng.gen_range(0..rank);
            let j = loop {
                let j = rng.gen_range(0..rank);
                if j != i {
                    break j;
                }
            };
            let z = alg.serre_eprime_op(i, j, &x)?;
            report.check(format!("serre e'-side t={t}"), alg.is_zero_uq(&z)?, None);
        }
        // e'_i f_j - q^{-(ai,aj)} f_j e'_i - delta = 0 as operators
        let i = rng.gen_range(0..rank);
        let j = rng.gen_range(0..rank);
        let a = alg.e_prime(i, &FreeElem::generator(j).mul(&x));
        let b = FreeElem::generator(j)
            .mul(&alg.e_prime(i, &x))
            .scale(&RatFunc::q_pow(-cartan.sym(i, j)));
        let mut diff = a.add(&b.scale(&-&RatFunc::one()));
        if i == j {
            diff = diff.add(&x.scale(&-&RatFunc::one()));
        }
        report.check(format!("e'f relation t={t}"), alg.is_zero_uq(&diff)?, None);
    }
    // rank check of the E(w)L(w') operators
    let (rank_got, expected) = psi_rank_check(&alg, 3, 4)?;
    report.check(
        "psi-independence rank",
        rank_got == expected,
        Some(format!("rank {rank_got} of {expected}")),
    );
    Ok(report)
}

/// Rank of the span of the operators E(w)L(w') over basis-word pairs with
/// ht(w) + ht(w') <= total_ht, acting on the weight spaces of height <=
/// domain_ht. Returns (rank, number of operators).
pub fn psi_rank_check(alg: &Algebra, total_ht: usize, domain_ht: usize) -> Result<(usize, usize)> {
    let rank = alg.rank();
    let depths = all_depths(rank, total_ht);
    // pairs grouped by the net depth shift (as a signed vector)
    let mut groups: BTreeMap<Vec<i64>, Vec<(Word, Word)>> = BTreeMap::new();
    let mut total_pairs = 0usize;
    for dw in &depths {
        for dwp in &depths {
            if depth_height(dw) + depth_height(dwp) > total_ht {
                continue;
            }
            let bw = alg.weight_basis(dw)?;
            let bwp = alg.weight_basis(dwp)?;
            let shift: Vec<i64> =
                dwp.iter().zip(dw).map(|(a, b)| *a as i64 - *b as i64).collect();
            for w in &bw.words {
                for wp in &bwp.words {
                    groups.entry(shift.clone()).or_default().push((w.clone(), wp.clone()));
                    total_pairs += 1;
                }
            }
        }
    }
    let domain = all_depths(rank, domain_ht);
    let mut achieved = 0usize;
    for (shift, pairs) in groups {
        let mut rows: linalg::Matrix = Vec::new();
        for (w, wp) in &pairs {
            let mut row: Vec<RatFunc> = Vec::new();
            for d in &domain {
                let target: Option<Depth> = d
                    .iter()
                    .zip(&shift)
                    .map(|(a, s)| {
                        let v = *a as i64 + s;
                        if v < 0 {
                            None
                        } else {
                            Some(v as usize)
                        }
                    })
                    .collect();
                let basis = alg.weight_basis(d)?;
                let tdim = match &target {
                    None => 0,
                    Some(td) => alg.weight_basis(td)?.dim(),
                };
                for b in &basis.words {
                    match &target {
                        None => {}
                        Some(td) => {
                            let image = alg.boson_act(
                                &FreeElem::word(w.clone()),
                                &FreeElem::word(wp.clone()),
                                &FreeElem::word(b.clone()),
                            );
                            let reduced = alg.reduce(&image)?;
                            let coords = reduced
                                .coords
                                .get(td)
                                .cloned()
                                .unwrap_or_else(|| vec![RatFunc::zero(); tdim]);
                            row.extend(coords);
                        }
                    }
                }
            }
            rows.push(row);
        }
        achieved += linalg::rank(&rows);
    }
    Ok((achieved, total_pairs))
}

/// Upper global basis checks for all weights up to a height bound.
pub fn suite_gup(
    cartan: &CartanDatum,
    rw: Option<Vec<usize>>,
    max_ht: usize,
    depth: usize,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gup", 0, 0);
    let alg = Arc::new(
        Algebra::new(cartan.clone()).with_max_height(max_ht.max(6)).with_series_depth(depth),
    );
    let rw = match rw {
        Some(w) => ReducedWord::new(&alg, w)?,
        None => ReducedWord::lex_smallest(&alg)?,
    };
    let pbw = DualPbw::new(&alg, rw)?;
    let table = GupTable::new(alg.clone(), pbw);
    for d in table.depths_to_height(max_ht) {
        let block = table.block(&d)?;
        for (j, g) in block.g.iter().enumerate() {
            let name = format!("gup {:?} #{j}", d);
            report.check(format!("{name} integral"), alg.is_integral_aqn(g)?, None);
            report.check(format!("{name} c-fixed"), alg.c_map(g)? == *g, None);
            report.check(format!("{name} lattice"), alg.lup_member(g)?, None);
        }
        for a in 0..block.g.len() {
            for b in 0..=a {
                let s = alg.aform(&block.g[a], &block.g[b])?;
                let prefix = s.series_at_zero(depth);
                let expect = BigInt::from(if a == b { 1 } else { 0 });
                let ok = prefix.as_ref().is_ok_and(|p| p[0] == expect);
                report.check(
                    format!("gup {:?} orthonormal ({a},{b})", d),
                    ok,
                    Some(format!("{s}")),
                );
            }
        }
    }
    Ok(report)
}

/// Global-basis checks over a level window and strong-height bound.
pub fn suite_gb(
    cartan: &CartanDatum,
    rw: Option<Vec<usize>>,
    window: (i32, i32),
    max_sh: usize,
    depth: usize,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("gb", 0, 0);
    let alg = Arc::new(
        Algebra::new(cartan.clone())
            .with_max_height((2 * max_sh).max(6))
            .with_series_depth(depth),
    );
    let rw = match rw {
        Some(w) => ReducedWord::new(&alg, w)?,
        None => ReducedWord::lex_smallest(&alg)?,
    };
    let pbw = DualPbw::new(&alg, rw)?;
    let gb = GlobalBasis::new(Arc::new(GupTable::new(alg.clone(), pbw)));
    let indices = gb.indices_in_window(window, max_sh)?;
    let mut by_weight: BTreeMap<crate::cartan::RootVec, Vec<ExtCrystalIndex>> = BTreeMap::new();
    for b in &indices {
        by_weight.entry(gb.index_weight(b)).or_default().push(b.clone());
    }
    for b in &indices {
        let entry = gb.g_elem(b)?;
        report.check(
            format!("c-fixed {b:?}"),
            alg.c_h(&entry.element)? == entry.element,
            None,
        );
        for (bp, c) in &entry.p_expansion {
            if bp == b {
                report.check(format!("diag {b:?}"), c.is_one(), None);
            } else {
                let ok = gb.prec(bp, b)
                    && c.is_integer_laurent_whole_powers()
                    && c.num().min_exp().is_none_or(|e| e > 0);
                report.check(format!("triangular {b:?} -> {bp:?}"), ok, Some(format!("{c}")));
            }
        }
        // single-level entries agree with the local basis
        if b.entries.len() == 1 {
            let (m, local) = b.entries.iter().next().unwrap();
            let expect = alg.phi_m(&gb.gup().gup(local)?, *m)?;
            report.check(format!("local match {b:?}"), entry.element == expect, None);
        }
    }
    // q = 0 orthonormality of the normalized basis inside weight blocks
    for (w, block) in &by_weight {
        for (a, ba) in block.iter().enumerate() {
            for bb in block.iter().take(a + 1) {
                let ga = gb.g_tilde(ba)?;
                let gbel = gb.g_tilde(bb)?;
                let s = alg.hform(&ga, &gbel)?;
                let prefix = s.series_at_zero(depth);
                let expect = BigInt::from(if ba == bb { 1 } else { 0 });
                let ok = prefix.as_ref().is_ok_and(|p| p[0] == expect);
                report.check(
                    format!("orthonormal {w} {ba:?} vs {bb:?}"),
                    ok,
                    Some(format!("{s}")),
                );
            }
        }
    }
    Ok(report)
}

/// Closure of the integral form under products of integral generators, plus
/// the non-integral counterexample.
pub fn suite_integrality(cartan: &CartanDatum, seed: u64, trials: u64) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("integrality", seed, trials);
    let alg = Algebra::new(cartan.clone()).with_max_height(8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rank = cartan.rank();
    for t in 0..trials {
        let mut x = HatElem::one();
        for _ in 0..rng.gen_range(2..=4) {
            let i = rng.gen_range(0..rank);
            let k = rng.gen_range(-1..=1);
            let g = alg.hat_gen(i, k)?.scale(&alg.cartan().qi_half_pow(i, 1));
            x = alg.hat_mul(&x, &g)?;
        }
        report.check(format!("integral product t={t}"), alg.is_integral_hat(&x)?, None);
    }
    for i in 0..rank {
        let iota_f = alg.iota(alg.uq_generator(i)?);
        let prod = alg.hat_mul(&alg.phi_m(&iota_f, 0)?, &alg.phi_m(&iota_f, 1)?)?;
        report.check(format!("counterexample i={i}"), !alg.is_integral_hat(&prod)?, None);
    }
    Ok(report)
}

/// Unitriangularity of the normalized standard elements over the global
/// basis.
pub fn suite_standard(
    cartan: &CartanDatum,
    rw: Option<Vec<usize>>,
    window: (i32, i32),
    max_sh: usize,
) -> Result<SuiteReport> {
    let mut report = SuiteReport::new("standard", 0, 0);
    let alg = Arc::new(Algebra::new(cartan.clone()).with_max_height((2 * max_sh).max(6)));
    let rw = match rw {
        Some(w) => ReducedWord::new(&alg, w)?,
        None => ReducedWord::lex_smallest(&alg)?,
    };
    let pbw = DualPbw::new(&alg, rw)?;
    let gb = GlobalBasis::new(Arc::new(GupTable::new(alg.clone(), pbw)));
    for c in gb.indices_in_window(window, max_sh)? {
        let m = gb.m_monomial(&c)?;
        let exp = gb.expand_in_g(&m)?;
        let diag = exp.get(&c).is_some_and(|x| x.is_one());
        report.check(format!("diag {c:?}"), diag, None);
        for (bp, coeff) in &exp {
            if bp != &c {
                let ok = coeff.is_integer_laurent_whole_powers()
                    && coeff.num().min_exp().is_none_or(|e| e > 0);
                report.check(format!("offdiag {c:?} -> {bp:?}"), ok, Some(format!("{coeff}")));
            }
        }
    }
    Ok(report)
}
