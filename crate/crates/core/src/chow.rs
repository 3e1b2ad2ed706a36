//! Exact intersection theory on towers
//! (Grassmannian base → zero-locus cuts → relative flag bundles)
//! by Atiyah-Bott localization at torus fixed points.
//!
//! Cohomological degree is tracked by a formal variable: every fixed-point
//! contribution is a truncated power series with exact rational
//! coefficients, and only the coefficient matching the dimension of the
//! final stage survives. That makes the reported numbers independent of
//! the auxiliary framing characters handed to trivial summands (the
//! framing-independence self-check runs on every computation).

use crate::arith::{rat, Rat};
use crate::error::{Error, Result};
use crate::resolution::BundleExpr;
use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BaseSpace {
    Point,
    Grassmannian { k: u32, n: u32 },
}

impl BaseSpace {
    pub fn dim(&self) -> i64 {
        match self {
            BaseSpace::Point => 0,
            BaseSpace::Grassmannian { k, n } => (*k as i64) * ((*n - *k) as i64),
        }
    }
}

/// Relative flag bundle factor over a named bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberFlag {
    pub ambient: String,
    pub steps: Vec<u32>,
}

/// The ambient integration tower. `cuts` live on the base Grassmannian;
/// their generic zero locus is the stage X carrying the named bundles;
/// `fiber_flags` are relative flag bundles over named bundles; `top_cut`
/// (if present) cuts the final stage out of the flag bundle total space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietySpec {
    pub base: BaseSpace,
    pub named: Vec<(String, BundleExpr)>,
    pub cuts: Vec<BundleExpr>,
    pub fiber_flags: Vec<FiberFlag>,
    pub top_cut: Option<BundleExpr>,
}

/// Polynomial in Chern classes of bundle expressions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassExpr {
    Const(i64),
    Chern { degree: u32, bundle: BundleExpr },
    Sum(Vec<ClassExpr>),
    Prod(Vec<ClassExpr>),
    Pow(Box<ClassExpr>, u32),
}

impl ClassExpr {
    pub fn c1_pow(bundle: BundleExpr, power: u32) -> ClassExpr {
        ClassExpr::Pow(Box::new(ClassExpr::Chern { degree: 1, bundle }), power)
    }
}

/// Truncated power series in the degree variable, exact coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightPolynomial {
    pub coeffs: Vec<Rat>,
}

impl WeightPolynomial {
    fn zero(cap: usize) -> Self {
        WeightPolynomial {
            coeffs: vec![Rat::zero(); cap + 1],
        }
    }

    fn one(cap: usize) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = Rat::one();
        s
    }

    fn constant(c: Rat, cap: usize) -> Self {
        let mut s = Self::zero(cap);
        s.coeffs[0] = c;
        s
    }

    fn add_assign(&mut self, other: &WeightPolynomial) {
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b;
        }
    }

    fn scale(&mut self, c: &Rat) {
        for a in self.coeffs.iter_mut() {
            *a *= c;
        }
    }

    fn mul(&self, other: &WeightPolynomial) -> WeightPolynomial {
        let cap = self.coeffs.len() - 1;
        let mut out = WeightPolynomial::zero(cap);
        for i in 0..=cap {
            if self.coeffs[i].is_zero() {
                continue;
            }
            for j in 0..=cap - i {
                if other.coeffs[j].is_zero() {
                    continue;
                }
                let prod = &self.coeffs[i] * &other.coeffs[j];
                out.coeffs[i + j] += prod;
            }
        }
        out
    }

    /// Multiplicative inverse; the constant term must be nonzero.
    fn inverse(&self) -> WeightPolynomial {
        let cap = self.coeffs.len() - 1;
        let mut out = WeightPolynomial::zero(cap);
        let c0 = self.coeffs[0].clone();
        assert!(!c0.is_zero(), "series with zero constant term");
        out.coeffs[0] = Rat::one() / c0.clone();
        for m in 1..=cap {
            let mut acc = Rat::zero();
            for j in 1..=m {
                acc += &self.coeffs[j] * &out.coeffs[m - j];
            }
            out.coeffs[m] = -acc / c0.clone();
        }
        out
    }

    /// exp(w z) truncated.
    fn exp_weight(w: i64, cap: usize) -> WeightPolynomial {
        let mut s = WeightPolynomial::zero(cap);
        let mut term = Rat::one();
        s.coeffs[0] = Rat::one();
        for j in 1..=cap {
            term = term * rat(w) / rat(j as i64);
            s.coeffs[j] = term.clone();
        }
        s
    }

    fn pow(&self, e: u32) -> WeightPolynomial {
        let cap = self.coeffs.len() - 1;
        let mut out = WeightPolynomial::one(cap);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }
}

/// Bernoulli numbers B_0.. (B_1 = -1/2 convention), exact.
fn bernoulli(upto: usize) -> Vec<Rat> {
    let mut b: Vec<Rat> = Vec::with_capacity(upto + 1);
    for m in 0..=upto {
        if m == 0 {
            b.push(Rat::one());
            continue;
        }
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        let mut acc = Rat::zero();
        for (j, bj) in b.iter().enumerate().take(m) {
            acc += Rat::from_integer(binom_big(m as u64 + 1, j as u64)) * bj;
        }
        let div = Rat::from_integer(BigInt::from(m as i64 + 1));
        b.push(-acc / div);
    }
    b
}

fn binom_big(n: u64, k: u64) -> BigInt {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// Todd factor w z / (1 - e^{-w z}) truncated.
fn todd_weight(w: i64, cap: usize, bern: &[Rat]) -> WeightPolynomial {
    let mut s = WeightPolynomial::zero(cap);
    let mut wpow = Rat::one();
    let mut fact = Rat::one();
    for j in 0..=cap {
        if j > 0 {
            wpow = wpow * rat(w);
            fact = fact * rat(j as i64);
        }
        // x/(1-e^{-x}) = sum B_j^+ x^j / j!, where B_1^+ = +1/2
        let bj = if j == 1 {
            Rat::new(BigInt::one(), BigInt::from(2))
        } else {
            bern[j].clone()
        };
        s.coeffs[j] = bj * &wpow / &fact;
    }
    s
}

fn elementary_symmetric(ws: &[i64], degree: usize) -> Rat {
    let mut e: Vec<Rat> = vec![Rat::zero(); degree + 1];
    e[0] = Rat::one();
    for &w in ws {
        for d in (1..=degree).rev() {
            let add = e[d - 1].clone() * rat(w);
            e[d] += add;
        }
    }
    e[degree].clone()
}

/// Structural dimension data of the tower.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerDims {
    pub base_dim: i64,
    pub cut_ranks: i64,
    pub flag_dim: i64,
    pub top_cut_rank: i64,
    pub z_dim: i64,
}

/// Rank of a bundle expression in the context of a tower.
pub fn bundle_rank(spec: &VarietySpec, expr: &BundleExpr) -> Result<u32> {
    named_rank(spec, expr)
}

fn named_rank(spec: &VarietySpec, expr: &BundleExpr) -> Result<u32> {
    Ok(match expr {
        BundleExpr::Trivial(r) => *r,
        BundleExpr::BaseU => match spec.base {
            BaseSpace::Grassmannian { k, .. } => k,
            BaseSpace::Point => return Err(Error::RankError),
        },
        BundleExpr::BaseQ => match spec.base {
            BaseSpace::Grassmannian { k, n } => n - k,
            BaseSpace::Point => return Err(Error::RankError),
        },
        BundleExpr::BaseO(_) => 1,
        BundleExpr::Ambient(name) => {
            let def = spec
                .named
                .iter()
                .find(|(n, _)| n == name)
                .ok_or_else(|| Error::UnsupportedCase(format!("unknown bundle {name}")))?;
            named_rank(spec, &def.1)?
        }
        BundleExpr::Dual(a) => named_rank(spec, a)?,
        BundleExpr::Sum(items) => {
            let mut t = 0;
            for a in items {
                t += named_rank(spec, a)?;
            }
            t
        }
        BundleExpr::Tensor(a, b) => named_rank(spec, a)? * named_rank(spec, b)?,
        BundleExpr::Wedge2(a) => {
            let r = named_rank(spec, a)?;
            r * r.saturating_sub(1) / 2
        }
        BundleExpr::Sym2(a) => {
            let r = named_rank(spec, a)?;
            r * (r + 1) / 2
        }
        BundleExpr::Det(_) => 1,
        BundleExpr::Taut { factor, step } => {
            let f = spec
                .fiber_flags
                .get(*factor)
                .ok_or_else(|| Error::UnsupportedCase("flag factor out of range".into()))?;
            f.steps[*step - 1]
        }
        BundleExpr::Quot { factor, lo, hi } => {
            let f = spec
                .fiber_flags
                .get(*factor)
                .ok_or_else(|| Error::UnsupportedCase("flag factor out of range".into()))?
                .clone();
            let dim = |idx: usize| -> Result<u32> {
                Ok(if idx == 0 {
                    0
                } else if idx <= f.steps.len() {
                    f.steps[idx - 1]
                } else {
                    named_rank(spec, &BundleExpr::Ambient(f.ambient.clone()))?
                })
            };
            dim(*hi)? - dim(*lo)?
        }
    })
}

pub fn tower_dims(spec: &VarietySpec) -> Result<TowerDims> {
    let base_dim = spec.base.dim();
    let mut cut_ranks = 0i64;
    for c in &spec.cuts {
        cut_ranks += named_rank(spec, c)? as i64;
    }
    let mut flag_dim = 0i64;
    for f in &spec.fiber_flags {
        let amb = named_rank(spec, &BundleExpr::Ambient(f.ambient.clone()))? as i64;
        let mut dims: Vec<i64> = std::iter::once(0)
            .chain(f.steps.iter().map(|&s| s as i64))
            .collect();
        dims.push(amb);
        for j in 1..dims.len() - 1 {
            flag_dim += dims[j] * (dims[j + 1] - dims[j]);
        }
    }
    let top_cut_rank = match &spec.top_cut {
        Some(c) => named_rank(spec, c)? as i64,
        None => 0,
    };
    let z_dim = base_dim - cut_ranks + flag_dim - top_cut_rank;
    if z_dim < 0 {
        return Err(Error::ExpectedDimensionNegative);
    }
    Ok(TowerDims {
        base_dim,
        cut_ranks,
        flag_dim,
        top_cut_rank,
        z_dim,
    })
}

/// Distinct random integer characters: torus weights for the base plus
/// framing characters for trivial summands.
struct CharPool {
    base: Vec<i64>,
    framing: Vec<i64>,
}

impl CharPool {
    fn new(n_base: usize, n_framing: usize, seed: u64) -> CharPool {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut seen = std::collections::BTreeSet::new();
        let mut fresh = |rng: &mut ChaCha8Rng| -> i64 {
            loop {
                let v = rng.gen_range(-20_000i64..=20_000);
                if v != 0 && seen.insert(v) {
                    return v;
                }
            }
        };
        let base = (0..n_base).map(|_| fresh(&mut rng)).collect();
        let framing = (0..n_framing).map(|_| fresh(&mut rng)).collect();
        CharPool { base, framing }
    }
}

fn count_trivial_leaves(expr: &BundleExpr) -> usize {
    match expr {
        BundleExpr::Trivial(r) => *r as usize,
        BundleExpr::Dual(a) | BundleExpr::Wedge2(a) | BundleExpr::Sym2(a) | BundleExpr::Det(a) => {
            count_trivial_leaves(a)
        }
        BundleExpr::Sum(items) => items.iter().map(count_trivial_leaves).sum(),
        BundleExpr::Tensor(a, b) => count_trivial_leaves(a) + count_trivial_leaves(b),
        _ => 0,
    }
}

/// Weights of the named bundles at one base fixed point. Trivial leaves
/// consume framing characters in declaration order, so a name resolves to
/// the same weight list wherever it is referenced.
struct BaseEnv {
    named: BTreeMap<String, Vec<i64>>,
    t: Vec<i64>,
    base_set: Vec<usize>,
}

fn base_leaf_weights(
    expr: &BundleExpr,
    env: &BaseEnv,
    framing: &[i64],
    cursor: &mut usize,
) -> Result<Vec<i64>> {
    Ok(match expr {
        BundleExpr::Trivial(r) => {
            let out = framing[*cursor..*cursor + *r as usize].to_vec();
            *cursor += *r as usize;
            out
        }
        BundleExpr::BaseU => env.base_set.iter().map(|&i| env.t[i]).collect(),
        BundleExpr::BaseQ => (0..env.t.len())
            .filter(|i| !env.base_set.contains(i))
            .map(|i| env.t[i])
            .collect(),
        BundleExpr::BaseO(m) => {
            let s: i64 = env.base_set.iter().map(|&i| env.t[i]).sum();
            vec![-(*m as i64) * s]
        }
        BundleExpr::Ambient(name) => env
            .named
            .get(name)
            .ok_or_else(|| Error::UnsupportedCase(format!("unknown bundle {name}")))?
            .clone(),
        BundleExpr::Dual(a) => base_leaf_weights(a, env, framing, cursor)?
            .into_iter()
            .map(|w| -w)
            .collect(),
        BundleExpr::Sum(items) => {
            let mut out = Vec::new();
            for a in items {
                out.extend(base_leaf_weights(a, env, framing, cursor)?);
            }
            out
        }
        BundleExpr::Tensor(a, b) => {
            let wa = base_leaf_weights(a, env, framing, cursor)?;
            let wb = base_leaf_weights(b, env, framing, cursor)?;
            let mut out = Vec::with_capacity(wa.len() * wb.len());
            for &x in &wa {
                for &y in &wb {
                    out.push(x + y);
                }
            }
            out
        }
        BundleExpr::Wedge2(a) => {
            let w = base_leaf_weights(a, env, framing, cursor)?;
            let mut out = Vec::new();
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    out.push(w[i] + w[j]);
                }
            }
            out
        }
        BundleExpr::Sym2(a) => {
            let w = base_leaf_weights(a, env, framing, cursor)?;
            let mut out = Vec::new();
            for i in 0..w.len() {
                for j in i..w.len() {
                    out.push(w[i] + w[j]);
                }
            }
            out
        }
        BundleExpr::Det(a) => {
            let w = base_leaf_weights(a, env, framing, cursor)?;
            vec![w.iter().sum()]
        }
        BundleExpr::Taut { .. } | BundleExpr::Quot { .. } => {
            return Err(Error::UnsupportedCase(
                "flag tautologicals cannot appear inside base bundle definitions".into(),
            ))
        }
    })
}

/// Fixed point of the full tower: a base choice plus nested index subsets
/// per fiber-flag factor.
#[derive(Clone, Debug)]
pub struct FixedPoint {
    pub base_set: Vec<usize>,
    pub flag_choices: Vec<Vec<Vec<usize>>>,
}

pub struct FpCtx<'a> {
    env: &'a BaseEnv,
    flag_ambient_weights: &'a [Vec<i64>],
    fp: &'a FixedPoint,
}

/// Chern-root weights of a bundle expression at a fixed point.
pub fn weights_at(expr: &BundleExpr, ctx: &FpCtx) -> Result<Vec<i64>> {
    Ok(match expr {
        BundleExpr::Taut { factor, step } => ctx.fp.flag_choices[*factor][*step - 1]
            .iter()
            .map(|&i| ctx.flag_ambient_weights[*factor][i])
            .collect(),
        BundleExpr::Quot { factor, lo, hi } => {
            let choices = &ctx.fp.flag_choices[*factor];
            let all: Vec<usize> = (0..ctx.flag_ambient_weights[*factor].len()).collect();
            let set = |idx: usize| -> Vec<usize> {
                if idx == 0 {
                    Vec::new()
                } else if idx <= choices.len() {
                    choices[idx - 1].clone()
                } else {
                    all.clone()
                }
            };
            let hi_set = set(*hi);
            let lo_set = set(*lo);
            hi_set
                .into_iter()
                .filter(|i| !lo_set.contains(i))
                .map(|i| ctx.flag_ambient_weights[*factor][i])
                .collect()
        }
        BundleExpr::Ambient(name) => ctx
            .env
            .named
            .get(name)
            .ok_or_else(|| Error::UnsupportedCase(format!("unknown bundle {name}")))?
            .clone(),
        BundleExpr::BaseU => ctx.env.base_set.iter().map(|&i| ctx.env.t[i]).collect(),
        BundleExpr::BaseQ => (0..ctx.env.t.len())
            .filter(|i| !ctx.env.base_set.contains(i))
            .map(|i| ctx.env.t[i])
            .collect(),
        BundleExpr::BaseO(m) => {
            let s: i64 = ctx.env.base_set.iter().map(|&i| ctx.env.t[i]).sum();
            vec![-(*m as i64) * s]
        }
        BundleExpr::Trivial(_) => {
            return Err(Error::UnsupportedCase(
                "anonymous trivial bundles must sit inside a named definition".into(),
            ))
        }
        BundleExpr::Dual(a) => weights_at(a, ctx)?.into_iter().map(|w| -w).collect(),
        BundleExpr::Sum(items) => {
            let mut out = Vec::new();
            for a in items {
                out.extend(weights_at(a, ctx)?);
            }
            out
        }
        BundleExpr::Tensor(a, b) => {
            let wa = weights_at(a, ctx)?;
            let wb = weights_at(b, ctx)?;
            let mut out = Vec::with_capacity(wa.len() * wb.len());
            for &x in &wa {
                for &y in &wb {
                    out.push(x + y);
                }
            }
            out
        }
        BundleExpr::Wedge2(a) => {
            let w = weights_at(a, ctx)?;
            let mut out = Vec::new();
            for i in 0..w.len() {
                for j in i + 1..w.len() {
                    out.push(w[i] + w[j]);
                }
            }
            out
        }
        BundleExpr::Sym2(a) => {
            let w = weights_at(a, ctx)?;
            let mut out = Vec::new();
            for i in 0..w.len() {
                for j in i..w.len() {
                    out.push(w[i] + w[j]);
                }
            }
            out
        }
        BundleExpr::Det(a) => vec![weights_at(a, ctx)?.iter().sum()],
    })
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Nested index chains with the given subset sizes.
fn flag_chains(amb: usize, steps: &[u32]) -> Vec<Vec<Vec<usize>>> {
    let mut chains: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    let mut prev_size = 0usize;
    for &s in steps {
        let grow = s as usize - prev_size;
        let mut next = Vec::new();
        for chain in &chains {
            let base: &[usize] = chain.last().map(|v| v.as_slice()).unwrap_or(&[]);
            let avail: Vec<usize> = (0..amb).filter(|i| !base.contains(i)).collect();
            for add in combinations(avail.len(), grow) {
                let mut set = base.to_vec();
                set.extend(add.iter().map(|&j| avail[j]));
                set.sort_unstable();
                let mut c = chain.clone();
                c.push(set);
                next.push(c);
            }
        }
        chains = next;
        prev_size = s as usize;
    }
    chains
}

fn class_series(expr: &ClassExpr, ctx: &FpCtx, cap: usize) -> Result<WeightPolynomial> {
    Ok(match expr {
        ClassExpr::Const(c) => WeightPolynomial::constant(rat(*c), cap),
        ClassExpr::Chern { degree, bundle } => {
            let ws = weights_at(bundle, ctx)?;
            let mut s = WeightPolynomial::zero(cap);
            if (*degree as usize) <= cap && (*degree as usize) <= ws.len() {
                s.coeffs[*degree as usize] = elementary_symmetric(&ws, *degree as usize);
            }
            s
        }
        ClassExpr::Sum(items) => {
            let mut s = WeightPolynomial::zero(cap);
            for a in items {
                s.add_assign(&class_series(a, ctx, cap)?);
            }
            s
        }
        ClassExpr::Prod(items) => {
            let mut s = WeightPolynomial::one(cap);
            for a in items {
                s = s.mul(&class_series(a, ctx, cap)?);
            }
            s
        }
        ClassExpr::Pow(a, e) => class_series(a, ctx, cap)?.pow(*e),
    })
}

/// What sits in the numerator at each fixed point.
enum Integrand<'b> {
    /// plain cohomology class
    Class(&'b ClassExpr),
    /// ch(F)·td(T)/td(cuts): Riemann-Roch with Koszul folding
    ChTd(&'b BundleExpr),
    /// ch(Λ^p Ω_Z)·td(T)/td(cuts), Ω_Z via the conormal sequence
    ChLambdaOmegaTd(u32),
}

fn newton_lambda(ch_psi: &[WeightPolynomial], p: usize, cap: usize) -> WeightPolynomial {
    // ch(Λ^m) = (1/m) Σ_{i=1..m} (-1)^{i-1} ch(Λ^{m-i}) ch(ψ^i)
    let mut lambda: Vec<WeightPolynomial> = vec![WeightPolynomial::one(cap)];
    for m in 1..=p {
        let mut acc = WeightPolynomial::zero(cap);
        for i in 1..=m {
            let mut term = lambda[m - i].mul(&ch_psi[i]);
            if i % 2 == 0 {
                term.scale(&rat(-1));
            }
            acc.add_assign(&term);
        }
        acc.scale(&Rat::new(BigInt::one(), BigInt::from(m as i64)));
        lambda.push(acc);
    }
    lambda[p].clone()
}

fn localize(spec: &VarietySpec, integrand: &Integrand, seed: u64) -> Result<Rat> {
    let dims = tower_dims(spec)?;
    let cap = dims.z_dim as usize;
    // two independent framing/torus assignments must agree
    let v1 = localize_once(spec, &dims, cap, integrand, seed)?;
    let v2 = localize_once(
        spec,
        &dims,
        cap,
        integrand,
        seed.wrapping_add(0x9e3779b97f4a7c15),
    )?;
    if v1 != v2 {
        return Err(Error::WeightCollision);
    }
    Ok(v1)
}

fn localize_once(
    spec: &VarietySpec,
    dims: &TowerDims,
    cap: usize,
    integrand: &Integrand,
    seed: u64,
) -> Result<Rat> {
    for attempt in 0..5u64 {
        match try_localize(spec, dims, cap, integrand, seed.wrapping_add(attempt * 7919)) {
            Err(Error::WeightCollision) => continue,
            other => return other,
        }
    }
    Err(Error::WeightCollision)
}

fn try_localize(
    spec: &VarietySpec,
    dims: &TowerDims,
    cap: usize,
    integrand: &Integrand,
    seed: u64,
) -> Result<Rat> {
    let (k, n) = match spec.base {
        BaseSpace::Grassmannian { k, n } => (k as usize, n as usize),
        BaseSpace::Point => (0, 0),
    };
    let n_framing: usize = spec
        .named
        .iter()
        .map(|(_, e)| count_trivial_leaves(e))
        .sum::<usize>()
        + spec.cuts.iter().map(count_trivial_leaves).sum::<usize>()
        + spec.top_cut.as_ref().map(count_trivial_leaves).unwrap_or(0);
    let pool = CharPool::new(n, n_framing, seed);
    let bern = bernoulli(cap.max(2));
    let base_choices = if n == 0 {
        vec![Vec::new()]
    } else {
        combinations(n, k)
    };
    let per_factor: Vec<Vec<Vec<Vec<usize>>>> = spec
        .fiber_flags
        .iter()
        .map(|f| {
            let amb = named_rank(spec, &BundleExpr::Ambient(f.ambient.clone()))
                .map(|r| r as usize)
                .unwrap_or(0);
            flag_chains(amb, &f.steps)
        })
        .collect();

    let per_factor = &per_factor;
    let contributions: Result<Vec<Rat>> = base_choices
        .par_iter()
        .map(|base_set| -> Result<Rat> {
            let mut env = BaseEnv {
                named: BTreeMap::new(),
                t: pool.base.clone(),
                base_set: base_set.clone(),
            };
            let mut cursor = 0usize;
            for (name, def) in &spec.named {
                let w = base_leaf_weights(def, &env, &pool.framing, &mut cursor)?;
                env.named.insert(name.clone(), w);
            }
            let mut cut_weights: Vec<i64> = Vec::new();
            for c in &spec.cuts {
                cut_weights.extend(base_leaf_weights(c, &env, &pool.framing, &mut cursor)?);
            }
            let mut flag_ambient = Vec::new();
            for f in &spec.fiber_flags {
                let w = env
                    .named
                    .get(&f.ambient)
                    .ok_or_else(|| {
                        Error::UnsupportedCase(format!("unknown bundle {}", f.ambient))
                    })?
                    .clone();
                let mut sorted = w.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != w.len() {
                    // repeated weights would leave non-isolated fixed points
                    return Err(Error::WeightCollision);
                }
                flag_ambient.push(w);
            }
            let mut base_tangent = Vec::new();
            for &i in base_set {
                for j in 0..n {
                    if !base_set.contains(&j) {
                        let w = pool.base[j] - pool.base[i];
                        if w == 0 {
                            return Err(Error::WeightCollision);
                        }
                        base_tangent.push(w);
                    }
                }
            }

            let mut total = Rat::zero();
            let mut idx = vec![0usize; per_factor.len()];
            loop {
                let fp = FixedPoint {
                    base_set: base_set.clone(),
                    flag_choices: idx
                        .iter()
                        .enumerate()
                        .map(|(fi, &c)| per_factor[fi][c].clone())
                        .collect(),
                };
                total += fixed_point_contribution(
                    spec,
                    dims,
                    &env,
                    &flag_ambient,
                    &fp,
                    &base_tangent,
                    &cut_weights,
                    integrand,
                    &bern,
                    cap,
                )?;
                let mut carry = true;
                for (fi, c) in idx.iter_mut().enumerate() {
                    if !carry {
                        break;
                    }
                    *c += 1;
                    if *c == per_factor[fi].len() {
                        *c = 0;
                    } else {
                        carry = false;
                    }
                }
                if carry || per_factor.is_empty() {
                    break;
                }
            }
            Ok(total)
        })
        .collect();
    let mut sum = Rat::zero();
    for c in contributions? {
        sum += c;
    }
    Ok(sum)
}

#[allow(clippy::too_many_arguments)]
fn fixed_point_contribution(
    spec: &VarietySpec,
    dims: &TowerDims,
    env: &BaseEnv,
    flag_ambient: &[Vec<i64>],
    fp: &FixedPoint,
    base_tangent: &[i64],
    cut_weights: &[i64],
    integrand: &Integrand,
    bern: &[Rat],
    cap: usize,
) -> Result<Rat> {
    let ctx = FpCtx {
        env,
        flag_ambient_weights: flag_ambient,
        fp,
    };
    // tower tangent: base directions plus relative flag directions
    let mut tangent: Vec<i64> = base_tangent.to_vec();
    for (fi, _f) in spec.fiber_flags.iter().enumerate() {
        let choices = &fp.flag_choices[fi];
        let amb = &flag_ambient[fi];
        let mut level = vec![choices.len(); amb.len()];
        for (j, set) in choices.iter().enumerate().rev() {
            for &i in set {
                level[i] = j;
            }
        }
        for a in 0..amb.len() {
            for b in 0..amb.len() {
                if level[a] < level[b] {
                    let w = amb[b] - amb[a];
                    if w == 0 {
                        return Err(Error::WeightCollision);
                    }
                    tangent.push(w);
                }
            }
        }
    }
    let mut all_cut_weights: Vec<i64> = cut_weights.to_vec();
    if let Some(tc) = &spec.top_cut {
        all_cut_weights.extend(weights_at(tc, &ctx)?);
    }

    let numerator = match integrand {
        Integrand::Class(cl) => class_series(cl, &ctx, cap)?,
        Integrand::ChTd(f) => {
            let chf = ch_series(&weights_at(f, &ctx)?, cap);
            chf.mul(&td_ratio(&tangent, &all_cut_weights, bern, cap))
        }
        Integrand::ChLambdaOmegaTd(pp) => {
            let mut ch_psi: Vec<WeightPolynomial> = Vec::with_capacity(*pp as usize + 1);
            for i in 0..=*pp as usize {
                let mut s = WeightPolynomial::zero(cap);
                if i == 0 {
                    s.coeffs[0] = rat(dims.z_dim);
                } else {
                    for &w in &tangent {
                        s.add_assign(&WeightPolynomial::exp_weight(-(i as i64) * w, cap));
                    }
                    for &w in &all_cut_weights {
                        let mut e = WeightPolynomial::exp_weight(-(i as i64) * w, cap);
                        e.scale(&rat(-1));
                        s.add_assign(&e);
                    }
                }
                ch_psi.push(s);
            }
            let lam = newton_lambda(&ch_psi, *pp as usize, cap);
            lam.mul(&td_ratio(&tangent, &all_cut_weights, bern, cap))
        }
    };
    let coeff = numerator.coeffs[cap].clone();
    if coeff.is_zero() {
        return Ok(Rat::zero());
    }
    let mut factor = Rat::one();
    for &w in &all_cut_weights {
        factor = factor * rat(w);
    }
    for &w in &tangent {
        factor = factor / rat(w);
    }
    Ok(coeff * factor)
}

fn ch_series(ws: &[i64], cap: usize) -> WeightPolynomial {
    let mut s = WeightPolynomial::zero(cap);
    for &w in ws {
        s.add_assign(&WeightPolynomial::exp_weight(w, cap));
    }
    s
}

fn td_ratio(tangent: &[i64], cuts: &[i64], bern: &[Rat], cap: usize) -> WeightPolynomial {
    let mut s = WeightPolynomial::one(cap);
    for &w in tangent {
        s = s.mul(&todd_weight(w, cap, bern));
    }
    for &w in cuts {
        s = s.mul(&todd_weight(w, cap, bern).inverse());
    }
    s
}

/// Intersection number of a Chern-class polynomial against the final
/// stage of the tower; wrong-degree integrands give 0.
pub fn integrate(class: &ClassExpr, spec: &VarietySpec, seed: u64) -> Result<Rat> {
    localize(spec, &Integrand::Class(class), seed)
}

fn expect_integer(v: Rat, what: &str) -> Result<BigInt> {
    if v.denom() == &BigInt::one() {
        Ok(v.numer().clone())
    } else {
        Err(Error::NonIntegerResult(format!("{what} = {v}")))
    }
}

/// Euler characteristic of a bundle restricted to the final stage.
pub fn chi_sheaf(f: &BundleExpr, spec: &VarietySpec, seed: u64) -> Result<BigInt> {
    let v = localize(spec, &Integrand::ChTd(f), seed)?;
    expect_integer(v, "chi")
}

/// χ(Λ^p Ω) of the final stage.
pub fn chi_omega_p(p: u32, spec: &VarietySpec, seed: u64) -> Result<BigInt> {
    let dims = tower_dims(spec)?;
    if (p as i64) > dims.z_dim {
        return Err(Error::DegreeMismatch);
    }
    let v = localize(spec, &Integrand::ChLambdaOmegaTd(p), seed)?;
    expect_integer(v, "chi_omega")
}

/// Top self-intersection of a line bundle on the final stage.
pub fn top_self_intersection(l: &BundleExpr, spec: &VarietySpec, seed: u64) -> Result<BigInt> {
    if named_rank(spec, l)? != 1 {
        return Err(Error::RankError);
    }
    let dims = tower_dims(spec)?;
    let v = integrate(&ClassExpr::c1_pow(l.clone(), dims.z_dim as u32), spec, seed)?;
    expect_integer(v, "top self-intersection")
}

/// Number of torus fixed points of the tower.
pub fn fixed_point_count(spec: &VarietySpec) -> Result<u64> {
    fn binom(n: u64, k: u64) -> u64 {
        let mut r = 1u64;
        for i in 0..k.min(n - k) {
            r = r * (n - i) / (i + 1);
        }
        r
    }
    let mut count = match spec.base {
        BaseSpace::Point => 1,
        BaseSpace::Grassmannian { k, n } => binom(n as u64, k as u64),
    };
    for f in &spec.fiber_flags {
        let amb = named_rank(spec, &BundleExpr::Ambient(f.ambient.clone()))? as u64;
        let mut prev = 0u64;
        for &s in &f.steps {
            count *= binom(amb - prev, s as u64 - prev);
            prev = s as u64;
        }
    }
    Ok(count)
}
