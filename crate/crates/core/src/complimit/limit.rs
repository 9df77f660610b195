//! Composition limits: sandwich bounds on `m(f^(k))`, explicit block
//! packings on compositions, and convergence tables.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::assemblage::minblocks;
use crate::boolfn::{Assignment, BoolFn};
use crate::complimit::charval::{charval, default_tol, CharVal};
use crate::error::{Error, Result};
use crate::hypergraph::{nu, nu_m, Multiplicity, PackingCert, PackingKind};
use crate::measures::{global, global_iterated, MeasureId};
use crate::rational::{q, q_to_f64, Surd, Q};

/// Largest composed arity evaluated exhaustively by the sandwich and limit
/// experiments.
pub const SANDWICH_LEAF_CAP: usize = 16;

/// Largest fold used when chaining packing lifts into implied bounds.
pub const LIFT_FOLD_CAP: u64 = 64;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SandwichReport {
    pub measure: MeasureId,
    pub k: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    pub charval: Surd,
    /// `m-hat^k / 2`.
    pub lower: f64,
    /// `2 n k m-hat^(k-1)`.
    pub upper: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.lower_holds && self.upper_holds
    }
}

fn leaves(n: usize, k: usize) -> Option<usize> {
    n.checked_pow(k as u32)
}

fn check_budget(f: &BoolFn, k: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    match leaves(f.arity(), k) {
        Some(l) if l <= SANDWICH_LEAF_CAP => Ok(l),
        _ => Err(Error::Budget(format!(
            "f^({k}) exceeds {SANDWICH_LEAF_CAP} inputs"
        ))),
    }
}

pub fn sandwich_check(f: &BoolFn, m: MeasureId, k: usize) -> Result<SandwichReport> {
    check_budget(f, k)?;
    let cv = charval(f, m, &default_tol())?;
    sandwich_check_with(f, &cv, k)
}

/// Sandwich check reusing an already computed characteristic value.
pub fn sandwich_check_with(f: &BoolFn, cv: &CharVal, k: usize) -> Result<SandwichReport> {
    check_budget(f, k)?;
    let (m0, m1) = global_iterated(f, k, cv.measure)?;
    let value = m0.max(m1);
    let n = f.arity() as i64;
    let lower = cv.exact.pow(k as u32).scale(&Q::new(1.into(), 2.into()));
    let upper = cv.exact.pow(k as u32 - 1).scale(&q(2 * n * k as i64));
    Ok(SandwichReport {
        measure: cv.measure,
        k,
        lower_holds: lower.cmp_q(&value).is_le(),
        upper_holds: upper.cmp_q(&value).is_ge(),
        lower: lower.to_f64(),
        upper: upper.to_f64(),
        value,
        charval: cv.exact.clone(),
    })
}

/// `(g1 o g2)(X)` evaluated from the two tables; leaf `(i, j)` is bit
/// `i * arity(g2) + j`.
pub fn eval_pair(g1: &BoolFn, g2: &BoolFn, x: u64) -> bool {
    let k = g2.arity();
    let mask = (1u64 << k) - 1;
    let mut y = 0u64;
    for i in 0..g1.arity() {
        if g2.at(x >> (i * k) & mask) {
            y |= 1 << i;
        }
    }
    g1.at(y)
}

/// A block packing of `g1 o g2` at an explicit input.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LiftedPacking {
    pub arity: usize,
    pub input: Assignment,
    /// Value of the composition at `input`.
    pub value: bool,
    /// The outer input and fold used by the construction.
    pub outer: Assignment,
    pub fold: u64,
    pub packing: PackingCert,
    pub size: u64,
}

fn expand(cert: &PackingCert) -> Vec<u64> {
    cert.multiplicities
        .iter()
        .flat_map(|(e, Multiplicity(m))| {
            std::iter::repeat_n(*e, m.to_integer().to_usize().expect("small multiplicity"))
        })
        .collect()
}

fn composed_arity(g1: &BoolFn, g2: &BoolFn) -> Result<usize> {
    if g1.is_constant() || g2.is_constant() {
        return Err(Error::ConstantFunction(
            "lifts need non-constant functions".into(),
        ));
    }
    let n = g1.arity() * g2.arity();
    if n > 64 {
        return Err(Error::Budget(format!("composition with {n} inputs")));
    }
    Ok(n)
}

/// `x o alpha`: leaf `(i, j)` gets `alpha^{x_i}_j`.
fn compose_input(x: &Assignment, alpha: [u64; 2], k: usize) -> u64 {
    (0..x.arity).fold(0u64, |acc, i| acc | alpha[x.get(i) as usize] << (i * k))
}

/// Check the sets are disjoint blocks of `g1 o g2` at `x`.
fn verify_packing(g1: &BoolFn, g2: &BoolFn, x: u64, blocks: &[u64]) -> Result<()> {
    let v = eval_pair(g1, g2, x);
    let mut used = 0u64;
    for &b in blocks {
        if b == 0 || b & used != 0 {
            return Err(Error::Certificate("lifted blocks overlap".into()));
        }
        used |= b;
        if eval_pair(g1, g2, x ^ b) == v {
            return Err(Error::Certificate(format!(
                "lifted set {b:#x} is not a block"
            )));
        }
    }
    Ok(())
}

fn finish_lift(
    g1: &BoolFn,
    g2: &BoolFn,
    x: u64,
    outer: Assignment,
    fold: u64,
    blocks: Vec<u64>,
) -> Result<LiftedPacking> {
    let n = composed_arity(g1, g2)?;
    verify_packing(g1, g2, x, &blocks)?;
    Ok(LiftedPacking {
        arity: n,
        input: Assignment { arity: n, bits: x },
        value: eval_pair(g1, g2, x),
        outer,
        fold,
        size: blocks.len() as u64,
        packing: PackingCert {
            kind: PackingKind::Integral,
            multiplicities: blocks
                .into_iter()
                .map(|b| (b, Multiplicity(q(1))))
                .collect(),
        },
    })
}

/// Disjoint block packing of `G = g1 o g2` at `X = x o alpha` of size
/// `bs^M_b(g1)`, `M = min(bs_0(g2), bs_1(g2))`.
///
/// `alpha` is a `g2`-optimal selector and `x` maximizes `bs^M` over
/// `g1^{-1}(b)`. Each outer block `B` of a maximum `M`-fold packing at `x`
/// becomes the union over `i` in `B` of one unused inner block at leaf
/// position `i`; no position is used more than `M` times, so inner blocks
/// never run out.
pub fn bs_lift_packing(g1: &BoolFn, g2: &BoolFn, b: bool) -> Result<LiftedPacking> {
    composed_arity(g1, g2)?;
    let k = g2.arity();
    let rep = global(g2, MeasureId::Bs)?;
    let alpha = [
        rep.argmax0
            .ok_or(Error::ConstantFunction("g2 never 0".into()))?,
        rep.argmax1
            .ok_or(Error::ConstantFunction("g2 never 1".into()))?,
    ];
    let inner: Vec<Vec<u64>> = alpha
        .iter()
        .map(|a| Ok(expand(&nu(&minblocks(g2, a)?.blocks)?.1)))
        .collect::<Result<_>>()?;
    let fold = inner[0].len().min(inner[1].len()) as u64;
    let n1 = g1.arity();
    let mut best: Option<(u64, Assignment, PackingCert)> = None;
    for xb in 0..1u64 << n1 {
        if g1.at(xb) != b {
            continue;
        }
        let x = Assignment {
            arity: n1,
            bits: xb,
        };
        let (v, cert) = nu_m(&minblocks(g1, &x)?.blocks, fold as u32)?;
        if best.as_ref().is_none_or(|(bv, ..)| v > *bv) {
            best = Some((v, x, cert));
        }
    }
    let (_, x, cert) = best.ok_or(Error::ConstantFunction("g1 never takes b".into()))?;
    let mut pools: Vec<Vec<u64>> = (0..n1).map(|i| inner[x.get(i) as usize].clone()).collect();
    let mut blocks = Vec::new();
    for outer in expand(&cert) {
        let mut lifted = 0u64;
        for (i, pool) in pools.iter_mut().enumerate() {
            if outer >> i & 1 == 1 {
                let bi = pool.pop().ok_or_else(|| {
                    Error::Certificate(format!("inner packing at position {i} exhausted"))
                })?;
                lifted |= bi << (i * k);
            }
        }
        blocks.push(lifted);
    }
    let xbits = compose_input(&x, [alpha[0].bits, alpha[1].bits], k);
    finish_lift(g1, g2, xbits, x, fold, blocks)
}

/// Packing of `f o f` with value `b` of size `bs(f)`: every block of a
/// maximum packing at the `bs`-optimal `alpha^c` is placed under one index
/// `i` whose flip from `c` changes `f` at an outer input `x` with
/// `f(x) = b`.
pub fn bs_lift_singleton(f: &BoolFn, b: bool) -> Result<LiftedPacking> {
    composed_arity(f, f)?;
    let n = f.arity();
    let rep = global(f, MeasureId::Bs)?;
    let c = rep.m1 > rep.m0;
    let alpha = [
        rep.argmax0
            .ok_or(Error::ConstantFunction("f never 0".into()))?,
        rep.argmax1
            .ok_or(Error::ConstantFunction("f never 1".into()))?,
    ];
    let (x, i) = (0..1u64 << n)
        .filter(|&x| f.at(x) == b)
        .flat_map(|x| (0..n).map(move |i| (x, i)))
        .find(|&(x, i)| (x >> i & 1 == 1) == c && f.at(x ^ 1 << i) != b)
        .ok_or_else(|| Error::Precondition {
            node: vec![],
            reason: "no index flips f away from b in the required direction".into(),
        })?;
    let outer = Assignment { arity: n, bits: x };
    let inner = expand(&nu(&minblocks(f, &alpha[c as usize])?.blocks)?.1);
    let blocks = inner.iter().map(|&bl| bl << (i * n)).collect();
    let xbits = compose_input(&outer, [alpha[0].bits, alpha[1].bits], n);
    finish_lift(f, f, xbits, outer, 1, blocks)
}

/// `bs^M_b(f)`: max over `x` in `f^{-1}(b)` of the `M`-fold packing number.
pub fn bs_fold(f: &BoolFn, fold: u64, b: bool) -> Result<u64> {
    if fold == 0 || fold > LIFT_FOLD_CAP {
        return Err(Error::Budget(format!(
            "fold {fold} outside 1..={LIFT_FOLD_CAP}"
        )));
    }
    let mut best = 0;
    for x in 0..1u64 << f.arity() {
        if f.at(x) == b {
            let a = Assignment {
                arity: f.arity(),
                bits: x,
            };
            best = best.max(nu_m(&minblocks(f, &a)?.blocks, fold as u32)?.0);
        }
    }
    Ok(best)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowSource {
    /// Exhaustive value of the composed function.
    Exact,
    /// Size of an explicit verified packing on the composition.
    Lifted,
    /// Lower bound chained through `bs_b(f^(k+1)) >= bs^M_b(f)` from the
    /// previous row's certified bounds.
    Implied,
    /// Over budget; no value.
    Budget,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitRow {
    pub k: usize,
    pub source: RowSource,
    /// Exact value or certified lower bound, per `source`.
    #[serde(with = "crate::rational::serde_q::option")]
    pub value: Option<Q>,
    /// Certified lower bounds on `bs_0` and `bs_1` (rows of the `bs` table).
    pub sides: Option<(u64, u64)>,
    /// `value^(1/k)`.
    pub root: Option<f64>,
    /// `[m-hat / 2^(1/k), (2nk)^(1/k) m-hat]`.
    pub envelope: (f64, f64),
    /// Whether `root` lies inside the envelope (exact rows only).
    pub within: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LimitTable {
    pub measure: MeasureId,
    /// The characteristic value the rows approach (`C*` for `bs`).
    pub limit: CharVal,
    pub rows: Vec<LimitRow>,
}

impl LimitTable {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.within != Some(false))
    }
}

/// Convergence table of `m(f^(k))^(1/k)` toward `m-hat(f)`, `k = 1..=kmax`.
///
/// For `s`, `C`, `C*` the rows are exact while `n^k` fits the budget. For
/// `bs` the limit is the `C*` value and rows carry certified lower bounds:
/// `k = 1` exact, `k = 2` from [`bs_lift_packing`], later rows implied by
/// chaining the lemma with the previous row's side bounds.
pub fn limit_convergence(f: &BoolFn, m: MeasureId, kmax: usize) -> Result<LimitTable> {
    if kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be at least 1".into()));
    }
    let target = if m == MeasureId::Bs {
        MeasureId::CStar
    } else {
        m
    };
    let limit = charval(f, target, &default_tol())?;
    let mh = limit.to_f64();
    let n = f.arity() as f64;
    let envelope = |k: usize| {
        let kf = k as f64;
        (mh / 2f64.powf(1.0 / kf), (2.0 * n * kf).powf(1.0 / kf) * mh)
    };
    let root = |v: &Q, k: usize| q_to_f64(v).powf(1.0 / k as f64);
    let mut rows = Vec::with_capacity(kmax);
    if m == MeasureId::Bs {
        let mut sides: Option<(u64, u64)> = None;
        for k in 1..=kmax {
            let (source, s) = match (k, sides) {
                (1, _) => {
                    let r = global(f, MeasureId::Bs)?;
                    let side = |v: &Q| v.to_integer().to_u64().expect("small");
                    (RowSource::Exact, Some((side(&r.m0), side(&r.m1))))
                }
                (2, _) if composed_arity(f, f).is_ok() => {
                    let a = bs_lift_packing(f, f, false)?.size;
                    let b = bs_lift_packing(f, f, true)?.size;
                    (RowSource::Lifted, Some((a, b)))
                }
                (_, Some((a, b))) if a.min(b) <= LIFT_FOLD_CAP => {
                    let fold = a.min(b);
                    (
                        RowSource::Implied,
                        Some((bs_fold(f, fold, false)?, bs_fold(f, fold, true)?)),
                    )
                }
                _ => (RowSource::Budget, None),
            };
            sides = s;
            let value = s.map(|(a, b)| q(a.max(b) as i64));
            rows.push(LimitRow {
                k,
                source,
                root: value.as_ref().map(|v| root(v, k)),
                value,
                sides: s,
                envelope: envelope(k),
                within: None,
            });
        }
    } else {
        for k in 1..=kmax {
            let row = match sandwich_check_with(f, &limit, k) {
                Ok(r) => {
                    let rt = root(&r.value, k);
                    LimitRow {
                        k,
                        source: RowSource::Exact,
                        value: Some(r.value.clone()),
                        sides: None,
                        root: Some(rt),
                        envelope: envelope(k),
                        within: Some(r.holds()),
                    }
                }
                Err(Error::Budget(_)) => LimitRow {
                    k,
                    source: RowSource::Budget,
                    value: None,
                    sides: None,
                    root: None,
                    envelope: envelope(k),
                    within: None,
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(LimitTable {
        measure: m,
        limit,
        rows,
    })
}

/// `m(f^(k))` within the sandwich budget.
pub fn iterated_value(f: &BoolFn, m: MeasureId, k: usize) -> Result<Q> {
    check_budget(f, k)?;
    let (a, b) = global_iterated(f, k, m)?;
    Ok(if a > b { a } else { b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::named_fn;
    use crate::tree::compose_pair;

    #[test]
    fn eval_pair_matches_table() {
        let g1 = named_fn("MAJ", Some(3)).unwrap();
        let g2 = named_fn("PARITY", Some(2)).unwrap();
        let t = compose_pair(&g1, &g2).unwrap();
        for x in 0..64 {
            assert_eq!(eval_pair(&g1, &g2, x), t.at(x));
        }
    }

    #[test]
    fn or_lift_is_trivial() {
        let g = named_fn("OR", Some(2)).unwrap();
        let p = bs_lift_packing(&g, &g, false).unwrap();
        assert_eq!(p.fold, 1);
        assert_eq!(p.size, 2);
    }

    #[test]
    fn parity_sensitivity_multiplies() {
        let f = named_fn("PARITY", Some(2)).unwrap();
        let t = limit_convergence(&f, MeasureId::S, 4).unwrap();
        for r in &t.rows {
            assert_eq!(r.value, Some(q(1 << r.k)));
        }
        assert!(t.holds());
    }
}
