//! Local and global complexity measures.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::assemblage::{minblocks, sensitive_set, SensSet};
use crate::boolfn::{low_mask, Assignment, BoolFn};
use crate::error::{Error, Result};
use crate::hypergraph::{self, CoverCert, Hypergraph, PackingCert};
use crate::rational::{q, Q};
use crate::tree::{bottom_up, compose_pair, Ensemble};
use crate::weight::WeightFn;

/// Largest `M` accepted for `bs^M`.
pub const MAX_FOLD: u32 = 16;

/// Above this arity global reports need an explicit sample plan.
pub const EXHAUSTIVE_ARITY_CAP: usize = 20;

/// `e^-1` to 30 significant digits.
pub const E_INV_DIGITS: &str = "0.367879441171442321595523770161";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum MeasureId {
    S,
    Bs,
    BsM(u32),
    BsStar,
    C,
    CStar,
}

impl fmt::Display for MeasureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeasureId::S => write!(f, "s"),
            MeasureId::Bs => write!(f, "bs"),
            MeasureId::BsM(m) => write!(f, "bs^{m}"),
            MeasureId::BsStar => write!(f, "bs*"),
            MeasureId::C => write!(f, "C"),
            MeasureId::CStar => write!(f, "C*"),
        }
    }
}

impl FromStr for MeasureId {
    type Err = Error;

    /// Accepts `s`, `bs`, `bsM:<M>` (or `bs^<M>`), `bsstar` (or `bs*`), `C`,
    /// `Cstar` (or `C*`), case-insensitively.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let fold = lower
            .strip_prefix("bsm:")
            .or_else(|| lower.strip_prefix("bs^"));
        if let Some(m) = fold {
            let m: u32 = m
                .parse()
                .map_err(|_| Error::Parse(format!("bad fold count in `{s}`")))?;
            if m == 0 || m > MAX_FOLD {
                return Err(Error::InvalidParameter(format!(
                    "M must lie in 1..={MAX_FOLD}"
                )));
            }
            return Ok(MeasureId::BsM(m));
        }
        match lower.as_str() {
            "s" => Ok(MeasureId::S),
            "bs" => Ok(MeasureId::Bs),
            "bsstar" | "bs*" => Ok(MeasureId::BsStar),
            "c" => Ok(MeasureId::C),
            "cstar" | "c*" => Ok(MeasureId::CStar),
            _ => Err(Error::Parse(format!("unknown measure `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    Sensitivity(SensSet),
    Packing(PackingCert),
    Cover(CoverCert),
}

/// `m_x(f)` with a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalMeasureValue {
    pub measure: MeasureId,
    pub input: Assignment,
    #[serde(with = "crate::rational::serde_q")]
    pub value: Q,
    pub certificate: Certificate,
}

impl LocalMeasureValue {
    /// Recheck the certificate against a fresh min-block enumeration. A
    /// certificate only shows one side of the optimum; optimality of
    /// fractional values is confirmed by re-solving the program.
    pub fn validate(&self, f: &BoolFn) -> Result<()> {
        let blocks = minblocks(f, &self.input)?.blocks;
        let v = match &self.certificate {
            Certificate::Sensitivity(s) => {
                let fresh = sensitive_set(f, &self.input)?;
                if fresh != *s {
                    return Err(Error::Certificate("sensitive set differs".into()));
                }
                q(s.size() as i64)
            }
            Certificate::Packing(p) => p.validate(&blocks)?,
            Certificate::Cover(c) => c.validate(&blocks)?,
        };
        if v != self.value {
            return Err(Error::Certificate(format!(
                "certificate weight {v} differs from value {}",
                self.value
            )));
        }
        Ok(())
    }
}

fn check_measure(m: MeasureId) -> Result<()> {
    if let MeasureId::BsM(k) = m {
        if k == 0 || k > MAX_FOLD {
            return Err(Error::InvalidParameter(format!(
                "M must lie in 1..={MAX_FOLD}"
            )));
        }
    }
    Ok(())
}

/// Measure `m` of the min-block hypergraph `h` (everything but `s`).
pub fn hypergraph_measure(h: &Hypergraph, m: MeasureId) -> Result<(Q, Certificate)> {
    Ok(match m {
        MeasureId::S => {
            return Err(Error::InvalidParameter(
                "sensitivity needs the function, not only its blocks".into(),
            ))
        }
        MeasureId::Bs => {
            let (v, c) = hypergraph::nu(h)?;
            (q(v as i64), Certificate::Packing(c))
        }
        MeasureId::BsM(k) => {
            let (v, c) = hypergraph::nu_m(h, k)?;
            (q(v as i64), Certificate::Packing(c))
        }
        MeasureId::BsStar => {
            let (v, c) = hypergraph::nu_star(h)?;
            (v, Certificate::Packing(c))
        }
        MeasureId::C => {
            let (v, c) = hypergraph::tau(h)?;
            (q(v as i64), Certificate::Cover(c))
        }
        MeasureId::CStar => {
            let (v, c) = hypergraph::tau_star(h)?;
            (v, Certificate::Cover(c))
        }
    })
}

/// `m_x(f)`.
pub fn local(f: &BoolFn, x: &Assignment, m: MeasureId) -> Result<LocalMeasureValue> {
    check_measure(m)?;
    let (value, certificate) = if m == MeasureId::S {
        let s = sensitive_set(f, x)?;
        (q(s.size() as i64), Certificate::Sensitivity(s))
    } else {
        hypergraph_measure(&minblocks(f, x)?.blocks, m)?
    };
    Ok(LocalMeasureValue {
        measure: m,
        input: *x,
        value,
        certificate,
    })
}

/// Which inputs a global report examines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InputPlan {
    Exhaustive,
    /// `count` inputs drawn uniformly with a ChaCha8 generator seeded by
    /// `seed`; the report is then a lower bound.
    Sampled {
        seed: u64,
        count: u64,
    },
}

/// `m0`, `m1`, `m` with smallest-index maximizers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GlobalMeasureReport {
    pub function: String,
    pub measure: MeasureId,
    #[serde(with = "crate::rational::serde_q")]
    pub m0: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub m1: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub m: Q,
    pub argmax0: Option<Assignment>,
    pub argmax1: Option<Assignment>,
    pub witnesses: Vec<LocalMeasureValue>,
    pub plan: InputPlan,
    /// True when inputs were sampled, so values are lower bounds.
    pub lower_bound: bool,
    pub inputs_examined: u64,
}

/// Exhaustive global report (arity at most [`EXHAUSTIVE_ARITY_CAP`]).
pub fn global(f: &BoolFn, m: MeasureId) -> Result<GlobalMeasureReport> {
    global_with(f, m, InputPlan::Exhaustive)
}

/// Sampled inputs of the plan, sorted and deduplicated.
pub fn plan_inputs(arity: usize, plan: InputPlan) -> Result<Vec<u64>> {
    match plan {
        InputPlan::Exhaustive => {
            if arity > EXHAUSTIVE_ARITY_CAP {
                return Err(Error::Budget(format!(
                    "exhaustive enumeration at arity {arity} needs a sample plan"
                )));
            }
            Ok((0..1u64 << arity).collect())
        }
        InputPlan::Sampled { seed, count } => {
            let mut g = ChaCha8Rng::seed_from_u64(seed);
            let mask = low_mask(arity);
            let mut xs: Vec<u64> = (0..count).map(|_| g.random::<u64>() & mask).collect();
            xs.sort_unstable();
            xs.dedup();
            Ok(xs)
        }
    }
}

pub fn global_with(f: &BoolFn, m: MeasureId, plan: InputPlan) -> Result<GlobalMeasureReport> {
    check_measure(m)?;
    let n = f.arity();
    let inputs = plan_inputs(n, plan)?;
    let values: Vec<Q> = inputs
        .par_iter()
        .map(|&x| local(f, &Assignment { arity: n, bits: x }, m).map(|v| v.value))
        .collect::<Result<_>>()?;
    let mut best: [Option<(Q, u64)>; 2] = [None, None];
    for (&x, v) in inputs.iter().zip(&values) {
        let side = f.at(x) as usize;
        if best[side].as_ref().is_none_or(|(bv, _)| v > bv) {
            best[side] = Some((v.clone(), x));
        }
    }
    let mut witnesses = Vec::new();
    let mut argmax = [None, None];
    for (side, b) in best.iter().enumerate() {
        if let Some((_, x)) = b {
            let a = Assignment { arity: n, bits: *x };
            argmax[side] = Some(a);
            witnesses.push(local(f, &a, m)?);
        }
    }
    let val = |side: usize| best[side].as_ref().map_or(Q::zero(), |(v, _)| v.clone());
    let (m0, m1) = (val(0), val(1));
    Ok(GlobalMeasureReport {
        function: f.name().map_or_else(
            || f.to_btt().replace('\n', " ").trim().to_string(),
            str::to_string,
        ),
        measure: m,
        m: m0.clone().max(m1.clone()),
        m0,
        m1,
        argmax0: argmax[0],
        argmax1: argmax[1],
        witnesses,
        plan,
        lower_bound: matches!(plan, InputPlan::Sampled { .. }),
        inputs_examined: inputs.len() as u64,
    })
}

/// The values `s_x <= bs_x <= bs*_x = C*_x <= C_x` at one input.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainValues {
    pub s: u64,
    pub bs: u64,
    #[serde(with = "crate::rational::serde_q")]
    pub bs_star: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub c_star: Q,
    pub c: u64,
}

/// Compute the chain at `x` and check it holds, with exact equality of the
/// two fractional measures.
pub fn chain_at(f: &BoolFn, x: &Assignment) -> Result<ChainValues> {
    let s = sensitive_set(f, x)?.size() as u64;
    let h = minblocks(f, x)?.blocks;
    let (bs, _) = hypergraph::nu(&h)?;
    let (sol, pack, cover) = h.fractional()?;
    let bs_star = pack.validate(&h)?;
    let c_star = cover.validate(&h)?;
    let (c, _) = hypergraph::tau(&h)?;
    let ok = s <= bs
        && q(bs as i64) <= bs_star
        && bs_star == c_star
        && c_star == sol.value
        && c_star <= q(c as i64);
    if !ok {
        return Err(Error::Certificate(format!(
            "measure chain fails at {x}: s={s} bs={bs} bs*={bs_star} C*={c_star} C={c}"
        )));
    }
    Ok(ChainValues {
        s,
        bs,
        bs_star,
        c_star,
        c,
    })
}

/// `m_x(F)` for a composed `F` via the recursion over the tree: a leaf costs
/// 1 and a gate costs the cheapest weight function in its assemblage at its
/// bottom-up input, priced by the costs of its children. Valid for `s`, `C`
/// and `C*`, whose assemblages compose and decompose over trees.
pub fn local_composed(ens: &Ensemble<BoolFn>, x: &Assignment, m: MeasureId) -> Result<Q> {
    if !matches!(m, MeasureId::S | MeasureId::C | MeasureId::CStar) {
        return Err(Error::InvalidParameter(format!(
            "{m} does not compose over trees"
        )));
    }
    let t = &ens.tree;
    let lab = bottom_up(ens, x)?;
    let mut cost: Vec<Q> = vec![Q::one(); t.node_count()];
    for v in (0..t.node_count()).rev() {
        if t.is_leaf(v) {
            continue;
        }
        let f = ens.at(v);
        let bv = lab.children_assignment(t, v);
        let child_cost: Vec<Q> = t.children(v).iter().map(|&c| cost[c].clone()).collect();
        cost[v] = match m {
            MeasureId::S => {
                let s = sensitive_set(f, &bv)?;
                (0..f.arity())
                    .filter(|&i| s.mask >> i & 1 == 1)
                    .map(|i| &child_cost[i])
                    .sum()
            }
            MeasureId::C => weighted_tau(&minblocks(f, &bv)?.blocks, &child_cost)?,
            _ => {
                let h = minblocks(f, &bv)?.blocks;
                if h.is_empty() {
                    Q::zero()
                } else {
                    h.cover_lp(child_cost).solve()?.value
                }
            }
        };
    }
    Ok(cost[t.root()].clone())
}

/// Cheapest hitting set under `cost`, by enumeration of subsets.
fn weighted_tau(h: &Hypergraph, cost: &[Q]) -> Result<Q> {
    let n = h.ground();
    if n > 20 {
        return Err(Error::Budget(format!("weighted cover over {n} indices")));
    }
    let mut best: Option<Q> = None;
    for s in 0..1u64 << n {
        if h.is_hit_by(s) {
            let c: Q = (0..n).filter(|i| s >> i & 1 == 1).map(|i| &cost[i]).sum();
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.ok_or(Error::Infeasible)
}

/// `m(f^(k))` for `m` in `{s, C, C*}` by running [`local_composed`] over every
/// input of the iterated composition. Returns `(m0, m1)`.
pub fn global_iterated(f: &BoolFn, k: usize, m: MeasureId) -> Result<(Q, Q)> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let ens = Ensemble::uniform(vec![f.clone(); k])?;
    let leaves = ens.tree.leaf_count();
    if leaves > EXHAUSTIVE_ARITY_CAP {
        return Err(Error::Budget(format!(
            "f^({k}) has {leaves} inputs, above the exhaustive cap"
        )));
    }
    let per: Vec<(bool, Q)> = (0..1u64 << leaves)
        .into_par_iter()
        .map(|x| {
            let a = Assignment {
                arity: leaves,
                bits: x,
            };
            let lab = bottom_up(&ens, &a)?;
            Ok((lab.labels[0], local_composed(&ens, &a, m)?))
        })
        .collect::<Result<_>>()?;
    let mut out = [Q::zero(), Q::zero()];
    for (side, v) in per {
        if v > out[side as usize] {
            out[side as usize] = v;
        }
    }
    let [m0, m1] = out;
    Ok((m0, m1))
}

/// Both sides of the OR-composition identities for one measure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrComposeRow {
    pub measure: MeasureId,
    #[serde(with = "crate::rational::serde_q")]
    pub m0_f: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub n_times_m0_g: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub m1_f: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub m1_g: Q,
    pub holds: bool,
}

/// Compute `m0(OR_n o g) = n m0(g)` and `m1(OR_n o g) = m1(g)` for
/// `m` in `{C, bs, bs*}` from the composed truth table.
pub fn or_compose_check(g: &BoolFn, n: usize) -> Result<Vec<OrComposeRow>> {
    if g.is_constant() {
        return Err(Error::ConstantFunction(
            "OR-composition needs non-constant g".into(),
        ));
    }
    let or = crate::boolfn::named_fn("OR", Some(n))?;
    let f = compose_pair(&or, g)?;
    [MeasureId::C, MeasureId::Bs, MeasureId::BsStar]
        .into_iter()
        .map(|m| {
            let rg = global(g, m)?;
            let rf = global(&f, m)?;
            let n_times = &rg.m0 * q(n as i64);
            let holds = rf.m0 == n_times && rf.m1 == rg.m1;
            Ok(OrComposeRow {
                measure: m,
                m0_f: rf.m0,
                n_times_m0_g: n_times,
                m1_f: rf.m1,
                m1_g: rg.m1,
                holds,
            })
        })
        .collect()
}

/// Randomized verifier built from an optimal fractional witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RcReport {
    pub input: Assignment,
    pub sigma: WeightFn,
    #[serde(with = "crate::rational::serde_q")]
    pub expected_queries: Q,
    /// `(block, exact acceptance probability)` for every min-block flip.
    pub acceptance: Vec<(u64, AcceptProb)>,
    /// Every acceptance is at most `e^-1 + 1e-12`.
    pub within_e_inv: bool,
    /// Every acceptance is at most `1/2`.
    pub sound: bool,
    /// Halving sigma gives a query distribution with at least `1/2` on every
    /// block, and doubling back (clipped at 1) is again a fractional witness.
    pub halved_round_trip: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AcceptProb(#[serde(with = "crate::rational::serde_q")] pub Q);

pub fn e_inv_upper() -> Q {
    parse_decimal(E_INV_DIGITS) + crate::rational::q_pow10_neg(12)
}

fn parse_decimal(s: &str) -> Q {
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    let digits: num_bigint::BigInt = format!("{int}{frac}").parse().expect("decimal digits");
    Q::new(
        digits,
        num_traits::pow(num_bigint::BigInt::from(10), frac.len()),
    )
}

/// Verifier check at `z`: query index `i` with probability `sigma(i)` for an
/// optimal fractional witness `sigma`, and compute exactly the probability
/// of accepting each min-block flip of `z`.
pub fn rc_verifier_check(f: &BoolFn, z: &Assignment) -> Result<RcReport> {
    let h = minblocks(f, z)?.blocks;
    let (c_star, cover) = hypergraph::tau_star(&h)?;
    // An optimal witness never needs weight above 1; clipping keeps it optimal.
    let sigma = WeightFn::new(
        cover
            .weights
            .values()
            .iter()
            .map(|v| v.clone().min(Q::one()))
            .collect(),
    )?;
    if sigma.total() != c_star || !h.is_fractional_cover(&sigma) {
        return Err(Error::Certificate("clipped witness is not optimal".into()));
    }
    let bound = e_inv_upper();
    let half = crate::rational::qr(1, 2);
    let acceptance: Vec<(u64, AcceptProb)> = h
        .edges()
        .iter()
        .map(|&b| {
            let p: Q = (0..f.arity())
                .filter(|i| b >> i & 1 == 1)
                .map(|i| Q::one() - sigma.get(i))
                .product();
            (b, AcceptProb(p))
        })
        .collect();
    let within = acceptance.iter().all(|(_, p)| p.0 <= bound);
    let sound = acceptance.iter().all(|(_, p)| p.0 <= half);
    let lambda = sigma.scaled(&half);
    let half_ok = h.edges().iter().all(|&b| lambda.sum_over(b) >= half);
    let doubled = WeightFn::new(
        lambda
            .values()
            .iter()
            .map(|v| (v * q(2)).min(Q::one()))
            .collect(),
    )?;
    let round_trip =
        half_ok && h.is_fractional_cover(&doubled) && doubled.total() <= lambda.total() * q(2);
    Ok(RcReport {
        input: *z,
        expected_queries: sigma.total(),
        sigma,
        acceptance,
        within_e_inv: within,
        sound,
        halved_round_trip: round_trip,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{bublitz, named_fn};
    use crate::rational::qr;

    #[test]
    fn parse_measures() {
        assert_eq!("Cstar".parse::<MeasureId>().unwrap(), MeasureId::CStar);
        assert_eq!("bs*".parse::<MeasureId>().unwrap(), MeasureId::BsStar);
        assert_eq!("bsM:3".parse::<MeasureId>().unwrap(), MeasureId::BsM(3));
        assert!("bsM:17".parse::<MeasureId>().is_err());
        assert!("D".parse::<MeasureId>().is_err());
    }

    #[test]
    fn bublitz_local_values() {
        let f = bublitz();
        let x = Assignment::zeros(6);
        let get = |m| {
            let v = local(&f, &x, m).unwrap();
            v.validate(&f).unwrap();
            v.value
        };
        assert_eq!(get(MeasureId::Bs), q(4));
        assert_eq!(get(MeasureId::C), q(5));
        assert_eq!(get(MeasureId::CStar), qr(9, 2));
        assert_eq!(get(MeasureId::BsStar), qr(9, 2));
        assert_eq!(get(MeasureId::BsM(2)), q(9));
    }

    #[test]
    fn simple_globals() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        let r = global(&or2, MeasureId::C).unwrap();
        assert_eq!(
            (r.m0.clone(), r.m1.clone(), r.m.clone()),
            (q(2), q(1), q(2))
        );
        assert_eq!(r.argmax0, Some(Assignment::zeros(2)));
        let or5 = named_fn("OR", Some(5)).unwrap();
        assert_eq!(
            local(&or5, &Assignment::zeros(5), MeasureId::C)
                .unwrap()
                .value,
            q(5)
        );
        let p = named_fn("PARITY", Some(4)).unwrap();
        assert_eq!(global(&p, MeasureId::S).unwrap().m, q(4));
        let c = BoolFn::constant(3, true).unwrap();
        let r = global(&c, MeasureId::CStar).unwrap();
        assert_eq!(r.m, q(0));
        assert_eq!(r.argmax0, None);
    }

    #[test]
    fn or_composition_small() {
        let and2 = named_fn("AND", Some(2)).unwrap();
        let rows = or_compose_check(&and2, 2).unwrap();
        let bs = rows.iter().find(|r| r.measure == MeasureId::Bs).unwrap();
        // bs_1(AND_2) = 2 at 11, so bs_1(f) = 2 as well
        assert_eq!((bs.m0_f.clone(), bs.m1_f.clone()), (q(2), q(2)));
        assert!(rows.iter().all(|r| r.holds));
        let par = named_fn("PARITY", Some(2)).unwrap();
        let rows = or_compose_check(&par, 3).unwrap();
        let c = rows.iter().find(|r| r.measure == MeasureId::C).unwrap();
        assert_eq!((c.m0_f.clone(), c.m1_f.clone()), (q(6), q(2)));
    }

    #[test]
    fn composed_recursion_matches_table() {
        let nand = named_fn("NAND", Some(2)).unwrap();
        let f3 = crate::tree::iterate(&nand, 3).unwrap();
        for m in [MeasureId::S, MeasureId::C, MeasureId::CStar] {
            let r = global(&f3, m).unwrap();
            assert_eq!(global_iterated(&nand, 3, m).unwrap(), (r.m0, r.m1), "{m}");
        }
    }

    #[test]
    fn verifier_at_or() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        let r = rc_verifier_check(&or2, &Assignment::zeros(2)).unwrap();
        assert!(r.acceptance.iter().all(|(_, p)| p.0.is_zero()));
        assert_eq!(r.expected_queries, q(2));
        assert!(r.within_e_inv && r.sound && r.halved_round_trip);
    }

    proptest::proptest! {
        #[test]
        fn chain_holds_at_random_points(table in 1u64..u32::MAX as u64, x in 0u64..32) {
            let f = BoolFn::from_words(5, vec![table]).unwrap();
            let c = chain_at(&f, &Assignment::new(5, x).unwrap()).unwrap();
            proptest::prop_assert!(c.s <= c.bs);
            proptest::prop_assert!(q(c.bs as i64) <= c.bs_star);
            proptest::prop_assert_eq!(&c.bs_star, &c.c_star);
            proptest::prop_assert!(c.c_star <= q(c.c as i64));
        }
    }
}
