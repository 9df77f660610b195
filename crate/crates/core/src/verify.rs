//! Verification suites, one per acceptance criterion. Each suite returns a
//! report of named checks; a failed check is a report entry, while budget
//! and parse problems are errors.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assemblage::{compose_hitting, decompose_hitting, minblocks, minblocks_composed};
use crate::boolfn::{bublitz, named_fn, Assignment, BoolFn};
use crate::complimit::charval::{charval, default_tol};
use crate::complimit::limit::{bs_lift_packing, eval_pair, sandwich_check};
use crate::complimit::matrix::{
    submult_instance, submult_property, supermult_instance, supermult_property,
};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::measures::{local, or_compose_check, rc_verifier_check, MeasureId};
use crate::rational::{q, q_to_f64, qr, Surd};
use crate::tree::{
    compose_boolfn, compose_weight, Ensemble, IndexedTree, Shape, DEFAULT_EDGE_BUDGET,
};
use crate::weight::WeightFn;
use crate::zoo::{
    build_grouped, build_star, random_fn, random_nonmonotone, small_zoo, verify_construction,
    ClaimStatus,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Bublitz,
    Limit,
    Lift,
    Nand,
    Duality,
    Sandwich,
    Grouped,
    Star,
    OrCompose,
    MatrixLemmas,
    Structural,
    Rc,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::Bublitz,
        Suite::Limit,
        Suite::Lift,
        Suite::Nand,
        Suite::Duality,
        Suite::Sandwich,
        Suite::Grouped,
        Suite::Star,
        Suite::OrCompose,
        Suite::MatrixLemmas,
        Suite::Structural,
        Suite::Rc,
    ];

    /// Acceptance criterion number, 1 to 12.
    pub fn criterion(self) -> usize {
        Suite::ALL.iter().position(|&s| s == self).expect("listed") + 1
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bublitz => "bublitz",
            Suite::Limit => "limit",
            Suite::Lift => "lift",
            Suite::Nand => "nand",
            Suite::Duality => "duality",
            Suite::Sandwich => "sandwich",
            Suite::Grouped => "grouped",
            Suite::Star => "star",
            Suite::OrCompose => "or-compose",
            Suite::MatrixLemmas => "matrix-lemmas",
            Suite::Structural => "structural",
            Suite::Rc => "rc",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Suite::Bublitz => "Bublitz table: bs=4, bs*=C*=9/2, C=5 at all 64 inputs",
            Suite::Limit => "Bublitz limits: C*-hat = 9/2, C-hat = 5",
            Suite::Lift => "bs is not submultiplicative: packing of size >= 18 > 16",
            Suite::Nand => "NAND_n: C-hat = sqrt(n) for n = 2..6",
            Suite::Duality => "LP duality bs* = C* at every tested input",
            Suite::Sandwich => "sandwich bounds for C up to k = 4",
            Suite::Grouped => "grouped n=16: C*-hat <= 16, C-hat >= 8",
            Suite::Star => "star s=5: bs_a <= 3 on g^-1(0), bs*_0 = 5/2",
            Suite::OrCompose => "OR-composition identities for C, bs, bs*",
            Suite::MatrixLemmas => "super- and sub-multiplicativity lemmas",
            Suite::Structural => "composed min-blocks and hitting set (de)composition",
            Suite::Rc => "randomized certificate verifier on Bublitz",
        }
    }

    /// Wall-clock bound, where the criterion states one.
    pub fn time_limit(self) -> Option<Duration> {
        match self {
            Suite::Bublitz => Some(Duration::from_secs(1)),
            Suite::Limit => Some(Duration::from_secs(60)),
            Suite::Lift => Some(Duration::from_secs(30)),
            Suite::Grouped => Some(Duration::from_secs(600)),
            _ => None,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::UnknownName(format!("suite {s}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub criterion: usize,
    pub title: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: Vec<CheckLine>,
    /// Summary lines kept for every check group.
    pub notes: Vec<CheckLine>,
    pub elapsed_ms: u128,
}

impl SuiteReport {
    pub fn first_failure(&self) -> Option<&CheckLine> {
        self.failures.first()
    }
}

/// Accumulates checks; failures are kept in full, passes only counted.
#[derive(Default)]
struct Log {
    checks: usize,
    failures: Vec<CheckLine>,
    notes: Vec<CheckLine>,
}

impl Log {
    fn check(
        &mut self,
        passed: bool,
        name: impl FnOnce() -> String,
        detail: impl FnOnce() -> String,
    ) {
        self.checks += 1;
        if !passed {
            self.failures.push(CheckLine {
                name: name(),
                passed,
                detail: detail(),
            });
        }
    }

    /// A check that is always reported.
    fn note(&mut self, passed: bool, name: impl Into<String>, detail: impl Into<String>) {
        let line = CheckLine {
            name: name.into(),
            passed,
            detail: detail.into(),
        };
        self.checks += 1;
        if !passed {
            self.failures.push(line.clone());
        }
        self.notes.push(line);
    }
}

pub fn run_suite(suite: Suite) -> Result<SuiteReport> {
    let start = Instant::now();
    let mut log = Log::default();
    match suite {
        Suite::Bublitz => bublitz_table(&mut log)?,
        Suite::Limit => bublitz_limits(&mut log)?,
        Suite::Lift => lift(&mut log)?,
        Suite::Nand => nand(&mut log)?,
        Suite::Duality => duality(&mut log)?,
        Suite::Sandwich => sandwich(&mut log)?,
        Suite::Grouped => grouped(&mut log)?,
        Suite::Star => star(&mut log)?,
        Suite::OrCompose => or_compose(&mut log)?,
        Suite::MatrixLemmas => matrix_lemmas(&mut log)?,
        Suite::Structural => structural(&mut log)?,
        Suite::Rc => rc(&mut log)?,
    }
    let elapsed = start.elapsed();
    if let Some(limit) = suite.time_limit() {
        log.note(
            elapsed < limit,
            "runtime",
            format!("{:.3}s (limit {}s)", elapsed.as_secs_f64(), limit.as_secs()),
        );
    }
    Ok(SuiteReport {
        suite,
        criterion: suite.criterion(),
        title: suite.title().into(),
        passed: log.failures.is_empty(),
        checks: log.checks,
        failures: log.failures,
        notes: log.notes,
        elapsed_ms: elapsed.as_millis(),
    })
}

fn all_inputs(n: usize) -> impl Iterator<Item = Assignment> {
    (0..1u64 << n).map(move |bits| Assignment { arity: n, bits })
}

fn bublitz_table(log: &mut Log) -> Result<()> {
    let f = bublitz();
    let want = [
        (MeasureId::Bs, q(4)),
        (MeasureId::BsStar, qr(9, 2)),
        (MeasureId::CStar, qr(9, 2)),
        (MeasureId::C, q(5)),
    ];
    for x in all_inputs(6) {
        for (m, v) in &want {
            let got = local(&f, &x, *m)?;
            got.validate(&f)?;
            log.check(
                got.value == *v,
                || format!("{m} at {x}"),
                || format!("{} != {v}", got.value),
            );
        }
    }
    log.note(
        true,
        "inputs",
        "64 inputs, 4 measures, certificates validated",
    );
    Ok(())
}

fn bublitz_limits(log: &mut Log) -> Result<()> {
    let f = bublitz();
    let tol = default_tol();
    let cs = charval(&f, MeasureId::CStar, &tol)?;
    let half = qr(9, 2);
    let eps = crate::rational::q_pow10_neg(9);
    let in_band = cs.lo >= &half - &eps && cs.hi <= &half + &eps;
    log.note(
        in_band && cs.exact == Surd::rational(half.clone()),
        "C*-hat",
        format!("exact {} in [{}, {}]", cs.exact, cs.lo, cs.hi),
    );
    let c = charval(&f, MeasureId::C, &tol)?;
    log.note(
        c.exact == Surd::rational(q(5)),
        "C-hat",
        format!("exact {}", c.exact),
    );
    Ok(())
}

fn lift(log: &mut Log) -> Result<()> {
    let g = bublitz();
    let lp = bs_lift_packing(&g, &g, false)?;
    log.note(lp.arity == 36, "arity", lp.arity.to_string());
    let blocks: Vec<u64> = lp.packing.multiplicities.iter().map(|(b, _)| *b).collect();
    let disjoint = blocks
        .iter()
        .enumerate()
        .all(|(i, a)| blocks[i + 1..].iter().all(|b| a & b == 0));
    let v = eval_pair(&g, &g, lp.input.bits);
    let all_blocks = blocks
        .iter()
        .all(|&b| b != 0 && eval_pair(&g, &g, lp.input.bits ^ b) != v);
    log.note(
        disjoint && all_blocks && v == lp.value,
        "packing verified by direct evaluation",
        format!(
            "{} disjoint blocks at input {:#011x}",
            blocks.len(),
            lp.input.bits
        ),
    );
    log.note(lp.size >= 18, "size", format!("{} > bs(f)^2 = 16", lp.size));
    Ok(())
}

fn nand(log: &mut Log) -> Result<()> {
    for n in 2..=6usize {
        let f = named_fn("NAND", Some(n))?;
        let cv = charval(&f, MeasureId::C, &default_tol())?;
        let root = (n as f64).sqrt();
        let exact = cv.exact == Surd::new(q(0), q(1), q(n as i64));
        let band =
            (q_to_f64(&cv.lo) - root).abs() <= 1e-9 && (q_to_f64(&cv.hi) - root).abs() <= 1e-9;
        log.note(
            exact && band,
            format!("NAND_{n}"),
            format!(
                "exact {} in [{:.12}, {:.12}]",
                cv.exact,
                q_to_f64(&cv.lo),
                q_to_f64(&cv.hi)
            ),
        );
    }
    Ok(())
}

fn duality_on(
    log: &mut Log,
    f: &BoolFn,
    inputs: impl Iterator<Item = Assignment>,
) -> Result<usize> {
    let mut count = 0;
    for x in inputs {
        let p = local(f, &x, MeasureId::BsStar)?;
        let c = local(f, &x, MeasureId::CStar)?;
        p.validate(f)?;
        c.validate(f)?;
        log.check(
            p.value == c.value,
            || format!("{} at {x}", f.name().unwrap_or("f")),
            || format!("bs* = {} but C* = {}", p.value, c.value),
        );
        count += 1;
    }
    Ok(count)
}

fn duality(log: &mut Log) -> Result<()> {
    let zoo = small_zoo(6)?;
    let mut count = 0;
    for f in &zoo {
        count += duality_on(log, f, all_inputs(f.arity()))?;
    }
    log.note(
        true,
        "zoo",
        format!("{} functions, {count} inputs", zoo.len()),
    );
    let mut count = 0;
    for i in 0..100u64 {
        let n = 5 + (i % 6) as usize;
        let f = random_fn(n, 0xd0a1 + i)?;
        let mut g = ChaCha8Rng::seed_from_u64(i);
        let xs: Vec<Assignment> = (0..64)
            .map(|_| Assignment {
                arity: n,
                bits: g.random_range(0..1u64 << n),
            })
            .collect();
        count += duality_on(log, &f, xs.into_iter())?;
    }
    log.note(
        true,
        "seeded",
        format!("100 functions of arity 5..10, {count} inputs"),
    );
    Ok(())
}

fn sandwich(log: &mut Log) -> Result<()> {
    let mut fns = vec![named_fn("NAND", Some(2))?];
    for i in 0..20u64 {
        fns.push(random_nonmonotone(2, 0x5a0d + 1000 * i)?);
    }
    for (i, f) in fns.iter().enumerate() {
        let cv = charval(f, MeasureId::C, &default_tol())?;
        for k in 1..=4 {
            let r = crate::complimit::limit::sandwich_check_with(f, &cv, k)?;
            log.check(
                r.holds(),
                || {
                    format!(
                        "function {i} ({}) at k={k}",
                        f.to_btt().trim().replace('\n', " ")
                    )
                },
                || format!("value {} outside [{}, {}]", r.value, r.lower, r.upper),
            );
        }
    }
    let r = sandwich_check(&fns[0], MeasureId::C, 4)?;
    log.note(
        r.holds(),
        "NAND_2 at k=4",
        format!("{} <= C = {} <= {}", r.lower, r.value, r.upper),
    );
    log.note(
        true,
        "functions",
        format!("{} functions, k = 1..4", fns.len()),
    );
    Ok(())
}

fn claims_pass(log: &mut Log, report: &crate::zoo::ZooReport) {
    for c in &report.results {
        log.note(
            c.status == ClaimStatus::ProvenAtScale,
            c.description.clone(),
            format!("{:?}: {}", c.status, c.detail),
        );
    }
}

fn grouped(log: &mut Log) -> Result<()> {
    let r = verify_construction(&build_grouped(16)?);
    claims_pass(log, &r);
    Ok(())
}

fn star(log: &mut Log) -> Result<()> {
    let r = verify_construction(&build_star(5)?);
    for c in &r.results {
        // OR_2 o g has 20 inputs at s = 5 and is covered at s <= 4
        let ok = match c.status {
            ClaimStatus::ProvenAtScale => true,
            ClaimStatus::Skipped => c.description.starts_with("OR_2"),
            _ => false,
        };
        log.note(
            ok,
            c.description.clone(),
            format!("{:?}: {}", c.status, c.detail),
        );
    }
    Ok(())
}

fn or_compose(log: &mut Log) -> Result<()> {
    for g in [
        named_fn("AND", Some(2))?,
        named_fn("PARITY", Some(2))?,
        bublitz(),
    ] {
        for row in or_compose_check(&g, 2)? {
            log.note(
                row.holds,
                format!("{} on OR_2 o {}", row.measure, g.name().unwrap_or("g")),
                format!(
                    "m0 = {} vs 2 m0(g) = {}, m1 = {} vs m1(g) = {}",
                    row.m0_f, row.n_times_m0_g, row.m1_f, row.m1_g
                ),
            );
        }
    }
    Ok(())
}

fn matrix_lemmas(log: &mut Log) -> Result<()> {
    let (mut sup, mut sub) = (0, 0);
    for seed in 0..500u64 {
        let k = 1 + (seed % 6) as usize;
        let (ms, lambda) = supermult_instance(seed, k);
        let r = supermult_property(&ms, &lambda)?;
        log.check(
            r.hypothesis && r.conclusion,
            || format!("supermult seed {seed}"),
            || format!("{r:?}"),
        );
        sup += 1;
        let (fr, lambda) = submult_instance(seed, k);
        let r = submult_property(&fr, &lambda)?;
        log.check(
            r.hypothesis && r.holds(),
            || format!("submult seed {seed}"),
            || format!("{r:?}"),
        );
        sub += 1;
    }
    log.note(
        true,
        "instances",
        format!("{sup} super-, {sub} sub-multiplicativity, k = 1..6"),
    );
    Ok(())
}

/// Random tree with all leaves at depth `depth`, each internal node of
/// arity 1 to 3.
fn random_shape(g: &mut ChaCha8Rng, depth: usize) -> Shape {
    if depth == 0 {
        return Shape::Leaf;
    }
    let arity = g.random_range(1..=3usize);
    Shape::Node((0..arity).map(|_| random_shape(g, depth - 1)).collect())
}

/// Rejection-sample a tree with at most `max_leaves` leaves.
fn random_tree(g: &mut ChaCha8Rng, depth: usize, max_leaves: usize) -> Result<IndexedTree> {
    loop {
        let t = IndexedTree::from_shape(&random_shape(g, depth))?;
        if t.leaf_count() <= max_leaves {
            return Ok(t);
        }
    }
}

fn random_gate(g: &mut ChaCha8Rng, arity: usize) -> Result<BoolFn> {
    loop {
        let f = random_fn(arity, g.random::<u64>())?;
        if !f.is_constant() {
            return Ok(f);
        }
    }
}

/// Largest composed arity in the structural suite.
const STRUCTURAL_LEAF_CAP: usize = 14;

fn structural(log: &mut Log) -> Result<()> {
    let mut g = ChaCha8Rng::seed_from_u64(0x57ac);
    let (mut cases, mut leaves) = (0, 0);
    while cases < 200 {
        let depth = 1 + cases % 3;
        let tree = random_tree(&mut g, depth, STRUCTURAL_LEAF_CAP)?;
        let gates: Vec<BoolFn> = tree
            .internal_nodes()
            .iter()
            .map(|&v| random_gate(&mut g, tree.arity(v)))
            .collect::<Result<_>>()?;
        let ens = Ensemble::new(tree, gates)?;
        let f = compose_boolfn(&ens)?;
        leaves += f.arity();
        let n = f.arity();
        let x = Assignment {
            arity: n,
            bits: g.random_range(0..1u64 << n),
        };

        // set equality of composed and direct min-blocks
        let composed = minblocks_composed(&ens, &x, DEFAULT_EDGE_BUDGET)?;
        let direct = minblocks(&f, &x)?;
        log.check(
            composed.blocks.edges() == direct.blocks.edges(),
            || format!("case {cases}: min-blocks at {x}"),
            || {
                format!(
                    "{:?} vs {:?}",
                    composed.blocks.edges(),
                    direct.blocks.edges()
                )
            },
        );

        // per-gate targets and optimal fractional hitting sets
        let lab = crate::tree::bottom_up(&ens, &x)?;
        let t = &ens.tree;
        let targets: Vec<Hypergraph> = t
            .internal_nodes()
            .iter()
            .map(|&v| minblocks(ens.at(v), &lab.children_assignment(t, v)).map(|b| b.blocks))
            .collect::<Result<_>>()?;
        let targets = Ensemble::new(t.clone(), targets)?;
        let covers: Vec<WeightFn> = targets
            .payloads()
            .iter()
            .map(|h| h.fractional().map(|(_, _, c)| c.weights))
            .collect::<Result<_>>()?;
        let covers = Ensemble::new(t.clone(), covers)?;
        let h = compose_hitting(&covers, &targets, DEFAULT_EDGE_BUDGET)?;
        log.check(
            direct.blocks.is_fractional_cover(&h),
            || format!("case {cases}: composed hitting set"),
            || "misses a direct min-block".into(),
        );

        let (_, _, opt) = direct.blocks.fractional()?;
        let parts = decompose_hitting(&opt.weights, &targets, DEFAULT_EDGE_BUDGET)?;
        let local_ok = t
            .internal_nodes()
            .iter()
            .all(|&v| targets.at(v).is_fractional_cover(parts.at(v)));
        let dominated = compose_weight(&parts).le_pointwise(&opt.weights);
        log.check(
            local_ok && dominated,
            || format!("case {cases}: decomposition"),
            || format!("per-node covers {local_ok}, dominated {dominated}"),
        );
        cases += 1;
    }
    log.note(
        true,
        "cases",
        format!("{cases} ensembles of depth 1..3, {leaves} leaves in total"),
    );
    Ok(())
}

fn rc(log: &mut Log) -> Result<()> {
    let f = bublitz();
    let mut worst = q(0);
    for z in all_inputs(6) {
        let r = rc_verifier_check(&f, &z)?;
        for (_, p) in &r.acceptance {
            worst = worst.max(p.0.clone());
        }
        log.check(
            r.within_e_inv && r.expected_queries == qr(9, 2) && r.sound && r.halved_round_trip,
            || format!("verifier at {z}"),
            || {
                format!(
                    "expected queries {}, within e^-1 {}",
                    r.expected_queries, r.within_e_inv
                )
            },
        );
    }
    log.note(
        worst <= crate::measures::e_inv_upper(),
        "largest acceptance",
        format!("{worst} ~ {:.12}", q_to_f64(&worst)),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert_eq!(Suite::Rc.criterion(), 12);
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn shapes_respect_leaf_budget() {
        let mut g = ChaCha8Rng::seed_from_u64(1);
        for d in 1..=3 {
            for _ in 0..50 {
                let t = random_tree(&mut g, d, STRUCTURAL_LEAF_CAP).unwrap();
                assert!(t.leaf_count() <= STRUCTURAL_LEAF_CAP);
                assert_eq!(t.depth(), d);
            }
        }
    }
}
