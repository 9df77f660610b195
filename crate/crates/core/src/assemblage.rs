//! Min-blocks, witnesses and sensitive sets at a fixed input, plus their
//! composition over indexed trees.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::boolfn::{low_mask, Assignment, BoolFn};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::rational::Q;
use crate::tree::{bottom_up, compose_hypergraph, compose_weight, Ensemble};
use crate::weight::WeightFn;

/// Largest arity handled by the dense subset scan in [`minblocks`].
pub const MINBLOCK_DENSE_CAP: usize = 24;

/// Above this many opposite-valued inputs the dense scan is used instead of
/// filtering candidate blocks.
const CANDIDATE_LIMIT: u64 = 4096;

/// The min-blocks of `f` at `x`, as a hypergraph over the inputs of `f`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSet {
    pub x: Assignment,
    pub value: bool,
    pub blocks: Hypergraph,
}

/// Indices `i` for which `{i}` is a block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SensSet {
    pub x: Assignment,
    pub mask: u64,
}

impl SensSet {
    pub fn size(&self) -> u32 {
        self.mask.count_ones()
    }
}

fn check_arity(f: &BoolFn, x: &Assignment) -> Result<()> {
    if f.arity() != x.arity {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: x.arity,
        });
    }
    Ok(())
}

/// All inclusion-minimal blocks of `f` at `x`.
///
/// When few inputs disagree with `f(x)` every block `x ^ y` is a candidate
/// and the minimal ones are filtered directly. Otherwise all subsets are
/// scanned in increasing order while tracking, per subset, whether some
/// proper subset is already a block.
pub fn minblocks(f: &BoolFn, x: &Assignment) -> Result<BlockSet> {
    check_arity(f, x)?;
    let n = f.arity();
    let v = f.at(x.bits);
    let opposite = if v {
        f.input_count() - f.count_ones()
    } else {
        f.count_ones()
    };
    let edges = if opposite <= CANDIDATE_LIMIT {
        candidate_blocks(f, x)
    } else {
        if n > MINBLOCK_DENSE_CAP {
            return Err(Error::Budget(format!(
                "min-block scan at arity {n} exceeds {MINBLOCK_DENSE_CAP}"
            )));
        }
        dense_blocks(f, x)
    };
    Ok(BlockSet {
        x: *x,
        value: v,
        blocks: Hypergraph::new(n, edges)?,
    })
}

fn candidate_blocks(f: &BoolFn, x: &Assignment) -> Vec<u64> {
    let v = f.at(x.bits);
    let mut cands: Vec<u64> = (0..f.input_count())
        .filter(|&y| f.at(y) != v)
        .map(|y| y ^ x.bits)
        .collect();
    cands.sort_by_key(|&b| (b.count_ones(), b));
    let mut kept: Vec<u64> = Vec::new();
    for b in cands {
        if !kept.iter().any(|&k| k & b == k) {
            kept.push(b);
        }
    }
    kept
}

fn dense_blocks(f: &BoolFn, x: &Assignment) -> Vec<u64> {
    let v = f.at(x.bits);
    let total = 1usize << f.arity();
    // below[B]: some proper subset of B is a block
    let mut below = vec![0u64; total.div_ceil(64)];
    let get = |bits: &Vec<u64>, i: usize| bits[i >> 6] >> (i & 63) & 1 == 1;
    let mut out = Vec::new();
    for b in 1..total {
        let mut m = b;
        let mut covered = false;
        while m != 0 {
            let s = b & !(1 << m.trailing_zeros());
            m &= m - 1;
            if get(&below, s) || (s != 0 && f.at(x.bits ^ s as u64) != v) {
                covered = true;
                break;
            }
        }
        if covered {
            below[b >> 6] |= 1 << (b & 63);
        } else if f.at(x.bits ^ b as u64) != v {
            out.push(b as u64);
        }
    }
    out.sort_by_key(|&b| (b.count_ones(), b));
    out
}

/// Min-blocks of a composed function at `x`, assembled from the min-blocks
/// of each gate at its bottom-up input without building the composed table.
pub fn minblocks_composed(
    ens: &Ensemble<BoolFn>,
    x: &Assignment,
    max_edges: usize,
) -> Result<BlockSet> {
    let lab = bottom_up(ens, x)?;
    let t = &ens.tree;
    let targets = ens.map(|v, f| {
        let bv = lab.children_assignment(t, v);
        minblocks(f, &bv).map(|b| b.blocks)
    });
    let payload: Vec<Hypergraph> = targets.payloads().iter().cloned().collect::<Result<_>>()?;
    let hs = Ensemble::new(t.clone(), payload)?;
    Ok(BlockSet {
        x: *x,
        value: lab.labels[t.root()],
        blocks: compose_hypergraph(&hs, max_edges)?,
    })
}

/// Whether `w` is a (fractional, when allowed) witness for `f` at `x`:
/// values in `[0, 1]` and weight at least 1 on every min-block.
pub fn witness_check(f: &BoolFn, x: &Assignment, w: &WeightFn, fractional: bool) -> Result<bool> {
    check_arity(f, x)?;
    if w.len() != f.arity() {
        return Err(Error::ArityMismatch {
            expected: f.arity(),
            got: w.len(),
        });
    }
    if !fractional && !w.is_boolean() {
        return Ok(false);
    }
    if w.values().iter().any(|v| *v > Q::one()) {
        return Ok(false);
    }
    Ok(minblocks(f, x)?.blocks.is_fractional_cover(w))
}

pub fn sensitive_set(f: &BoolFn, x: &Assignment) -> Result<SensSet> {
    check_arity(f, x)?;
    let v = f.at(x.bits);
    let mask = (0..f.arity())
        .filter(|&i| f.at(x.bits ^ 1 << i) != v)
        .fold(0u64, |m, i| m | 1 << i);
    Ok(SensSet { x: *x, mask })
}

/// Compose per-node fractional hitting sets; the result hits the composed
/// hypergraph.
pub fn compose_hitting(
    ens: &Ensemble<WeightFn>,
    targets: &Ensemble<Hypergraph>,
    max_edges: usize,
) -> Result<WeightFn> {
    if ens.tree != targets.tree {
        return Err(Error::InvalidTree("ensembles over different trees".into()));
    }
    let t = &ens.tree;
    for &v in t.internal_nodes() {
        if !targets.at(v).is_fractional_cover(ens.at(v)) {
            return Err(Error::Precondition {
                node: t.address(v),
                reason: "payload is not a fractional hitting set".into(),
            });
        }
    }
    let h = compose_weight(ens);
    let composed = compose_hypergraph(targets, max_edges)?;
    if !composed.is_fractional_cover(&h) {
        return Err(Error::Certificate(
            "composed weights miss a composed edge".into(),
        ));
    }
    Ok(h)
}

/// Split a hitting set of the composed hypergraph into per-node hitting sets
/// whose composition is pointwise at most `h`.
///
/// At each node `v` the weight of child `c` is `min(1, min over composed
/// edges E below c of h(E))` (1 when there is no such edge). Subtrees with
/// positive weight are rescaled by it and decomposed recursively; subtrees
/// with zero weight get all-ones factors.
pub fn decompose_hitting(
    h: &WeightFn,
    targets: &Ensemble<Hypergraph>,
    max_edges: usize,
) -> Result<Ensemble<WeightFn>> {
    let t = &targets.tree;
    if h.len() != t.leaf_count() {
        return Err(Error::ArityMismatch {
            expected: t.leaf_count(),
            got: h.len(),
        });
    }
    let composed = compose_hypergraph(targets, max_edges)?;
    if !composed.is_fractional_cover(h) {
        return Err(Error::Precondition {
            node: vec![],
            reason: "weights do not hit the composed hypergraph".into(),
        });
    }
    let mut out: Vec<Option<WeightFn>> = vec![None; t.internal_nodes().len()];
    let mut weights = h.values().to_vec();
    decompose_at(targets, t.root(), &mut weights, max_edges, &mut out)?;
    let factors: Vec<WeightFn> = out
        .into_iter()
        .map(|w| w.expect("every node visited"))
        .collect();
    let ens = Ensemble::new(t.clone(), factors)?;
    for &v in t.internal_nodes() {
        if !targets.at(v).is_fractional_cover(ens.at(v)) {
            return Err(Error::Certificate(format!(
                "factor at {:?} is not a hitting set",
                t.address(v)
            )));
        }
    }
    if !compose_weight(&ens).le_pointwise(h) {
        return Err(Error::Certificate("composition exceeds h".into()));
    }
    Ok(ens)
}

fn decompose_at(
    targets: &Ensemble<Hypergraph>,
    v: usize,
    h: &mut [Q],
    max_edges: usize,
    out: &mut [Option<WeightFn>],
) -> Result<()> {
    let t = &targets.tree;
    let mut hr = Vec::with_capacity(t.arity(v));
    for &c in t.children(v) {
        let edges: Vec<u64> = if t.is_leaf(c) {
            vec![1u64 << t.leaf_range(c).start]
        } else {
            let sub = targets.subensemble(c);
            let offset = t.leaf_range(c).start;
            compose_hypergraph(&sub, max_edges)?
                .edges()
                .iter()
                .map(|&e| e << offset)
                .collect()
        };
        let mut best = Q::one();
        for e in edges {
            let s: Q = (0..64).filter(|i| e >> i & 1 == 1).map(|i| &h[i]).sum();
            if s < best {
                best = s;
            }
        }
        hr.push(best);
    }
    for (&c, r) in t.children(v).iter().zip(&hr) {
        if t.is_leaf(c) {
            continue;
        }
        if r.is_zero() {
            fill_ones(targets, c, out);
        } else {
            for w in &mut h[t.leaf_range(c)] {
                *w /= r;
            }
            decompose_at(targets, c, h, max_edges, out)?;
        }
    }
    out[t.internal_pos(v).expect("internal")] = Some(WeightFn::new(hr)?);
    Ok(())
}

fn fill_ones(targets: &Ensemble<Hypergraph>, v: usize, out: &mut [Option<WeightFn>]) {
    let t = &targets.tree;
    if t.is_leaf(v) {
        return;
    }
    out[t.internal_pos(v).expect("internal")] = Some(WeightFn::ones(t.arity(v)));
    for &c in t.children(v) {
        fill_ones(targets, c, out);
    }
}

/// Check the defining properties of a block set against the truth table.
pub fn validate_blocks(f: &BoolFn, bs: &BlockSet) -> Result<()> {
    let n = f.arity();
    let v = f.at(bs.x.bits);
    for &b in bs.blocks.edges() {
        if f.at(bs.x.bits ^ b) == v {
            return Err(Error::Certificate(format!("{b:#x} is not a block")));
        }
    }
    if bs.blocks.minimal().edges().len() != bs.blocks.edges().len() {
        return Err(Error::Certificate("block set is not minimal".into()));
    }
    if n <= 20 {
        for b in 1..=low_mask(n) {
            if f.at(bs.x.bits ^ b) != v && !bs.blocks.edges().iter().any(|&m| m & b == m) {
                return Err(Error::Certificate(format!(
                    "block {b:#x} contains no member"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{bublitz, named_fn};

    fn a(s: &str) -> Assignment {
        Assignment::parse(s).unwrap()
    }

    #[test]
    fn small_examples() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        assert_eq!(
            minblocks(&or2, &a("00")).unwrap().blocks.edges(),
            &[0b01, 0b10]
        );
        let p = named_fn("PARITY", Some(4)).unwrap();
        let b = minblocks(&p, &a("0110")).unwrap();
        assert_eq!(b.blocks.edges(), &[1, 2, 4, 8]);
        assert_eq!(sensitive_set(&p, &a("1010")).unwrap().mask, 0b1111);
        assert_eq!(sensitive_set(&or2, &a("11")).unwrap().mask, 0);
    }

    #[test]
    fn bublitz_zero_blocks() {
        let f = bublitz();
        let b = minblocks(&f, &a("000000")).unwrap();
        assert_eq!(
            b.blocks.edges(),
            &[0b1, 0b100, 0b1_0000, 0b1010, 0b10_0010, 0b10_1000]
        );
        validate_blocks(&f, &b).unwrap();
    }

    #[test]
    fn dense_and_candidate_paths_agree() {
        // MAJ_15 has 16384 one-inputs, so the zero input takes the dense scan
        let f = named_fn("MAJ", Some(15)).unwrap();
        let b = minblocks(&f, &Assignment::zeros(15)).unwrap();
        assert_eq!(b.blocks.edges().len(), 6435); // C(15,8)
        assert!(b.blocks.edges().iter().all(|e| e.count_ones() == 8));
        let f = bublitz();
        for x in 0..64 {
            let x = Assignment::new(6, x).unwrap();
            assert_eq!(candidate_blocks(&f, &x), dense_blocks(&f, &x));
        }
    }

    #[test]
    fn witness_examples() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        assert!(witness_check(&or2, &a("00"), &WeightFn::ones(2), false).unwrap());
        let half = WeightFn::constant(2, crate::rational::qr(1, 2));
        assert!(!witness_check(&or2, &a("00"), &half, true).unwrap());
    }
}
