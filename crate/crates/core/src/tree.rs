//! Indexed trees of uniform depth, ensembles, and composition.
//!
//! Nodes live in an arena in preorder. Edge labels out of a node are
//! `0..arity`, so leaves are ordered lexicographically by their root path and
//! every subtree owns a contiguous range of leaf positions.

use rayon::prelude::*;

use crate::boolfn::{Assignment, BoolFn, Selector, ARITY_CAP};
use crate::error::{Error, Result};
use crate::hypergraph::Hypergraph;
use crate::weight::{WeightFn, WeightSelector};

/// Default cap on composed hypergraph edges.
pub const DEFAULT_EDGE_BUDGET: usize = 1 << 20;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Node {
    parent: Option<usize>,
    label: usize,
    children: Vec<usize>,
    depth: usize,
    leaf_start: usize,
    leaf_end: usize,
    internal_pos: Option<usize>,
}

/// Rooted tree with all leaves at one depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexedTree {
    nodes: Vec<Node>,
    depth: usize,
    leaves: Vec<usize>,
    internal: Vec<usize>,
}

/// Nested tree shape used to build an [`IndexedTree`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Shape {
    Leaf,
    Node(Vec<Shape>),
}

impl Shape {
    fn depth(&self) -> Result<usize> {
        match self {
            Shape::Leaf => Ok(0),
            Shape::Node(ch) => {
                if ch.is_empty() {
                    return Err(Error::InvalidTree("internal node without children".into()));
                }
                let ds: Vec<usize> = ch.iter().map(Shape::depth).collect::<Result<_>>()?;
                if ds.iter().any(|&d| d != ds[0]) {
                    return Err(Error::InvalidTree("leaves at unequal depths".into()));
                }
                Ok(ds[0] + 1)
            }
        }
    }
}

impl IndexedTree {
    pub fn from_shape(shape: &Shape) -> Result<Self> {
        let depth = shape.depth()?;
        let mut t = IndexedTree {
            nodes: Vec::new(),
            depth,
            leaves: Vec::new(),
            internal: Vec::new(),
        };
        t.push(shape, None, 0, 0);
        Ok(t)
    }

    fn push(&mut self, shape: &Shape, parent: Option<usize>, label: usize, depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            parent,
            label,
            children: Vec::new(),
            depth,
            leaf_start: self.leaves.len(),
            leaf_end: 0,
            internal_pos: None,
        });
        match shape {
            Shape::Leaf => self.leaves.push(id),
            Shape::Node(ch) => {
                self.nodes[id].internal_pos = Some(self.internal.len());
                self.internal.push(id);
                for (l, c) in ch.iter().enumerate() {
                    let cid = self.push(c, Some(id), l, depth + 1);
                    self.nodes[id].children.push(cid);
                }
            }
        }
        self.nodes[id].leaf_end = self.leaves.len();
        id
    }

    /// Tree whose level-`m` nodes all have `arities[m]` children.
    pub fn uniform(arities: &[usize]) -> Result<Self> {
        fn build(a: &[usize]) -> Shape {
            match a.split_first() {
                None => Shape::Leaf,
                Some((&k, rest)) => Shape::Node((0..k).map(|_| build(rest)).collect()),
            }
        }
        if arities.contains(&0) {
            return Err(Error::InvalidTree("zero arity level".into()));
        }
        Self::from_shape(&build(arities))
    }

    /// Parse the `.itree` format: `(k c1 ... ck)` where each child is itself
    /// a parenthesized node, or `(k)` for a node with `k` leaf children.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens: Vec<String> = text
            .replace('(', " ( ")
            .replace(')', " ) ")
            .split_whitespace()
            .map(str::to_string)
            .collect();
        let mut pos = 0;
        let shape = parse_node(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(Error::Parse("trailing tokens after tree".into()));
        }
        Self::from_shape(&shape)
    }

    pub fn shape(&self) -> Shape {
        self.shape_at(0)
    }

    fn shape_at(&self, v: usize) -> Shape {
        if self.is_leaf(v) {
            Shape::Leaf
        } else {
            Shape::Node(
                self.nodes[v]
                    .children
                    .iter()
                    .map(|&c| self.shape_at(c))
                    .collect(),
            )
        }
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    /// Internal node ids in preorder; ensemble payloads follow this order.
    pub fn internal_nodes(&self) -> &[usize] {
        &self.internal
    }

    /// Leaf node ids in leaf order.
    pub fn leaf_nodes(&self) -> &[usize] {
        &self.leaves
    }

    pub fn is_leaf(&self, v: usize) -> bool {
        self.nodes[v].internal_pos.is_none()
    }

    pub fn children(&self, v: usize) -> &[usize] {
        &self.nodes[v].children
    }

    pub fn arity(&self, v: usize) -> usize {
        self.nodes[v].children.len()
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.nodes[v].parent
    }

    pub fn label(&self, v: usize) -> usize {
        self.nodes[v].label
    }

    pub fn node_depth(&self, v: usize) -> usize {
        self.nodes[v].depth
    }

    /// Position of an internal node among [`Self::internal_nodes`].
    pub fn internal_pos(&self, v: usize) -> Option<usize> {
        self.nodes[v].internal_pos
    }

    /// Range of leaf positions below `v`.
    pub fn leaf_range(&self, v: usize) -> std::ops::Range<usize> {
        self.nodes[v].leaf_start..self.nodes[v].leaf_end
    }

    /// Label sequence from the root to `v`.
    pub fn address(&self, v: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut cur = v;
        while let Some(p) = self.nodes[cur].parent {
            path.push(self.nodes[cur].label);
            cur = p;
        }
        path.reverse();
        path
    }

    pub fn node_at(&self, address: &[usize]) -> Option<usize> {
        let mut cur = 0;
        for &l in address {
            cur = *self.nodes[cur].children.get(l)?;
        }
        Some(cur)
    }

    /// Subtree rooted at `v` as a standalone tree.
    pub fn subtree(&self, v: usize) -> IndexedTree {
        IndexedTree::from_shape(&self.shape_at(v)).expect("subtree of a valid tree")
    }
}

fn parse_node(tokens: &[String], pos: &mut usize) -> Result<Shape> {
    let expect = |pos: &usize, t: &str| -> Result<()> {
        match tokens.get(*pos) {
            Some(s) if s == t => Ok(()),
            other => Err(Error::Parse(format!("expected `{t}`, found {other:?}"))),
        }
    };
    expect(pos, "(")?;
    *pos += 1;
    let k: usize = tokens
        .get(*pos)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Parse("expected an arity".into()))?;
    *pos += 1;
    if k == 0 {
        return Err(Error::Parse("arity must be positive".into()));
    }
    let mut children = Vec::new();
    while tokens.get(*pos).map(String::as_str) == Some("(") {
        children.push(parse_node(tokens, pos)?);
    }
    expect(pos, ")")?;
    *pos += 1;
    if children.is_empty() {
        children = vec![Shape::Leaf; k];
    } else if children.len() != k {
        return Err(Error::Parse(format!(
            "node declares arity {k} but lists {} children",
            children.len()
        )));
    }
    Ok(Shape::Node(children))
}

/// Objects defined over an index set of known size.
pub trait Indexed {
    fn index_count(&self) -> usize;
}

impl Indexed for BoolFn {
    fn index_count(&self) -> usize {
        self.arity()
    }
}

impl Indexed for WeightFn {
    fn index_count(&self) -> usize {
        self.len()
    }
}

impl Indexed for Hypergraph {
    fn index_count(&self) -> usize {
        self.ground()
    }
}

impl Indexed for Selector {
    fn index_count(&self) -> usize {
        self.arity()
    }
}

/// One payload per internal node, in preorder.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<P> {
    pub tree: IndexedTree,
    payload: Vec<P>,
}

impl<P: Indexed> Ensemble<P> {
    pub fn new(tree: IndexedTree, payload: Vec<P>) -> Result<Self> {
        if payload.len() != tree.internal_nodes().len() {
            return Err(Error::InvalidTree(format!(
                "{} payloads for {} internal nodes",
                payload.len(),
                tree.internal_nodes().len()
            )));
        }
        for (&v, p) in tree.internal_nodes().iter().zip(&payload) {
            if p.index_count() != tree.arity(v) {
                return Err(Error::Precondition {
                    node: tree.address(v),
                    reason: format!(
                        "payload over {} indices at a node with {} children",
                        p.index_count(),
                        tree.arity(v)
                    ),
                });
            }
        }
        Ok(Ensemble { tree, payload })
    }

    /// Uniform tree with `levels[m]` at every node of level `m`.
    pub fn uniform(levels: Vec<P>) -> Result<Self>
    where
        P: Clone,
    {
        let arities: Vec<usize> = levels.iter().map(Indexed::index_count).collect();
        let tree = IndexedTree::uniform(&arities)?;
        let payload = tree
            .internal_nodes()
            .iter()
            .map(|&v| levels[tree.node_depth(v)].clone())
            .collect();
        Ok(Ensemble { tree, payload })
    }
}

impl<P> Ensemble<P> {
    pub fn payloads(&self) -> &[P] {
        &self.payload
    }

    /// Payload of internal node `v`.
    pub fn at(&self, v: usize) -> &P {
        &self.payload[self.tree.internal_pos(v).expect("internal node")]
    }

    pub fn map<R>(&self, f: impl Fn(usize, &P) -> R) -> Ensemble<R> {
        Ensemble {
            tree: self.tree.clone(),
            payload: self
                .tree
                .internal_nodes()
                .iter()
                .zip(&self.payload)
                .map(|(&v, p)| f(v, p))
                .collect(),
        }
    }

    /// Payloads for the subtree rooted at internal node `v`.
    pub fn subensemble(&self, v: usize) -> Ensemble<P>
    where
        P: Clone,
    {
        let tree = self.tree.subtree(v);
        let mut payload = Vec::new();
        collect_preorder(&self.tree, v, &mut |u| {
            if let Some(p) = self.tree.internal_pos(u) {
                payload.push(self.payload[p].clone());
            }
        });
        Ensemble { tree, payload }
    }
}

fn collect_preorder(t: &IndexedTree, v: usize, f: &mut impl FnMut(usize)) {
    f(v);
    for &c in t.children(v) {
        collect_preorder(t, c, f);
    }
}

/// A bit for every node of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TLabeling {
    pub labels: Vec<bool>,
}

impl TLabeling {
    /// Restriction to the leaves, as an assignment in leaf order.
    pub fn leaf_assignment(&self, tree: &IndexedTree) -> Assignment {
        let bits = tree
            .leaf_nodes()
            .iter()
            .enumerate()
            .filter(|(_, &v)| self.labels[v])
            .fold(0u64, |m, (i, _)| m | 1 << i);
        Assignment {
            arity: tree.leaf_count(),
            bits,
        }
    }

    /// Labels of the children of `v`, as an assignment over `I(v)`.
    pub fn children_assignment(&self, tree: &IndexedTree, v: usize) -> Assignment {
        let bits = tree
            .children(v)
            .iter()
            .enumerate()
            .filter(|(_, &c)| self.labels[c])
            .fold(0u64, |m, (i, _)| m | 1 << i);
        Assignment {
            arity: tree.arity(v),
            bits,
        }
    }
}

/// Leaf weight = product of the edge weights along its root path.
pub fn compose_weight(ens: &Ensemble<WeightFn>) -> WeightFn {
    let t = &ens.tree;
    let values = t
        .leaf_nodes()
        .iter()
        .map(|&leaf| {
            let mut w = crate::rational::q(1);
            let mut cur = leaf;
            while let Some(p) = t.parent(cur) {
                w *= ens.at(p).get(t.label(cur));
                cur = p;
            }
            w
        })
        .collect();
    WeightFn::new(values).expect("products of nonnegative weights")
}

/// All compositions choosing one edge per internal node. Leaves must number
/// at most 64.
pub fn compose_hypergraph(ens: &Ensemble<Hypergraph>, max_edges: usize) -> Result<Hypergraph> {
    let t = &ens.tree;
    if t.leaf_count() > 64 {
        return Err(Error::Budget(format!(
            "{} leaves exceed the 64-index edge representation",
            t.leaf_count()
        )));
    }
    let edges = composed_edges(ens, t.root(), max_edges)?;
    Hypergraph::new(t.leaf_count(), edges)
}

fn composed_edges(ens: &Ensemble<Hypergraph>, v: usize, max_edges: usize) -> Result<Vec<u64>> {
    let t = &ens.tree;
    if t.is_leaf(v) {
        return Ok(vec![1u64 << t.leaf_range(v).start]);
    }
    let child_edges: Vec<Vec<u64>> = t
        .children(v)
        .iter()
        .map(|&c| composed_edges(ens, c, max_edges))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for &e in ens.at(v).edges() {
        let mut partial = vec![0u64];
        for (i, ce) in child_edges.iter().enumerate() {
            if e >> i & 1 == 0 {
                continue;
            }
            if partial.len().saturating_mul(ce.len()) + out.len() > max_edges {
                return Err(Error::Budget(format!(
                    "composed hypergraph exceeds {max_edges} edges"
                )));
            }
            partial = partial
                .iter()
                .flat_map(|&p| ce.iter().map(move |&c| p | c))
                .collect();
        }
        out.extend(partial);
        if out.len() > max_edges {
            return Err(Error::Budget(format!(
                "composed hypergraph exceeds {max_edges} edges"
            )));
        }
    }
    Ok(out)
}

fn eval_node(ens: &Ensemble<BoolFn>, v: usize, x: u64) -> bool {
    let t = &ens.tree;
    if t.is_leaf(v) {
        return x >> t.leaf_range(v).start & 1 == 1;
    }
    let mut input = 0u64;
    for (i, &c) in t.children(v).iter().enumerate() {
        if eval_node(ens, c, x) {
            input |= 1 << i;
        }
    }
    ens.at(v).at(input)
}

/// Truth table of the circuit described by the ensemble.
pub fn compose_boolfn(ens: &Ensemble<BoolFn>) -> Result<BoolFn> {
    let n = ens.tree.leaf_count();
    if n > ARITY_CAP {
        return Err(Error::ArityTooLarge {
            arity: n,
            cap: ARITY_CAP,
        });
    }
    if ens.tree.depth() == 0 {
        return BoolFn::from_fn(1, |x| x == 1);
    }
    let words = if n <= 6 { 1 } else { 1usize << (n - 6) };
    let total = 1u64 << n;
    let table: Vec<u64> = (0..words)
        .into_par_iter()
        .map(|w| {
            let mut word = 0u64;
            for b in 0..64u64 {
                let x = (w as u64) << 6 | b;
                if x < total && eval_node(ens, 0, x) {
                    word |= 1 << b;
                }
            }
            word
        })
        .collect();
    BoolFn::from_words(n, table)
}

/// `f o g`: every input of `f` fed by its own copy of `g`.
pub fn compose_pair(f: &BoolFn, g: &BoolFn) -> Result<BoolFn> {
    let arity = f.arity() * g.arity();
    if arity > ARITY_CAP {
        return Err(Error::ArityTooLarge {
            arity,
            cap: ARITY_CAP,
        });
    }
    let k = g.arity();
    let gm = crate::boolfn::low_mask(k);
    BoolFn::from_fn(arity, |x| {
        let mut input = 0u64;
        for i in 0..f.arity() {
            if g.at(x >> (i * k) & gm) {
                input |= 1 << i;
            }
        }
        f.at(input)
    })
}

/// The iterated composition `f^(k)`.
pub fn iterate(f: &BoolFn, k: usize) -> Result<BoolFn> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let mut acc = f.clone();
    for _ in 1..k {
        acc = compose_pair(f, &acc)?;
    }
    Ok(acc)
}

/// Evaluation labeling induced by the ensemble and leaf input `x`.
pub fn bottom_up(ens: &Ensemble<BoolFn>, x: &Assignment) -> Result<TLabeling> {
    let t = &ens.tree;
    if x.arity != t.leaf_count() {
        return Err(Error::ArityMismatch {
            expected: t.leaf_count(),
            got: x.arity,
        });
    }
    let mut labels = vec![false; t.node_count()];
    for v in (0..t.node_count()).rev() {
        labels[v] = if t.is_leaf(v) {
            x.get(t.leaf_range(v).start)
        } else {
            let mut input = 0u64;
            for (i, &c) in t.children(v).iter().enumerate() {
                if labels[c] {
                    input |= 1 << i;
                }
            }
            ens.at(v).at(input)
        };
    }
    Ok(TLabeling { labels })
}

/// Labeling with root `c` where the children of `v` follow `alpha_v^{b(v)}`.
pub fn top_down(ens: &Ensemble<Selector>, c: bool) -> TLabeling {
    let t = &ens.tree;
    let mut labels = vec![false; t.node_count()];
    labels[0] = c;
    for v in 0..t.node_count() {
        if t.is_leaf(v) {
            continue;
        }
        let a = ens.at(v).get(labels[v]);
        for (i, &ch) in t.children(v).iter().enumerate() {
            labels[ch] = a.get(i);
        }
    }
    TLabeling { labels }
}

/// Leaf restrictions of the two top-down labelings.
pub fn compose_selector(ens: &Ensemble<Selector>) -> Result<Selector> {
    if ens.tree.leaf_count() > 64 {
        return Err(Error::Budget("selector over more than 64 leaves".into()));
    }
    let a0 = top_down(ens, false).leaf_assignment(&ens.tree);
    let a1 = top_down(ens, true).leaf_assignment(&ens.tree);
    Selector::new(a0, a1)
}

/// Uniform composition of AW selector pairs, root level first.
pub fn compose_aw(pairs: &[(Selector, WeightSelector)]) -> Result<(Selector, WeightSelector)> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter("no levels".into()));
    }
    for (s, w) in pairs {
        if w.w0.len() != s.arity() || w.w1.len() != s.arity() {
            return Err(Error::ArityMismatch {
                expected: s.arity(),
                got: w.w0.len().max(w.w1.len()),
            });
        }
    }
    let sels = Ensemble::uniform(pairs.iter().map(|(s, _)| *s).collect())?;
    let selector = compose_selector(&sels)?;
    let weight = |c: bool| {
        let lab = top_down(&sels, c);
        let ens = sels.map(|v, _| {
            let level = sels.tree.node_depth(v);
            pairs[level].1.get(lab.labels[v]).clone()
        });
        compose_weight(&ens)
    };
    Ok((
        selector,
        WeightSelector {
            w0: weight(false),
            w1: weight(true),
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::named_fn;
    use crate::rational::{q, qr};

    #[test]
    fn parse_itree() {
        let t = IndexedTree::parse("(2 (2) (2))").unwrap();
        assert_eq!(t.depth(), 2);
        assert_eq!(t.leaf_count(), 4);
        assert_eq!(t, IndexedTree::uniform(&[2, 2]).unwrap());
        let h = IndexedTree::parse("(2 (3) (1))").unwrap();
        assert_eq!(h.leaf_count(), 4);
        assert!(IndexedTree::parse("(2 (2) ((2)))").is_err());
        assert!(IndexedTree::parse("(3 (2) (2))").is_err());
        assert!(IndexedTree::parse("(2 (2) (2 (1) (1)))").is_err());
    }

    #[test]
    fn addresses_round_trip() {
        let t = IndexedTree::uniform(&[3, 2]).unwrap();
        for v in 0..t.node_count() {
            assert_eq!(t.node_at(&t.address(v)), Some(v));
        }
        let leaf = t.leaf_nodes()[3];
        assert_eq!(t.address(leaf), vec![1, 1]);
    }

    #[test]
    fn weight_composition() {
        let w = WeightFn::new(vec![qr(1, 2), q(2)]).unwrap();
        let e = Ensemble::uniform(vec![w.clone()]).unwrap();
        assert_eq!(compose_weight(&e), w);

        let tree = IndexedTree::uniform(&[2, 2]).unwrap();
        let ws = vec![
            WeightFn::from_ints(&[2, 0]).unwrap(),
            WeightFn::from_ints(&[3, 5]).unwrap(),
            WeightFn::from_ints(&[7, 11]).unwrap(),
        ];
        let e = Ensemble::new(tree, ws).unwrap();
        assert_eq!(
            compose_weight(&e),
            WeightFn::from_ints(&[6, 10, 0, 0]).unwrap()
        );
    }

    #[test]
    fn hypergraph_composition() {
        let root = Hypergraph::new(2, [0b11]).unwrap();
        let child = Hypergraph::new(2, [0b01, 0b10]).unwrap();
        let e = Ensemble::uniform(vec![root, child]).unwrap();
        let h = compose_hypergraph(&e, DEFAULT_EDGE_BUDGET).unwrap();
        // leaves: a x = 0, a y = 1, b x = 2, b y = 3
        assert_eq!(h.edges(), &[0b0101, 0b0110, 0b1001, 0b1010]);
        assert!(compose_hypergraph(&e, 2).is_err());
    }

    #[test]
    fn boolfn_composition() {
        let or2 = named_fn("OR", Some(2)).unwrap();
        let e = Ensemble::uniform(vec![or2.clone(), or2.clone()]).unwrap();
        assert_eq!(
            compose_boolfn(&e).unwrap(),
            named_fn("OR", Some(4)).unwrap()
        );
        assert_eq!(
            compose_pair(&or2, &or2).unwrap(),
            named_fn("OR", Some(4)).unwrap()
        );
        let single = Ensemble::uniform(vec![or2.clone()]).unwrap();
        assert_eq!(compose_boolfn(&single).unwrap(), or2);
    }

    #[test]
    fn selector_composition() {
        let s = Selector::new(
            Assignment::parse("00").unwrap(),
            Assignment::parse("01").unwrap(),
        )
        .unwrap();
        let e = Ensemble::uniform(vec![s, s]).unwrap();
        let c = compose_selector(&e).unwrap();
        assert_eq!(c.alpha0, Assignment::parse("0000").unwrap());
        assert_eq!(c.alpha1, Assignment::parse("0001").unwrap());
        let or4 = named_fn("OR", Some(4)).unwrap();
        assert!(or4.is_f_compatible(&c));
    }

    proptest::proptest! {
        #[test]
        fn compose_pair_evaluates_blockwise(fs in 0u64..1 << 8, gs in 0u64..1 << 4, x in 0u64..1 << 6) {
            let f = BoolFn::from_words(3, vec![fs]).unwrap();
            let g = BoolFn::from_words(2, vec![gs]).unwrap();
            let h = compose_pair(&f, &g).unwrap();
            let outer = (0..3).fold(0u64, |acc, i| acc | (g.at(x >> (2 * i) & 3) as u64) << i);
            proptest::prop_assert_eq!(h.at(x), f.at(outer));
        }
    }
}
