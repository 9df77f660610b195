//! Hypergraphs over at most 64 indices and their packing and covering
//! numbers: `nu`, `nu^M`, `nu^w`, `nu*`, `tau`, `tau*`.

mod covering;
pub mod lp;
mod packing;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::weight::WeightFn;

pub use covering::{tau, tau_star};
pub use packing::{nu, nu_m, nu_star, nu_w};

use lp::{CoveringLp, LpSolution};

/// Search-node limit for the integral branch-and-bound solvers.
pub const DEFAULT_NODE_BUDGET: u64 = 200_000_000;

/// Hypergraphs with fewer edges skip the LP bound in the integral searches;
/// plain branch and bound is cheaper there.
pub const LP_BOUND_MIN_EDGES: usize = 16;

/// Finite family of distinct nonempty edges over indices `0..ground`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Hypergraph {
    ground: usize,
    edges: Vec<u64>,
}

/// Which packing bound a [`PackingCert`] respects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PackingKind {
    Integral,
    MFold {
        m: u32,
    },
    Fractional,
    WPacking {
        #[serde(with = "crate::rational::serde_q::vec")]
        w: Vec<Q>,
    },
}

/// Edge multiplicities of a packing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PackingCert {
    pub kind: PackingKind,
    /// Pairs `(edge mask, multiplicity)`, zero multiplicities omitted.
    pub multiplicities: Vec<(u64, Multiplicity)>,
}

/// Serializable wrapper for an exact multiplicity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Multiplicity(#[serde(with = "crate::rational::serde_q")] pub Q);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverKind {
    Integral,
    Fractional,
}

/// A (fractional) hitting set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCert {
    pub kind: CoverKind,
    pub weights: WeightFn,
}

impl Hypergraph {
    pub fn new(ground: usize, edges: impl IntoIterator<Item = u64>) -> Result<Self> {
        if ground > 64 {
            return Err(Error::Budget(format!(
                "hypergraph ground set of {ground} exceeds 64"
            )));
        }
        let full = crate::boolfn::low_mask(ground);
        let mut edges: Vec<u64> = edges.into_iter().collect();
        for &e in &edges {
            if e == 0 {
                return Err(Error::EmptyEdge);
            }
            if e & !full != 0 {
                return Err(Error::InvalidParameter(format!(
                    "edge {e:#x} outside ground set of {ground}"
                )));
            }
        }
        edges.sort_by_key(|&e| (e.count_ones(), e));
        edges.dedup();
        Ok(Hypergraph { ground, edges })
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    /// Edges sorted by size, then by mask value.
    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// The inclusion-minimal edges.
    pub fn minimal(&self) -> Hypergraph {
        let mut kept: Vec<u64> = Vec::new();
        for &e in &self.edges {
            if !kept.iter().any(|&k| k & e == k) {
                kept.push(e);
            }
        }
        Hypergraph {
            ground: self.ground,
            edges: kept,
        }
    }

    /// Whether the boolean set `mask` meets every edge.
    pub fn is_hit_by(&self, mask: u64) -> bool {
        self.edges.iter().all(|&e| e & mask != 0)
    }

    /// Whether `w(E) >= 1` for every edge.
    pub fn is_fractional_cover(&self, w: &WeightFn) -> bool {
        w.len() == self.ground && self.edges.iter().all(|&e| w.sum_over(e) >= Q::one())
    }

    /// The program `min sum w` s.t. `w(E) >= 1`; its dual is the fractional
    /// packing program.
    pub fn cover_lp(&self, cost: Vec<Q>) -> CoveringLp {
        let rows = self
            .edges
            .iter()
            .map(|&e| {
                (0..self.ground)
                    .map(|i| if e >> i & 1 == 1 { Q::one() } else { Q::zero() })
                    .collect()
            })
            .collect();
        CoveringLp {
            rows,
            rhs: vec![Q::one(); self.edges.len()],
            cost,
        }
    }

    /// One LP solve giving `tau*` and `nu*` with both certificates.
    pub fn fractional(&self) -> Result<(LpSolution, PackingCert, CoverCert)> {
        let lp = self.cover_lp(vec![Q::one(); self.ground]);
        let sol = if self.edges.is_empty() {
            LpSolution {
                value: Q::zero(),
                primal: vec![Q::zero(); self.ground],
                dual: vec![],
            }
        } else {
            lp.solve()?
        };
        let pack = PackingCert {
            kind: PackingKind::Fractional,
            multiplicities: self
                .edges
                .iter()
                .zip(&sol.dual)
                .filter(|(_, y)| !y.is_zero())
                .map(|(&e, y)| (e, Multiplicity(y.clone())))
                .collect(),
        };
        let cover = CoverCert {
            kind: CoverKind::Fractional,
            weights: WeightFn::new(sol.primal.clone())?,
        };
        Ok((sol, pack, cover))
    }
}

impl PackingCert {
    pub fn total(&self) -> Q {
        self.multiplicities.iter().map(|(_, m)| &m.0).sum()
    }

    /// Recheck the packing against `h` and return its total weight.
    pub fn validate(&self, h: &Hypergraph) -> Result<Q> {
        let n = h.ground();
        let cap: Vec<Q> = match &self.kind {
            PackingKind::Integral | PackingKind::Fractional => vec![Q::one(); n],
            PackingKind::MFold { m } => vec![q(*m as i64); n],
            PackingKind::WPacking { w } => w.clone(),
        };
        let integral = !matches!(self.kind, PackingKind::Fractional);
        let mut load = vec![Q::zero(); n];
        for (e, m) in &self.multiplicities {
            if !h.edges.contains(e) {
                return Err(Error::Certificate(format!("{e:#x} is not an edge")));
            }
            if m.0 < Q::zero() || (integral && !m.0.is_integer()) {
                return Err(Error::Certificate("bad multiplicity".into()));
            }
            for (i, l) in load.iter_mut().enumerate() {
                if e >> i & 1 == 1 {
                    *l += &m.0;
                }
            }
        }
        if load.iter().zip(&cap).any(|(l, c)| l > c) {
            return Err(Error::Certificate("packing exceeds capacity".into()));
        }
        Ok(self.total())
    }
}

impl CoverCert {
    /// Recheck the cover against `h` and return its weight.
    pub fn validate(&self, h: &Hypergraph) -> Result<Q> {
        if self.kind == CoverKind::Integral && !self.weights.is_boolean() {
            return Err(Error::Certificate("integral cover is not boolean".into()));
        }
        if !h.is_fractional_cover(&self.weights) {
            return Err(Error::Certificate("some edge is not hit".into()));
        }
        Ok(self.weights.total())
    }
}

/// Hypergraph whose edges are the stars of the complete graph `K_s`; edge
/// indices are the pairs `{a,b}` with `a < b` in lexicographic order.
pub fn k_stars(s: usize) -> Result<Hypergraph> {
    let pairs = k_pairs(s);
    let edges = (0..s).map(|v| {
        pairs
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == v || b == v)
            .fold(0u64, |m, (i, _)| m | 1 << i)
    });
    Hypergraph::new(pairs.len(), edges)
}

/// Edges of `K_s` as pairs `(a, b)`, `a < b`, in lexicographic order.
pub fn k_pairs(s: usize) -> Vec<(usize, usize)> {
    (0..s)
        .flat_map(|a| (a + 1..s).map(move |b| (a, b)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn edges_dedup_and_minimal() {
        let h = Hypergraph::new(3, [0b011, 0b001, 0b011, 0b110]).unwrap();
        assert_eq!(h.edges(), &[0b001, 0b011, 0b110]);
        assert_eq!(h.minimal().edges(), &[0b001, 0b110]);
        assert_eq!(Hypergraph::new(2, [0]), Err(Error::EmptyEdge));
        assert!(Hypergraph::new(2, [0b100]).is_err());
    }

    #[test]
    fn stars_of_k5() {
        let h = k_stars(5).unwrap();
        assert_eq!(h.ground(), 10);
        assert_eq!(h.edges().len(), 5);
        assert!(h.edges().iter().all(|e| e.count_ones() == 4));
        let (sol, pack, cover) = h.fractional().unwrap();
        assert_eq!(sol.value, qr(5, 2));
        assert_eq!(pack.validate(&h).unwrap(), qr(5, 2));
        assert_eq!(cover.validate(&h).unwrap(), qr(5, 2));
    }

    fn brute_tau(h: &Hypergraph) -> u64 {
        (0..1u64 << h.ground())
            .filter(|&m| h.is_hit_by(m))
            .map(|m| m.count_ones() as u64)
            .min()
            .unwrap()
    }

    fn brute_nu(h: &Hypergraph) -> u64 {
        let e = h.edges();
        (0..1u64 << e.len())
            .filter(|&pick| {
                let chosen: Vec<u64> = (0..e.len())
                    .filter(|&i| pick >> i & 1 == 1)
                    .map(|i| e[i])
                    .collect();
                chosen
                    .iter()
                    .enumerate()
                    .all(|(i, a)| chosen[i + 1..].iter().all(|b| a & b == 0))
            })
            .map(|pick| pick.count_ones() as u64)
            .max()
            .unwrap()
    }

    proptest::proptest! {
        #[test]
        fn packing_covering_chain(edges in proptest::collection::vec(1u64..64, 1..7)) {
            let h = Hypergraph::new(6, edges).unwrap();
            let (n, pc) = nu(&h).unwrap();
            let (ns, psc) = nu_star(&h).unwrap();
            let (ts, csc) = tau_star(&h).unwrap();
            let (t, cc) = tau(&h).unwrap();
            proptest::prop_assert_eq!(n, brute_nu(&h));
            proptest::prop_assert_eq!(t, brute_tau(&h));
            proptest::prop_assert!(q(n as i64) <= ns && ns == ts && ts <= q(t as i64));
            proptest::prop_assert_eq!(pc.validate(&h).unwrap(), q(n as i64));
            proptest::prop_assert_eq!(psc.validate(&h).unwrap(), ns);
            proptest::prop_assert_eq!(csc.validate(&h).unwrap(), ts);
            proptest::prop_assert_eq!(cc.validate(&h).unwrap(), q(t as i64));
        }
    }
}
