//! Profile vectors, profile matrices and the Pareto frontiers of profile
//! families for `s`, `C` and `C*`.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::assemblage::{minblocks, sensitive_set};
use crate::boolfn::{Assignment, BoolFn, Selector};
use crate::complimit::matrix::Mat2;
use crate::error::{Error, Result};
use crate::hypergraph::lp::CoveringLp;
use crate::hypergraph::Hypergraph;
use crate::measures::{MeasureId, EXHAUSTIVE_ARITY_CAP};
use crate::rational::{q, Q};
use crate::weight::{WeightFn, WeightSelector};

/// Weight on the 0-positions and on the 1-positions of an assignment.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ProfileVector {
    #[serde(with = "crate::rational::serde_q")]
    pub p0: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub p1: Q,
}

impl ProfileVector {
    pub fn new(p0: Q, p1: Q) -> Self {
        ProfileVector { p0, p1 }
    }

    pub fn of(x: &Assignment, w: &WeightFn) -> Result<Self> {
        if w.len() != x.arity {
            return Err(Error::ArityMismatch {
                expected: x.arity,
                got: w.len(),
            });
        }
        Ok(ProfileVector {
            p0: w.sum_over(x.zeros_mask()),
            p1: w.sum_over(x.ones_mask()),
        })
    }

    pub fn dominates(&self, other: &ProfileVector) -> bool {
        self.p0 <= other.p0 && self.p1 <= other.p1
    }

    pub fn as_point(&self) -> (Q, Q) {
        (self.p0.clone(), self.p1.clone())
    }
}

/// Rows are the profile vectors of `w^0` at `alpha^0` and `w^1` at `alpha^1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileMatrix2 {
    pub rows: [ProfileVector; 2],
    pub selector: Selector,
}

impl ProfileMatrix2 {
    pub fn new(sel: &Selector, ws: &WeightSelector) -> Result<Self> {
        Ok(ProfileMatrix2 {
            rows: [
                ProfileVector::of(&sel.alpha0, &ws.w0)?,
                ProfileVector::of(&sel.alpha1, &ws.w1)?,
            ],
            selector: *sel,
        })
    }

    pub fn matrix(&self) -> Mat2 {
        let [r0, r1] = &self.rows;
        Mat2 {
            a: r0.p0.clone(),
            b: r0.p1.clone(),
            c: r1.p0.clone(),
            d: r1.p1.clone(),
        }
    }
}

/// Pareto frontier of the profile family of `f` at `x`. For `s` and `C` the
/// points are all Pareto-minimal profiles; for `C*` they are the vertices of
/// the lower-left boundary of the projected witness polytope. Points are
/// sorted by increasing `p1`, hence strictly decreasing `p0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct ProfileFamily {
    pub measure: MeasureId,
    pub x: Assignment,
    pub points: Vec<ProfileVector>,
}

impl ProfileFamily {
    /// Whether `p` dominates some frontier point (for `C*`, some point of the
    /// polyline between consecutive vertices).
    pub fn is_dominated_by(&self, p: &ProfileVector) -> bool {
        if self.points.iter().any(|v| v.dominates(p)) {
            return true;
        }
        if self.measure != MeasureId::CStar {
            return false;
        }
        self.points.windows(2).any(|w| {
            // lies on or above the segment inside its p1-range
            let (a, b) = (&w[0], &w[1]);
            if p.p1 < a.p1 || p.p1 > b.p1 {
                return false;
            }
            let lhs = (&p.p0 - &b.p0) * (&b.p1 - &a.p1);
            let rhs = (&a.p0 - &b.p0) * (&b.p1 - &p.p1);
            lhs >= rhs
        })
    }
}

/// Keep the Pareto-minimal points, sorted by increasing `p1`.
pub fn pareto(mut pts: Vec<ProfileVector>) -> Vec<ProfileVector> {
    pts.sort_by(|a, b| a.p1.cmp(&b.p1).then(a.p0.cmp(&b.p0)));
    let mut out: Vec<ProfileVector> = Vec::new();
    for p in pts {
        if out.last().is_none_or(|l| p.p0 < l.p0) {
            out.push(p);
        }
    }
    out
}

pub fn profile_family(f: &BoolFn, x: &Assignment, m: MeasureId) -> Result<ProfileFamily> {
    if f.is_constant() {
        return Err(Error::ConstantFunction(
            "profile families need non-constant f".into(),
        ));
    }
    let points = match m {
        MeasureId::S => {
            let s = sensitive_set(f, x)?;
            vec![ProfileVector::new(
                q((s.mask & x.zeros_mask()).count_ones() as i64),
                q((s.mask & x.ones_mask()).count_ones() as i64),
            )]
        }
        MeasureId::C => integral_frontier(&minblocks(f, x)?.blocks, x)?,
        MeasureId::CStar => fractional_frontier(&minblocks(f, x)?.blocks, x)?,
        _ => {
            return Err(Error::InvalidParameter(format!(
                "{m} has no well-behaved assemblage"
            )))
        }
    };
    Ok(ProfileFamily {
        measure: m,
        x: *x,
        points,
    })
}

/// Pareto-minimal `(|S & zeros|, |S & ones|)` over hitting sets `S`.
///
/// `S` is a hitting set iff its complement contains no edge; containment of
/// an edge is propagated upward over all subsets in one pass.
fn integral_frontier(h: &Hypergraph, x: &Assignment) -> Result<Vec<ProfileVector>> {
    let n = h.ground();
    if n > EXHAUSTIVE_ARITY_CAP {
        return Err(Error::Budget(format!(
            "hitting-set profiles over {n} indices"
        )));
    }
    let full = (1u64 << n) - 1;
    let mut contains = vec![false; 1usize << n];
    for &e in h.edges() {
        contains[e as usize] = true;
    }
    for i in 0..n {
        let bit = 1usize << i;
        for u in 0..contains.len() {
            if u & bit != 0 && contains[u ^ bit] {
                contains[u] = true;
            }
        }
    }
    let (zm, om) = (x.zeros_mask(), x.ones_mask());
    let ones = om.count_ones() as usize;
    let mut best = vec![u32::MAX; ones + 1];
    for s in 0..=full {
        if !contains[(full ^ s) as usize] {
            let k = (s & om).count_ones() as usize;
            best[k] = best[k].min((s & zm).count_ones());
        }
    }
    Ok(pareto(
        best.iter()
            .enumerate()
            .filter(|(_, &z)| z != u32::MAX)
            .map(|(k, &z)| ProfileVector::new(q(z as i64), q(k as i64)))
            .collect(),
    ))
}

/// Exact lower-left boundary of `{(w(zeros), w(ones)) : w fractional cover}`.
///
/// The two endpoints come from lexicographic LPs; between adjacent boundary
/// points the LP is minimized along the chord normal until no point lies
/// strictly below the chord.
fn fractional_frontier(h: &Hypergraph, x: &Assignment) -> Result<Vec<ProfileVector>> {
    let n = h.ground();
    if h.is_empty() {
        return Err(Error::ConstantFunction("no blocks at this input".into()));
    }
    let (zm, om) = (x.zeros_mask(), x.ones_mask());
    let side = |i: usize| om >> i & 1 == 1;
    let cost = |alpha: &Q, beta: &Q| -> Vec<Q> {
        (0..n)
            .map(|i| if side(i) { beta.clone() } else { alpha.clone() })
            .collect()
    };
    let profile = |w: &[Q]| -> ProfileVector {
        let sum = |m: u64| -> Q { (0..n).filter(|i| m >> i & 1 == 1).map(|i| &w[i]).sum() };
        ProfileVector::new(sum(zm), sum(om))
    };
    let solve = |lp: &CoveringLp| -> Result<ProfileVector> {
        let sol = lp.solve()?;
        lp.verify(&sol)?;
        Ok(profile(&sol.primal))
    };
    // minimize one side, then the other with the first held at its optimum
    let lex = |first_ones: bool| -> Result<ProfileVector> {
        let (a, b) = if first_ones {
            (Q::zero(), Q::one())
        } else {
            (Q::one(), Q::zero())
        };
        let mut lp = h.cover_lp(cost(&a, &b));
        let v = solve(&lp)?;
        let bound = if first_ones {
            v.p1.clone()
        } else {
            v.p0.clone()
        };
        lp.rows.push(
            (0..n)
                .map(|i| {
                    if side(i) == first_ones {
                        -Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect(),
        );
        lp.rhs.push(-bound);
        lp.cost = cost(&b, &a);
        solve(&lp)
    };
    let low_p1 = lex(true)?;
    let low_p0 = lex(false)?;
    let mut out = vec![low_p1.clone()];
    if low_p0 != low_p1 {
        let mut stack = vec![(low_p1, low_p0.clone())];
        while let Some((p, r)) = stack.pop() {
            let alpha = &r.p1 - &p.p1;
            let beta = &p.p0 - &r.p0;
            let chord = &alpha * &p.p0 + &beta * &p.p1;
            let mid = solve(&h.cover_lp(cost(&alpha, &beta)))?;
            if &alpha * &mid.p0 + &beta * &mid.p1 < chord {
                stack.push((mid.clone(), r));
                stack.push((p, mid.clone()));
                out.push(mid);
            }
        }
        out.push(low_p0);
    }
    Ok(convex_vertices(pareto(out)))
}

/// Drop points lying on the segment between their neighbors.
fn convex_vertices(pts: Vec<ProfileVector>) -> Vec<ProfileVector> {
    let mut out: Vec<ProfileVector> = Vec::with_capacity(pts.len());
    for p in pts {
        while out.len() >= 2 {
            let (a, b) = (&out[out.len() - 2], &out[out.len() - 1]);
            // b is redundant when it is not strictly below segment a-p
            let cross = (&b.p1 - &a.p1) * (&p.p0 - &a.p0) - (&b.p0 - &a.p0) * (&p.p1 - &a.p1);
            if cross.is_zero() || cross < Q::zero() {
                out.pop();
            } else {
                break;
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::named_fn;

    fn pts(v: &[(i64, i64)]) -> Vec<ProfileVector> {
        v.iter()
            .map(|&(a, b)| ProfileVector::new(q(a), q(b)))
            .collect()
    }

    #[test]
    fn nand_families() {
        for n in 2..=5 {
            let f = named_fn("NAND", Some(n)).unwrap();
            let fam = profile_family(&f, &Assignment::ones(n), MeasureId::C).unwrap();
            assert_eq!(fam.points, pts(&[(0, n as i64)]));
            let x = Assignment::new(n, ((1u64 << n) - 1) ^ 1).unwrap();
            let fam = profile_family(&f, &x, MeasureId::C).unwrap();
            assert!(fam.points.contains(&ProfileVector::new(q(1), q(0))));
        }
    }

    #[test]
    fn or2_fractional_frontier() {
        let f = named_fn("OR", Some(2)).unwrap();
        let fam = profile_family(&f, &Assignment::zeros(2), MeasureId::CStar).unwrap();
        assert_eq!(fam.points, pts(&[(2, 0)]));
        let fam = profile_family(&f, &Assignment::ones(2), MeasureId::CStar).unwrap();
        assert_eq!(fam.points, pts(&[(0, 1)]));
    }

    #[test]
    fn pareto_and_hull_helpers() {
        assert_eq!(
            pareto(pts(&[(3, 0), (1, 1), (2, 1), (0, 3), (0, 4)])),
            pts(&[(3, 0), (1, 1), (0, 3)])
        );
        assert_eq!(
            convex_vertices(pts(&[(2, 0), (1, 1), (0, 2)])),
            pts(&[(2, 0), (0, 2)])
        );
        assert_eq!(
            convex_vertices(pts(&[(4, 0), (1, 1), (0, 4)])),
            pts(&[(4, 0), (1, 1), (0, 4)])
        );
    }

    #[test]
    fn frontier_contains_integral_profiles() {
        // every integral profile dominates a point of the fractional polyline
        let f = crate::bublitz();
        for x in 0..64 {
            let a = Assignment::new(6, x).unwrap();
            let c = profile_family(&f, &a, MeasureId::C).unwrap();
            let cs = profile_family(&f, &a, MeasureId::CStar).unwrap();
            for p in &c.points {
                assert!(cs.is_dominated_by(p), "x={a} p={p:?}");
            }
            let w = cs
                .points
                .windows(2)
                .all(|w| w[0].p0 > w[1].p0 && w[0].p1 < w[1].p1);
            assert!(w);
        }
    }
}
