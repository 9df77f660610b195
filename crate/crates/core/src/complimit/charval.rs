//! Characteristic values: the max over compatible selectors of the min
//! spectral radius over the profile-matrix family.

use std::collections::HashMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::{Assignment, BoolFn, Selector};
use crate::complimit::matrix::Mat2;
use crate::complimit::profile::{profile_family, ProfileFamily, ProfileVector};
use crate::error::{Error, Result};
use crate::measures::{MeasureId, EXHAUSTIVE_ARITY_CAP};
use crate::rational::{q, q_pow10_neg, Surd, Q};

/// Default bisection width.
pub fn default_tol() -> Q {
    q_pow10_neg(9)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharVal {
    pub measure: MeasureId,
    /// Bisection interval from the feasibility oracle; contains `exact`.
    #[serde(with = "crate::rational::serde_q")]
    pub lo: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub hi: Q,
    /// Closed form `a + b sqrt(d)` of the value.
    pub exact: Surd,
    pub selector: Selector,
    /// Minimizing profile matrix at the achieving selector.
    pub matrix: Mat2,
    pub frontier0: Vec<ProfileVector>,
    pub frontier1: Vec<ProfileVector>,
    /// Distinct profile families on each side.
    pub families: (usize, usize),
    /// Family pairs attaining the maximum (ties are broken toward the
    /// numerically least `(alpha0, alpha1)`).
    pub tied_pairs: usize,
    /// Inputs whose families were computed, after symmetry reduction.
    pub inputs_examined: usize,
}

impl CharVal {
    pub fn to_f64(&self) -> f64 {
        self.exact.to_f64()
    }
}

/// Whether some `t > 0` (in the closure) satisfies `g0(t) <= lambda` and
/// `h1(t) <= lambda t` with `g0(t) = min (a + b t)` over `f0` and
/// `h1(t) = min (c + d t)` over `f1`.
///
/// `g0(t) <= lambda` holds iff `t <= r(u) = (lambda - a) / b` for some
/// `u = (a, b)`, and `h1(t) <= lambda t` iff `t >= s(v) = c / (lambda - d)`
/// for some `v = (c, d)`, so feasibility is `min s <= max r`. Boundary
/// cases are closed in `lambda`: a reducible pair with `rho = lambda` has
/// its eigenvector at `t = 0` or `t = infinity`, and counts as feasible.
pub fn feasible(f0: &[ProfileVector], f1: &[ProfileVector], lambda: &Q) -> bool {
    // None means +infinity for r
    let mut max_r: Option<Option<Q>> = None;
    for u in f0 {
        if u.p0 > *lambda {
            continue;
        }
        let r = if u.p1.is_zero() {
            None
        } else {
            Some((lambda - &u.p0) / &u.p1)
        };
        max_r = Some(match (max_r, r) {
            (None, r) => r,
            (Some(None), _) | (_, None) => None,
            (Some(Some(a)), Some(b)) => Some(a.max(b)),
        });
    }
    let Some(max_r) = max_r else { return false };
    // None means +infinity for s, approached only as t grows without bound
    let mut min_s: Option<Option<Q>> = None;
    for v in f1 {
        let s = if v.p1 < *lambda {
            Some(&v.p0 / (lambda - &v.p1))
        } else if v.p1 == *lambda {
            (v.p0.is_zero()).then(Q::zero)
        } else {
            continue;
        };
        min_s = Some(match (min_s, s) {
            (None, s) | (Some(None), s) => s,
            (Some(s), None) => s,
            (Some(Some(a)), Some(b)) => Some(a.min(b)),
        });
    }
    match (min_s, max_r) {
        (None, _) => false,
        (Some(_), None) => true,
        (Some(None), Some(_)) => false,
        (Some(Some(s)), Some(r)) => s <= r,
    }
}

/// Bisect `min rho` over the two frontiers to width `tol` with the exact
/// oracle. Returns `(lo, hi)` with the oracle false at `lo` (unless `lo` is
/// zero) and true at `hi`.
pub fn bisect(f0: &[ProfileVector], f1: &[ProfileVector], tol: &Q) -> (Q, Q) {
    let row_min = |f: &[ProfileVector]| {
        f.iter()
            .map(|p| &p.p0 + &p.p1)
            .min()
            .unwrap_or_else(Q::zero)
    };
    // at t = 1 both constraints hold once lambda covers the smallest row sums
    let mut hi = row_min(f0).max(row_min(f1));
    let mut lo = Q::zero();
    if feasible(f0, f1, &lo) {
        return (lo.clone(), lo);
    }
    let two = q(2);
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        if feasible(f0, f1, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Exact minimum of `rho` over frontier pairs, with the minimizing matrix.
///
/// For the fractional polyline the minimum over the whole polygon is
/// attained at vertices: if a convex combination of rows satisfies
/// `Mz <= lambda z` for some `z > 0` then so does one vertex on each side.
pub fn min_rho(f0: &[ProfileVector], f1: &[ProfileVector]) -> Result<(Surd, Mat2)> {
    let mut best: Option<(Surd, Mat2)> = None;
    for u in f0 {
        for v in f1 {
            let m = Mat2::from_rows((&u.p0, &u.p1), (&v.p0, &v.p1))?;
            if best.as_ref().is_some_and(|(_, bm)| bm.entrywise_le(&m)) {
                continue;
            }
            let r = m.rho();
            if best.as_ref().is_none_or(|(b, _)| r < *b) {
                best = Some((r, m));
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("empty profile family".into()))
}

pub fn charval_selector(f: &BoolFn, sel: &Selector, m: MeasureId, tol: &Q) -> Result<CharVal> {
    check(f, m, tol)?;
    if !f.is_f_compatible(sel) {
        return Err(Error::IncompatibleSelector);
    }
    let f0 = profile_family(f, &sel.alpha0, m)?;
    let f1 = profile_family(f, &sel.alpha1, m)?;
    let (exact, matrix) = min_rho(&f0.points, &f1.points)?;
    finish(m, exact, matrix, *sel, f0, f1, (1, 1), 1, 2, tol)
}

fn check(f: &BoolFn, m: MeasureId, tol: &Q) -> Result<()> {
    if !matches!(m, MeasureId::S | MeasureId::C | MeasureId::CStar) {
        return Err(Error::InvalidParameter(format!(
            "{m} has no characteristic value"
        )));
    }
    if f.is_constant() {
        return Err(Error::ConstantFunction(
            "characteristic value of a constant".into(),
        ));
    }
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn finish(
    m: MeasureId,
    exact: Surd,
    matrix: Mat2,
    selector: Selector,
    f0: ProfileFamily,
    f1: ProfileFamily,
    families: (usize, usize),
    tied_pairs: usize,
    inputs_examined: usize,
    tol: &Q,
) -> Result<CharVal> {
    let (lo, hi) = bisect(&f0.points, &f1.points, tol);
    if exact.cmp_q(&lo).is_lt() || exact.cmp_q(&hi).is_gt() {
        return Err(Error::Certificate(format!(
            "bisection [{lo}, {hi}] misses the exact value {exact}"
        )));
    }
    if !matrix.rho_le(&hi) {
        return Err(Error::Certificate(
            "achieving matrix exceeds the upper end".into(),
        ));
    }
    Ok(CharVal {
        measure: m,
        lo,
        hi,
        exact,
        selector,
        matrix,
        frontier0: f0.points,
        frontier1: f1.points,
        families,
        tied_pairs,
        inputs_examined,
    })
}

/// Index classes under which `f` is symmetric: `i` and `j` share a class
/// when the transposition `(i j)` leaves `f` invariant, closed transitively.
pub fn symmetry_classes(f: &BoolFn) -> Vec<u64> {
    let n = f.arity();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if find(&mut parent, i) != find(&mut parent, j) && f.invariant_under_swap(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[b] = a;
            }
        }
    }
    let mut classes: Vec<u64> = Vec::new();
    let mut slot = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = classes.len();
            classes.push(0);
        }
        classes[slot[r]] |= 1 << i;
    }
    classes
}

/// Least member of the orbit of `x`: within each class, ones on the lowest
/// indices.
pub fn canonical_input(x: u64, classes: &[u64]) -> u64 {
    let mut out = 0;
    for &c in classes {
        let mut k = (x & c).count_ones();
        let mut rest = c;
        while k > 0 {
            let low = rest & rest.wrapping_neg();
            out |= low;
            rest ^= low;
            k -= 1;
        }
    }
    out
}

/// `m-hat(f)` over all compatible selectors. Families are computed once per
/// symmetry orbit and deduplicated by their exact frontier, so the pair loop
/// runs over distinct families only.
pub fn charval(f: &BoolFn, m: MeasureId, tol: &Q) -> Result<CharVal> {
    check(f, m, tol)?;
    let n = f.arity();
    if n > EXHAUSTIVE_ARITY_CAP {
        return Err(Error::Budget(format!("characteristic value at arity {n}")));
    }
    let classes = symmetry_classes(f);
    let reps: Vec<u64> = (0..1u64 << n)
        .filter(|&x| canonical_input(x, &classes) == x)
        .collect();
    let fams: Vec<ProfileFamily> = reps
        .par_iter()
        .map(|&x| profile_family(f, &Assignment { arity: n, bits: x }, m))
        .collect::<Result<_>>()?;
    let mut sides: [Vec<ProfileFamily>; 2] = [Vec::new(), Vec::new()];
    let mut seen: [HashMap<Vec<ProfileVector>, ()>; 2] = [HashMap::new(), HashMap::new()];
    for fam in fams {
        let side = f.at(fam.x.bits) as usize;
        if seen[side].insert(fam.points.clone(), ()).is_none() {
            sides[side].push(fam);
        }
    }
    let [zeros, ones] = sides;
    // per 0-family: best over 1-families, smallest index on ties
    let per: Vec<(Surd, usize, Mat2, usize)> = zeros
        .par_iter()
        .map(|f0| {
            let mut best: Option<(Surd, usize, Mat2, usize)> = None;
            for (j, f1) in ones.iter().enumerate() {
                let (r, mat) = min_rho(&f0.points, &f1.points)?;
                match &mut best {
                    Some((b, _, _, ties)) if r == *b => *ties += 1,
                    Some((b, ..)) if r < *b => {}
                    _ => best = Some((r, j, mat, 1)),
                }
            }
            best.ok_or(Error::ConstantFunction("no accepting input".into()))
        })
        .collect::<Result<_>>()?;
    let mut best: Option<(usize, Surd, usize, Mat2, usize)> = None;
    for (i, (r, j, mat, ties)) in per.into_iter().enumerate() {
        match &mut best {
            Some((_, b, _, _, t)) if r == *b => *t += ties,
            Some((_, b, ..)) if r < *b => {}
            _ => best = Some((i, r, j, mat, ties)),
        }
    }
    let (i, exact, j, matrix, ties) =
        best.ok_or(Error::ConstantFunction("no rejecting input".into()))?;
    let families = (zeros.len(), ones.len());
    let f0 = zeros[i].clone();
    let f1 = ones[j].clone();
    let sel = Selector::new(f0.x, f1.x)?;
    finish(
        m,
        exact,
        matrix,
        sel,
        f0,
        f1,
        families,
        ties,
        reps.len(),
        tol,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::named_fn;
    use crate::rational::qr;

    #[test]
    fn nand_selector_from_example() {
        for n in 2..=5usize {
            let f = named_fn("NAND", Some(n)).unwrap();
            let sel = Selector::new(
                Assignment::ones(n),
                Assignment::new(n, ((1u64 << n) - 1) ^ 1).unwrap(),
            )
            .unwrap();
            let cv = charval_selector(&f, &sel, MeasureId::C, &default_tol()).unwrap();
            assert_eq!(cv.exact, Surd::new(q(0), q(1), q(n as i64)));
            assert!(&cv.hi - &cv.lo <= default_tol());
        }
    }

    #[test]
    fn incompatible_selector_rejected() {
        let f = named_fn("AND", Some(2)).unwrap();
        let sel = Selector::new(Assignment::ones(2), Assignment::zeros(2)).unwrap();
        assert!(matches!(
            charval_selector(&f, &sel, MeasureId::C, &default_tol()),
            Err(Error::IncompatibleSelector)
        ));
        assert!(charval(&f, MeasureId::Bs, &default_tol()).is_err());
    }

    #[test]
    fn oracle_matches_pairwise_thresholds() {
        use rand::{RngExt, SeedableRng};
        let mut g = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let pts = |g: &mut rand_chacha::ChaCha8Rng| -> Vec<ProfileVector> {
                (0..g.random_range(1..4))
                    .map(|_| ProfileVector::new(q(g.random_range(0..5)), q(g.random_range(0..5))))
                    .collect()
            };
            let (f0, f1) = (pts(&mut g), pts(&mut g));
            let lambda = qr(g.random_range(0..60), 7);
            let pairwise = f0.iter().any(|u| {
                f1.iter().any(|v| {
                    Mat2::from_rows((&u.p0, &u.p1), (&v.p0, &v.p1))
                        .unwrap()
                        .rho_le(&lambda)
                })
            });
            assert_eq!(feasible(&f0, &f1, &lambda), pairwise);
        }
    }

    #[test]
    fn symmetry_orbits() {
        let f = named_fn("MAJ", Some(3)).unwrap();
        assert_eq!(symmetry_classes(&f), vec![0b111]);
        assert_eq!(canonical_input(0b110, &[0b111]), 0b011);
        let b = crate::bublitz();
        assert_eq!(
            canonical_input(0b101, &symmetry_classes(&b)).count_ones(),
            2
        );
    }

    #[test]
    fn parity_sensitivity_value() {
        let f = named_fn("PARITY", Some(3)).unwrap();
        let cv = charval(&f, MeasureId::S, &default_tol()).unwrap();
        assert_eq!(cv.exact.as_rational(), Some(&q(3)));
    }
}
