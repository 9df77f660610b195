//! Nonnegative 2x2 rational matrices and their spectral radii.

use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, q_pow10_neg, q_to_f64, qr, Surd, Q};

/// The matrix `[[a, b], [c, d]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Mat2 {
    #[serde(with = "crate::rational::serde_q")]
    pub a: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub d: Q,
}

impl Mat2 {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Result<Self> {
        if [&a, &b, &c, &d].iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidParameter("negative matrix entry".into()));
        }
        Ok(Mat2 { a, b, c, d })
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(q(a), q(b), q(c), q(d))
    }

    /// Matrix with rows `u` and `v`.
    pub fn from_rows(u: (&Q, &Q), v: (&Q, &Q)) -> Result<Self> {
        Self::new(u.0.clone(), u.1.clone(), v.0.clone(), v.1.clone())
    }

    pub fn identity() -> Self {
        Mat2 {
            a: Q::one(),
            b: Q::zero(),
            c: Q::zero(),
            d: Q::one(),
        }
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
    }

    pub fn pow(&self, k: u32) -> Mat2 {
        let mut acc = Mat2::identity();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Entrywise `self <= other`, which implies `rho(self) <= rho(other)`.
    pub fn entrywise_le(&self, o: &Mat2) -> bool {
        self.a <= o.a && self.b <= o.b && self.c <= o.c && self.d <= o.d
    }

    /// Maximum row sum.
    pub fn norm_inf(&self) -> Q {
        (&self.a + &self.b).max(&self.c + &self.d)
    }

    pub fn row_sums(&self) -> (Q, Q) {
        (&self.a + &self.b, &self.c + &self.d)
    }

    /// First row of `self`, second row of `other`.
    pub fn row_mix(&self, other: &Mat2) -> Mat2 {
        Mat2 {
            a: self.a.clone(),
            b: self.b.clone(),
            c: other.c.clone(),
            d: other.d.clone(),
        }
    }

    /// `((a+d) + sqrt((a-d)^2 + 4bc)) / 2`, exactly.
    pub fn rho(&self) -> Surd {
        let diff = &self.a - &self.d;
        let disc = &diff * &diff + q(4) * &self.b * &self.c;
        Surd::new((&self.a + &self.d) / q(2), qr(1, 2), disc)
    }

    pub fn rho_f64(&self) -> f64 {
        let (a, b, c, d) = (
            q_to_f64(&self.a),
            q_to_f64(&self.b),
            q_to_f64(&self.c),
            q_to_f64(&self.d),
        );
        ((a + d) + ((a - d) * (a - d) + 4.0 * b * c).sqrt()) / 2.0
    }

    /// `rho <= lambda` iff `a <= lambda`, `d <= lambda` and
    /// `(lambda - a)(lambda - d) >= bc`.
    pub fn rho_le(&self, lambda: &Q) -> bool {
        self.a <= *lambda
            && self.d <= *lambda
            && (lambda - &self.a) * (lambda - &self.d) >= &self.b * &self.c
    }

    /// Strict version of [`Self::rho_le`].
    pub fn rho_lt(&self, lambda: &Q) -> bool {
        self.a < *lambda
            && self.d < *lambda
            && (lambda - &self.a) * (lambda - &self.d) > &self.b * &self.c
    }

    pub fn rho_ge(&self, lambda: &Q) -> bool {
        !self.rho_lt(lambda)
    }
}

/// The two checked items of the 2x2 Perron-Frobenius facts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatrixFactsReport {
    pub matrix: Mat2,
    pub rho: f64,
    #[serde(with = "crate::rational::serde_q")]
    pub norm_inf: Q,
    /// `||A||_inf >= rho(A) / 2`, decided exactly.
    pub norm_bound_holds: bool,
    pub power: u32,
    /// `||A^k||_inf^(1/k)` at `k = power`.
    pub power_estimate: f64,
    /// `|estimate - rho| <= 0.05 max(1, rho)`.
    pub power_limit_holds: bool,
}

pub fn matrix_facts_check(m: &Mat2) -> MatrixFactsReport {
    const K: u32 = 32;
    let norm = m.norm_inf();
    let norm_bound = m.rho_le(&(&norm * q(2)));
    let pk = m.pow(K).norm_inf();
    let estimate = if pk.is_zero() {
        0.0
    } else {
        (ln_q(&pk) / K as f64).exp()
    };
    let rho = m.rho_f64();
    MatrixFactsReport {
        matrix: m.clone(),
        rho,
        norm_inf: norm,
        norm_bound_holds: norm_bound,
        power: K,
        power_estimate: estimate,
        power_limit_holds: (estimate - rho).abs() <= 0.05 * rho.max(1.0),
    }
}

/// Natural log of a positive rational without overflowing `f64`.
fn ln_q(x: &Q) -> f64 {
    let ln_big = |n: &num_bigint::BigInt| {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().expect("finite").ln()
        } else {
            let shift = bits - 900;
            (n >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(x.numer()) - ln_big(x.denom())
}

/// Outcome of the super-multiplicativity lemma on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SupermultReport {
    pub k: usize,
    /// `rho(M_ij) >= lambda` for all row mixes.
    pub hypothesis: bool,
    /// `rho(M_1 ... M_k) >= lambda^k`.
    pub conclusion: bool,
}

/// Check the hypothesis over all row mixes `M_ij`, then the conclusion on
/// the product, both exactly.
pub fn supermult_property(ms: &[Mat2], lambda: &Q) -> Result<SupermultReport> {
    if ms.is_empty() || lambda.is_negative() {
        return Err(Error::InvalidParameter(
            "need k >= 1 and lambda >= 0".into(),
        ));
    }
    let hypothesis = ms
        .iter()
        .all(|mi| ms.iter().all(|mj| mi.row_mix(mj).rho_ge(lambda)));
    let prod = ms.iter().fold(Mat2::identity(), |acc, m| acc.mul(m));
    let target = num_traits::pow(lambda.clone(), ms.len());
    Ok(SupermultReport {
        k: ms.len(),
        hypothesis,
        conclusion: prod.rho_ge(&target),
    })
}

/// A point `(p0, p1)`.
pub type Point = (Q, Q);

/// Frontier pair `(0-side, 1-side)` of one level.
pub type FrontierPair = (Vec<Point>, Vec<Point>);

/// Rows chosen by the sub-multiplicativity construction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubmultReport {
    pub k: usize,
    pub hypothesis: bool,
    pub chosen: Vec<Mat2>,
    #[serde(with = "crate::rational::serde_q")]
    pub t: Q,
    /// `rho(M_i ... M_j) <= lambda'^(j-i+1)` for all `i <= j`, exactly, with
    /// `lambda' = lambda + 1e-12`.
    pub interval_products: bool,
    /// The product is entrywise at most
    /// `[[lambda^k, n k lambda^(k-1)], [n k lambda^(k-1), lambda^k]]`, up to
    /// `1e-9`.
    pub entrywise_bound: bool,
    /// `||M_1 ... M_k||_inf <= lambda^k + n k lambda^(k-1) + 1e-9`, which
    /// follows from the entrywise bound.
    pub norm_bound: bool,
    /// `||M_1 ... M_k||_inf <= n k lambda^(k-1)` without the diagonal term;
    /// reported, not asserted, since it fails already for `k = 1`.
    pub bare_norm_bound: bool,
    pub norm_value: f64,
    pub norm_limit: f64,
}

impl SubmultReport {
    pub fn holds(&self) -> bool {
        !self.hypothesis || (self.interval_products && self.entrywise_bound && self.norm_bound)
    }
}

enum Upper {
    Inf,
    At(Q),
    Empty,
}

/// For each `i` pick `u_i` in `U_i` with the weakest constraint
/// `u1 + u2 t <= lambda'` and `v_i` in `V_i` with the weakest constraint
/// `v1 + v2 t <= lambda' t`, then one `t > 0` satisfying all of them.
pub fn submult_property(frontiers: &[FrontierPair], lambda: &Q) -> Result<SubmultReport> {
    let k = frontiers.len();
    if k == 0 || frontiers.iter().any(|(u, v)| u.is_empty() || v.is_empty()) {
        return Err(Error::InvalidParameter("empty point sets".into()));
    }
    let hypothesis = frontiers.iter().all(|(ui, _)| {
        frontiers.iter().all(|(_, vj)| {
            ui.iter().any(|u| {
                vj.iter().any(|v| {
                    Mat2::from_rows((&u.0, &u.1), (&v.0, &v.1)).is_ok_and(|m| m.rho_le(lambda))
                })
            })
        })
    });
    let lp = lambda + q_pow10_neg(12);
    // r(u) = (lambda' - u1) / u2: the constraint is t <= r(u)
    let r = |u: &Point| -> Upper {
        if u.0 > lp {
            Upper::Empty
        } else if u.1.is_zero() {
            Upper::Inf
        } else {
            Upper::At((&lp - &u.0) / &u.1)
        }
    };
    // s(v) = v1 / (lambda' - v2): the constraint is t >= s(v)
    let s = |v: &Point| -> Option<Q> {
        if v.1 < lp {
            Some(&v.0 / (&lp - &v.1))
        } else if v.0.is_zero() && v.1 == lp {
            Some(Q::zero())
        } else {
            None
        }
    };
    let better_upper = |a: &Upper, b: &Upper| match (a, b) {
        (Upper::Inf, Upper::Inf) | (Upper::Empty, _) => false,
        (Upper::Inf, _) => true,
        (Upper::At(_), Upper::Inf) => false,
        (Upper::At(x), Upper::At(y)) => x > y,
        (Upper::At(_), Upper::Empty) => true,
    };
    let mut chosen = Vec::with_capacity(k);
    let mut t_lo = Q::zero();
    let mut t_hi: Option<Q> = None;
    let mut feasible = true;
    for (us, vs) in frontiers {
        let mut bu = 0;
        for i in 1..us.len() {
            if better_upper(&r(&us[i]), &r(&us[bu])) {
                bu = i;
            }
        }
        let mut bv = 0;
        for j in 1..vs.len() {
            let (a, b) = (s(&vs[j]), s(&vs[bv]));
            if match (&a, &b) {
                (Some(x), Some(y)) => x < y,
                (Some(_), None) => true,
                _ => false,
            } {
                bv = j;
            }
        }
        match r(&us[bu]) {
            Upper::Empty => feasible = false,
            Upper::Inf => {}
            Upper::At(x) => {
                if t_hi.as_ref().is_none_or(|h| x < *h) {
                    t_hi = Some(x);
                }
            }
        }
        match s(&vs[bv]) {
            None => feasible = false,
            Some(x) => {
                if x > t_lo {
                    t_lo = x;
                }
            }
        }
        let (u, v) = (&us[bu], &vs[bv]);
        chosen.push(Mat2::from_rows((&u.0, &u.1), (&v.0, &v.1))?);
    }
    let t = if !t_lo.is_zero() {
        t_lo.clone()
    } else {
        t_hi.clone().map_or(Q::one(), |h| h.min(Q::one()))
    };
    if t.is_zero() || t_hi.as_ref().is_some_and(|h| *h < t) {
        feasible = false;
    }
    let mut interval_products = feasible;
    if feasible {
        'outer: for i in 0..k {
            let mut prod = Mat2::identity();
            for (len, m) in chosen[i..].iter().enumerate() {
                prod = prod.mul(m);
                if !prod.rho_le(&num_traits::pow(lp.clone(), len + 1)) {
                    interval_products = false;
                    break 'outer;
                }
            }
        }
    }
    let n_bound = frontiers
        .iter()
        .flat_map(|(u, v)| u.iter().chain(v))
        .flat_map(|p| [p.0.clone(), p.1.clone()])
        .max()
        .unwrap_or_else(Q::zero);
    let prod = chosen.iter().fold(Mat2::identity(), |acc, m| acc.mul(m));
    let tol = q_pow10_neg(9);
    let off = n_bound * q(k as i64) * num_traits::pow(lambda.clone(), k - 1);
    let diag = num_traits::pow(lambda.clone(), k);
    let entrywise_bound = prod.a <= &diag + &tol
        && prod.d <= &diag + &tol
        && prod.b <= &off + &tol
        && prod.c <= &off + &tol;
    let limit = &diag + &off;
    let norm = prod.norm_inf();
    Ok(SubmultReport {
        k,
        hypothesis,
        chosen,
        t,
        interval_products,
        entrywise_bound,
        norm_bound: norm <= &limit + &tol,
        bare_norm_bound: norm <= &off + &tol,
        norm_value: q_to_f64(&norm),
        norm_limit: q_to_f64(&limit),
    })
}

/// Random matrix with entries in `0..=max`.
pub fn random_matrix(g: &mut ChaCha8Rng, max: i64) -> Mat2 {
    let mut e = || q(g.random_range(0..=max));
    Mat2 {
        a: e(),
        b: e(),
        c: e(),
        d: e(),
    }
}

/// Seeded instance of the super-multiplicativity hypothesis: random
/// matrices and `lambda` a rational lower bound of the smallest `rho(M_ij)`.
pub fn supermult_instance(seed: u64, k: usize) -> (Vec<Mat2>, Q) {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let ms: Vec<Mat2> = (0..k).map(|_| random_matrix(&mut g, 6)).collect();
    let min_rho = ms
        .iter()
        .flat_map(|mi| ms.iter().map(move |mj| mi.row_mix(mj).rho()))
        .min()
        .expect("k >= 1");
    let (lo, _) = min_rho.bracket(&q_pow10_neg(9));
    (ms, lo.max(Q::zero()))
}

/// Seeded instance of the sub-multiplicativity hypothesis: random point
/// sets and `lambda` a rational upper bound of the largest pairwise
/// `min rho`.
pub fn submult_instance(seed: u64, k: usize) -> (Vec<FrontierPair>, Q) {
    let mut g = ChaCha8Rng::seed_from_u64(seed);
    let pts = |g: &mut ChaCha8Rng| -> Vec<Point> {
        let count = g.random_range(1..=3usize);
        (0..count)
            .map(|_| (q(g.random_range(0..=6)), q(g.random_range(0..=6))))
            .collect()
    };
    let fr: Vec<FrontierPair> = (0..k).map(|_| (pts(&mut g), pts(&mut g))).collect();
    let mut worst: Option<Surd> = None;
    for (ui, _) in &fr {
        for (_, vj) in &fr {
            let best = ui
                .iter()
                .flat_map(|u| {
                    vj.iter().map(move |v| {
                        Mat2::from_rows((&u.0, &u.1), (&v.0, &v.1))
                            .expect("nonnegative")
                            .rho()
                    })
                })
                .min()
                .expect("nonempty");
            if worst.as_ref().is_none_or(|w| best > *w) {
                worst = Some(best);
            }
        }
    }
    let (_, hi) = worst.expect("k >= 1").bracket(&q_pow10_neg(9));
    (fr, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rho_examples() {
        let m = Mat2::from_ints(0, 5, 1, 0).unwrap();
        assert_eq!(m.rho(), Surd::new(q(0), q(1), q(5)));
        assert_eq!(Mat2::identity().rho().as_rational(), Some(&q(1)));
        assert_eq!(
            Mat2::from_ints(2, 1, 1, 2).unwrap().rho().as_rational(),
            Some(&q(3))
        );
        assert!(Mat2::from_ints(-1, 0, 0, 0).is_err());
    }

    #[test]
    fn thresholds_agree_with_floats() {
        let mut g = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let m = random_matrix(&mut g, 9);
            let lambda = qr(g.random_range(0..200), 10);
            let r = m.rho_f64();
            let l = q_to_f64(&lambda);
            if (r - l).abs() > 1e-12 {
                assert_eq!(m.rho_le(&lambda), r <= l);
                assert_eq!(m.rho_lt(&lambda), r < l);
            }
            assert!((m.rho().to_f64() - r).abs() < 1e-12 * r.max(1.0));
            assert_eq!(m.rho_le(&lambda), m.rho().cmp_q(&lambda).is_le());
            assert_eq!(m.rho_lt(&lambda), m.rho().cmp_q(&lambda).is_lt());
        }
    }

    #[test]
    fn facts_on_examples() {
        let z = Mat2::from_ints(0, 0, 0, 0).unwrap();
        let r = matrix_facts_check(&z);
        assert!(r.norm_bound_holds && r.power_limit_holds);
        let m = Mat2::from_ints(0, 4, 1, 0).unwrap();
        let r = matrix_facts_check(&m);
        assert_eq!(r.norm_inf, q(4));
        assert!((r.rho - 2.0).abs() < 1e-12);
        assert!(r.norm_bound_holds && r.power_limit_holds);
    }

    #[test]
    fn lemma_trivial_cases() {
        let m = Mat2::from_ints(2, 1, 1, 2).unwrap();
        let r = supermult_property(std::slice::from_ref(&m), &q(3)).unwrap();
        assert!(r.hypothesis && r.conclusion);
        let r = supermult_property(&[m.clone(), m.clone(), m.clone()], &q(3)).unwrap();
        assert!(r.hypothesis && r.conclusion);
        let pts = vec![(vec![(q(1), q(1))], vec![(q(1), q(1))])];
        let r = submult_property(&pts, &q(2)).unwrap();
        assert!(r.hypothesis && r.holds());
        // the bound without the diagonal term fails: ||M|| = 2 > n k = 1
        assert!(!r.bare_norm_bound);
    }
}
