//! Exact rational helpers and quadratic surds.
//!
//! Every measure in this crate is carried as a [`Q`] (arbitrary precision
//! rational). Spectral radii of 2x2 matrices are quadratic irrationals and are
//! represented exactly by [`Surd`].

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational number used throughout the crate.
pub type Q = BigRational;

/// Integer `n` as a rational.
pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// The rational `n / d`.
pub fn qr(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Rational with the exact value of a finite `f64`.
pub fn q_from_f64(x: f64) -> Q {
    Q::from_float(x).expect("finite float")
}

/// `10^-k` as a rational.
pub fn q_pow10_neg(k: u32) -> Q {
    Q::new(BigInt::one(), num_traits::pow(BigInt::from(10), k as usize))
}

/// Decimal rendering with `digits` digits after the point (truncated toward
/// negative infinity).
pub fn fmt_decimal(x: &Q, digits: u32) -> String {
    let scale = num_traits::pow(BigInt::from(10), digits as usize);
    let scaled = (x * Q::from_integer(scale.clone())).floor().to_integer();
    let neg = scaled.is_negative();
    let abs = scaled.abs();
    let int_part = &abs / &scale;
    let frac_part = &abs % &scale;
    let mut frac = frac_part.to_string();
    while frac.len() < digits as usize {
        frac.insert(0, '0');
    }
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}

/// Exact square root when `x` is the square of a rational.
pub fn exact_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer();
    let d = x.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Q::new(sn, sd))
    } else {
        None
    }
}

/// Rewrite `b sqrt(p/q)` as `(b s / q) sqrt(r)` with integer `r` free of
/// small square factors.
fn reduce_radicand(b: Q, d: Q) -> (Q, Q) {
    let mut r = d.numer() * d.denom();
    let mut outside = BigInt::one();
    let mut p = BigInt::from(2);
    let limit = BigInt::from(1000);
    while p <= limit && &p * &p <= r {
        let sq = &p * &p;
        while (&r % &sq).is_zero() {
            r /= &sq;
            outside *= &p;
        }
        p += 1;
    }
    let scale = Q::new(outside, d.denom().clone());
    (b * scale, Q::from_integer(r))
}

fn sign_of(x: &Q) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// A quadratic surd `a + b * sqrt(d)` with rational `a`, `b` and `d >= 0`.
/// Equality compares values, so `sqrt(20) / 2 == sqrt(5)`.
#[derive(Clone, Debug)]
pub struct Surd {
    pub a: Q,
    pub b: Q,
    pub d: Q,
}

impl Surd {
    pub fn rational(a: Q) -> Self {
        Surd {
            a,
            b: Q::zero(),
            d: Q::zero(),
        }
    }

    /// `a + b sqrt(d)`, folding `sqrt(d)` into `a` when `d` is a perfect square.
    pub fn new(a: Q, b: Q, d: Q) -> Self {
        assert!(!d.is_negative(), "surd radicand must be nonnegative");
        if b.is_zero() || d.is_zero() {
            return Surd::rational(a);
        }
        if let Some(r) = exact_sqrt(&d) {
            return Surd::rational(a + b * r);
        }
        let (b, d) = reduce_radicand(b, d);
        Surd { a, b, d }
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Q> {
        self.is_rational().then_some(&self.a)
    }

    pub fn to_f64(&self) -> f64 {
        q_to_f64(&self.a) + q_to_f64(&self.b) * q_to_f64(&self.d).sqrt()
    }

    pub fn signum(&self) -> i32 {
        let sa = sign_of(&self.a);
        let sb = if self.d.is_zero() {
            0
        } else {
            sign_of(&self.b)
        };
        if sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        if sa == sb {
            return sa;
        }
        // opposite signs: compare a^2 with b^2 d
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Equal => 0,
            Ordering::Greater => sa,
            Ordering::Less => sb,
        }
    }

    /// Product of two surds sharing a radicand (or rational operands).
    pub fn mul(&self, other: &Surd) -> Surd {
        if other.is_rational() {
            return Surd::new(&self.a * &other.a, &self.b * &other.a, self.d.clone());
        }
        if self.is_rational() {
            return other.mul(self);
        }
        assert_eq!(self.d, other.d, "surd product needs a common radicand");
        Surd::new(
            &self.a * &other.a + &self.b * &other.b * &self.d,
            &self.a * &other.b + &self.b * &other.a,
            self.d.clone(),
        )
    }

    pub fn pow(&self, k: u32) -> Surd {
        let mut acc = Surd::rational(Q::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn scale(&self, s: &Q) -> Surd {
        Surd::new(&self.a * s, &self.b * s, self.d.clone())
    }

    pub fn cmp_q(&self, x: &Q) -> Ordering {
        let diff = Surd::new(&self.a - x, self.b.clone(), self.d.clone());
        diff.signum().cmp(&0)
    }

    /// Rational bracket `[lo, hi]` containing the value with `hi - lo <= tol`.
    pub fn bracket(&self, tol: &Q) -> (Q, Q) {
        if let Some(r) = self.as_rational() {
            return (r.clone(), r.clone());
        }
        let est = self.to_f64();
        let mut lo = q_from_f64(est.floor() - 1.0);
        let mut hi = q_from_f64(est.ceil() + 1.0);
        while self.cmp_q(&lo) == Ordering::Less {
            lo -= q(1) + lo.abs();
        }
        while self.cmp_q(&hi) == Ordering::Greater {
            hi += q(1) + hi.abs();
        }
        let two = q(2);
        while &hi - &lo > *tol {
            let mid = (&lo + &hi) / &two;
            match self.cmp_q(&mid) {
                Ordering::Less => hi = mid,
                Ordering::Greater => lo = mid,
                Ordering::Equal => return (mid.clone(), mid),
            }
        }
        (lo, hi)
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Surd {}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Surd {
    fn cmp(&self, other: &Self) -> Ordering {
        let r = &self.a - &other.a;
        if self.d == other.d || self.is_rational() || other.is_rational() {
            let d = if self.is_rational() {
                other.d.clone()
            } else {
                self.d.clone()
            };
            let b = if self.is_rational() {
                -other.b.clone()
            } else if other.is_rational() {
                self.b.clone()
            } else {
                &self.b - &other.b
            };
            return Surd::new(r, b, d).signum().cmp(&0);
        }
        // sign(L - m) with L = r + b1 sqrt(d1) and m = b2 sqrt(d2)
        let l = Surd::new(r, self.b.clone(), self.d.clone());
        let sl = l.signum();
        let sm = sign_of(&other.b);
        let s = if sl != sm {
            (sl - sm).signum()
        } else if sl == 0 {
            0
        } else {
            let l2 = l.mul(&l);
            let m2 = &other.b * &other.b * &other.d;
            let c = Surd::new(&l2.a - m2, l2.b, l2.d).signum();
            c * sl
        };
        s.cmp(&0)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
        }
    }
}

impl serde::Serialize for Surd {
    /// `{"a": "p/q", "b": "p/q", "d": "p/q", "approx": f64}`.
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Surd", 4)?;
        st.serialize_field("a", &self.a.to_string())?;
        st.serialize_field("b", &self.b.to_string())?;
        st.serialize_field("d", &self.d.to_string())?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

/// Serde adapters rendering rationals as `"p/q"` strings.
pub mod serde_q {
    use super::Q;
    use serde::Serializer;

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub mod vec {
        use super::Q;
        use serde::ser::SerializeSeq;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&x.to_string())?;
            }
            seq.end()
        }
    }

    pub mod option {
        use super::Q;
        use serde::Serializer;

        pub fn serialize<S: Serializer>(x: &Option<Q>, s: S) -> Result<S::Ok, S::Error> {
            match x {
                Some(v) => s.serialize_some(&v.to_string()),
                None => s.serialize_none(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(fmt_decimal(&qr(9, 2), 3), "4.500");
        assert_eq!(fmt_decimal(&qr(1, 3), 4), "0.3333");
        assert_eq!(fmt_decimal(&qr(-1, 4), 2), "-0.25");
    }

    #[test]
    fn perfect_square_folds() {
        let s = Surd::new(q(1), q(1), qr(9, 4));
        assert_eq!(s.as_rational(), Some(&qr(5, 2)));
        assert!(exact_sqrt(&q(2)).is_none());
    }

    #[test]
    fn surd_ordering_matches_floats() {
        let r2 = Surd::new(q(0), q(1), q(2));
        let r3 = Surd::new(q(0), q(1), q(3));
        assert!(r2 < r3);
        assert!(Surd::rational(qr(14142, 10000)) < r2);
        assert!(Surd::rational(qr(14143, 10000)) > r2);
        // 1 + sqrt(2) vs sqrt(5) + 0.2
        let x = Surd::new(q(1), q(1), q(2));
        let y = Surd::new(qr(1, 5), q(1), q(5));
        assert_eq!(x.cmp(&y), 2.414f64.partial_cmp(&2.436).unwrap());
        assert_eq!(x.cmp(&x.clone()), Ordering::Equal);
    }

    #[test]
    fn surd_power_is_exact() {
        // sqrt(2)^4 = 4
        let r2 = Surd::new(q(0), q(1), q(2));
        assert_eq!(r2.pow(4).as_rational(), Some(&q(4)));
        let (lo, hi) = r2.pow(3).bracket(&q_pow10_neg(12));
        assert!(lo <= hi && &hi - &lo <= q_pow10_neg(12));
        assert!((q_to_f64(&lo) - 8f64.sqrt()).abs() < 1e-9);
    }

    proptest::proptest! {
        #[test]
        fn surd_order_matches_floats(
            a in -50i64..50, b in -50i64..50, d in 0i64..60,
            c in -50i64..50, e in -50i64..50, r in 0i64..60,
        ) {
            let x = Surd::new(q(a), q(b), q(d));
            let y = Surd::new(q(c), q(e), q(r));
            let gap = x.to_f64() - y.to_f64();
            if gap.abs() > 1e-9 {
                proptest::prop_assert_eq!(x.cmp(&y), gap.partial_cmp(&0.0).unwrap());
            }
            proptest::prop_assert_eq!(x.cmp(&x), Ordering::Equal);
        }

        #[test]
        fn square_factors_are_reduced(b in 1i64..20, d in 1i64..30, k in 1i64..6) {
            proptest::prop_assert_eq!(
                Surd::new(q(0), q(b), q(d * k * k)),
                Surd::new(q(0), q(b * k), q(d))
            );
        }
    }
}
