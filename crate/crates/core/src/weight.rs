//! Nonnegative rational weight functions over an index set.

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// Map from indices `0..len` to nonnegative rationals. A boolean weight
/// function stands for a subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct WeightFn {
    #[serde(with = "crate::rational::serde_q::vec")]
    values: Vec<Q>,
}

/// A weight-function selector `(w0, w1)`, paired with an assignment selector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WeightSelector {
    pub w0: WeightFn,
    pub w1: WeightFn,
}

impl WeightSelector {
    pub fn get(&self, c: bool) -> &WeightFn {
        if c {
            &self.w1
        } else {
            &self.w0
        }
    }
}

impl WeightFn {
    pub fn new(values: Vec<Q>) -> Result<Self> {
        if values.iter().any(|v| *v < Q::zero()) {
            return Err(Error::InvalidParameter("negative weight".into()));
        }
        Ok(WeightFn { values })
    }

    pub fn from_ints(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| q(v)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        WeightFn {
            values: vec![Q::zero(); n],
        }
    }

    pub fn ones(n: usize) -> Self {
        WeightFn {
            values: vec![Q::one(); n],
        }
    }

    pub fn constant(n: usize, v: Q) -> Self {
        assert!(v >= Q::zero());
        WeightFn { values: vec![v; n] }
    }

    /// Indicator of `mask` over `n` indices.
    pub fn indicator(n: usize, mask: u64) -> Self {
        WeightFn {
            values: (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Q::one()
                    } else {
                        Q::zero()
                    }
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> &Q {
        &self.values[i]
    }

    pub fn values(&self) -> &[Q] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Q> {
        self.values
    }

    /// Total weight `|w|`.
    pub fn total(&self) -> Q {
        self.values.iter().sum()
    }

    /// `w(B)`, the weight of the indices in `mask`.
    pub fn sum_over(&self, mask: u64) -> Q {
        let mut s = Q::zero();
        let mut m = mask;
        while m != 0 {
            let i = m.trailing_zeros() as usize;
            s += &self.values[i];
            m &= m - 1;
        }
        s
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|v| v.is_zero() || v.is_one())
    }

    /// Support as a mask (requires `len <= 64`).
    pub fn support(&self) -> u64 {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .fold(0, |m, (i, _)| m | 1 << i)
    }

    /// Pointwise `self <= other`.
    pub fn le_pointwise(&self, other: &WeightFn) -> bool {
        self.len() == other.len() && self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    pub fn scaled(&self, s: &Q) -> WeightFn {
        WeightFn {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn sums_and_support() {
        let w = WeightFn::new(vec![qr(1, 2), q(0), q(2)]).unwrap();
        assert_eq!(w.total(), qr(5, 2));
        assert_eq!(w.sum_over(0b101), qr(5, 2));
        assert_eq!(w.sum_over(0b010), q(0));
        assert_eq!(w.support(), 0b101);
        assert!(!w.is_boolean());
        assert!(WeightFn::indicator(3, 0b110).is_boolean());
        assert!(WeightFn::new(vec![q(-1)]).is_err());
    }
}
