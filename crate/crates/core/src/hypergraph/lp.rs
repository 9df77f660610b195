//! Exact rational simplex for covering-type programs.
//!
//! Solves `min c.w` subject to `A w >= b`, `w >= 0` where `c >= 0`. The
//! solver runs the primal simplex on the dual `max b.y` subject to
//! `A^T y <= c`, `y >= 0`, whose origin is feasible because `c >= 0`. Bland's
//! rule prevents cycling. The primal optimum is read from the reduced costs
//! of the dual slacks, so one solve yields both certificates.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

/// A covering program `min c.w` s.t. `A w >= b`, `w >= 0`.
#[derive(Clone, Debug)]
pub struct CoveringLp {
    /// Constraint rows of `A`, each of length `cost.len()`.
    pub rows: Vec<Vec<Q>>,
    pub rhs: Vec<Q>,
    pub cost: Vec<Q>,
}

/// Optimal primal/dual pair with equal objective values.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub value: Q,
    pub primal: Vec<Q>,
    pub dual: Vec<Q>,
}

impl CoveringLp {
    /// Check `primal` and `dual` are feasible with matching objectives, which
    /// proves both optimal by weak duality.
    pub fn verify(&self, sol: &LpSolution) -> Result<()> {
        let n = self.cost.len();
        let m = self.rows.len();
        if sol.primal.len() != n || sol.dual.len() != m {
            return Err(Error::Certificate("solution dimensions".into()));
        }
        if sol.primal.iter().chain(&sol.dual).any(|v| v.is_negative()) {
            return Err(Error::Certificate("negative variable".into()));
        }
        for (row, b) in self.rows.iter().zip(&self.rhs) {
            let lhs: Q = row.iter().zip(&sol.primal).map(|(a, w)| a * w).sum();
            if lhs < *b {
                return Err(Error::Certificate("primal row violated".into()));
            }
        }
        for (i, c) in self.cost.iter().enumerate() {
            let lhs: Q = self
                .rows
                .iter()
                .zip(&sol.dual)
                .map(|(r, y)| &r[i] * y)
                .sum();
            if lhs > *c {
                return Err(Error::Certificate("dual row violated".into()));
            }
        }
        let pv: Q = self.cost.iter().zip(&sol.primal).map(|(c, w)| c * w).sum();
        let dv: Q = self.rhs.iter().zip(&sol.dual).map(|(b, y)| b * y).sum();
        if pv != dv || pv != sol.value {
            return Err(Error::Certificate("duality gap".into()));
        }
        Ok(())
    }

    pub fn solve(&self) -> Result<LpSolution> {
        let n = self.cost.len();
        let m = self.rows.len();
        if self.cost.iter().any(|c| c.is_negative()) {
            return Err(Error::InvalidParameter("negative LP cost".into()));
        }
        if self.rhs.len() != m || self.rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("LP dimensions".into()));
        }
        // Tableau rows: one per primal variable i (dual constraint),
        // columns: y_0..y_{m-1}, s_0..s_{n-1}.
        let width = m + n;
        let mut t: Vec<Vec<Q>> = (0..n)
            .map(|i| {
                let mut row = vec![Q::zero(); width];
                for (e, r) in self.rows.iter().enumerate() {
                    row[e] = r[i].clone();
                }
                row[m + i] = Q::from_integer(1.into());
                row
            })
            .collect();
        let mut rhs: Vec<Q> = self.cost.clone();
        let mut obj: Vec<Q> = (0..width)
            .map(|j| {
                if j < m {
                    -self.rhs[j].clone()
                } else {
                    Q::zero()
                }
            })
            .collect();
        let mut obj_val = Q::zero();
        let mut basis: Vec<usize> = (m..m + n).collect();

        loop {
            let Some(enter) = (0..width).find(|&j| obj[j].is_negative()) else {
                break;
            };
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..n {
                if t[r][enter].is_positive() {
                    let ratio = &rhs[r] / &t[r][enter];
                    let better = match &leave {
                        None => true,
                        Some((lr, lratio)) => {
                            ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                        }
                    };
                    if better {
                        leave = Some((r, ratio));
                    }
                }
            }
            let Some((pr, _)) = leave else {
                return Err(Error::Infeasible);
            };
            let piv = t[pr][enter].clone();
            for v in t[pr].iter_mut() {
                *v /= &piv;
            }
            rhs[pr] /= &piv;
            let prow = t[pr].clone();
            let prhs = rhs[pr].clone();
            for r in 0..n {
                if r != pr && !t[r][enter].is_zero() {
                    let factor = t[r][enter].clone();
                    for (v, p) in t[r].iter_mut().zip(&prow) {
                        if !p.is_zero() {
                            *v -= &factor * p;
                        }
                    }
                    rhs[r] -= &factor * &prhs;
                }
            }
            if !obj[enter].is_zero() {
                let factor = obj[enter].clone();
                for (v, p) in obj.iter_mut().zip(&prow) {
                    if !p.is_zero() {
                        *v -= &factor * p;
                    }
                }
                obj_val -= &factor * &prhs;
            }
            basis[pr] = enter;
        }

        let mut dual = vec![Q::zero(); m];
        for (r, &b) in basis.iter().enumerate() {
            if b < m {
                dual[b] = rhs[r].clone();
            }
        }
        let primal: Vec<Q> = (0..n).map(|i| obj[m + i].clone()).collect();
        let sol = LpSolution {
            value: obj_val,
            primal,
            dual,
        };
        self.verify(&sol)?;
        Ok(sol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qr};

    #[test]
    fn triangle_cover() {
        // edges {0,1},{1,2},{0,2}: tau* = 3/2
        let rows = vec![
            vec![q(1), q(1), q(0)],
            vec![q(0), q(1), q(1)],
            vec![q(1), q(0), q(1)],
        ];
        let lp = CoveringLp {
            rows,
            rhs: vec![q(1); 3],
            cost: vec![q(1); 3],
        };
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, qr(3, 2));
    }

    #[test]
    fn infeasible_row() {
        let lp = CoveringLp {
            rows: vec![vec![q(0)]],
            rhs: vec![q(1)],
            cost: vec![q(1)],
        };
        assert_eq!(lp.solve(), Err(Error::Infeasible));
    }

    #[test]
    fn negative_rows_allowed() {
        // min w1 s.t. w0 + w1 >= 1, -w0 >= -1/4
        let lp = CoveringLp {
            rows: vec![vec![q(1), q(1)], vec![q(-1), q(0)]],
            rhs: vec![q(1), qr(-1, 4)],
            cost: vec![q(0), q(1)],
        };
        let sol = lp.solve().unwrap();
        assert_eq!(sol.value, qr(3, 4));
    }
}
