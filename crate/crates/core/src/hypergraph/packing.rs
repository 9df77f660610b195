//! Integral and fractional packings.

use num_traits::ToPrimitive;

use super::{
    Hypergraph, Multiplicity, PackingCert, PackingKind, DEFAULT_NODE_BUDGET, LP_BOUND_MIN_EDGES,
};
use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::weight::WeightFn;

/// Maximum number of pairwise disjoint edges.
pub fn nu(h: &Hypergraph) -> Result<(u64, PackingCert)> {
    let (v, mut cert) = capacitated(h, &vec![1; h.ground()])?;
    cert.kind = PackingKind::Integral;
    Ok((v, cert))
}

/// Maximum M-fold packing: every index covered at most `m` times.
pub fn nu_m(h: &Hypergraph, m: u32) -> Result<(u64, PackingCert)> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let (v, mut cert) = capacitated(h, &vec![m; h.ground()])?;
    cert.kind = PackingKind::MFold { m };
    Ok((v, cert))
}

/// Maximum integral w-packing: index `i` covered at most `w(i)` times.
pub fn nu_w(h: &Hypergraph, w: &WeightFn) -> Result<(u64, PackingCert)> {
    if w.len() != h.ground() {
        return Err(Error::ArityMismatch {
            expected: h.ground(),
            got: w.len(),
        });
    }
    let caps: Vec<u32> = w
        .values()
        .iter()
        .map(|v| v.floor().to_integer().to_u32().unwrap_or(u32::MAX))
        .collect();
    let (v, mut cert) = capacitated(h, &caps)?;
    cert.kind = PackingKind::WPacking {
        w: w.values().to_vec(),
    };
    Ok((v, cert))
}

/// Maximum fractional packing, exact.
pub fn nu_star(h: &Hypergraph) -> Result<(Q, PackingCert)> {
    if h.edges().len() < LP_BOUND_MIN_EDGES && !h.edges().is_empty() {
        // nu <= nu* <= tau, so nu = tau pins nu*
        let (n, mut pack) = nu(h)?;
        if n == super::tau(h)?.0 {
            pack.kind = PackingKind::Fractional;
            return Ok((q(n as i64), pack));
        }
    }
    let (sol, pack, _) = h.fractional()?;
    Ok((sol.value, pack))
}

struct Search<'a> {
    edges: &'a [u64],
    best: u64,
    best_mult: Vec<u32>,
    mult: Vec<u32>,
    ceiling: u64,
    nodes: u64,
}

impl Search<'_> {
    fn bound(&self, j: usize, caps: &[u32]) -> u64 {
        let mut per_edge = 0u64;
        let mut union = 0u64;
        let mut min_size = u32::MAX;
        for &e in &self.edges[j..] {
            per_edge += max_mult(e, caps) as u64;
            union |= e;
            min_size = min_size.min(e.count_ones());
        }
        if min_size == u32::MAX {
            return 0;
        }
        let cap_sum: u64 = (0..64)
            .filter(|i| union >> i & 1 == 1)
            .map(|i| caps[i] as u64)
            .sum();
        per_edge.min(cap_sum / min_size as u64)
    }

    fn run(&mut self, j: usize, caps: &mut [u32], cur: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > DEFAULT_NODE_BUDGET {
            return Err(Error::Budget("packing search node budget".into()));
        }
        if self.best >= self.ceiling {
            return Ok(());
        }
        if j == self.edges.len() {
            if cur > self.best {
                self.best = cur;
                self.best_mult = self.mult.clone();
            }
            return Ok(());
        }
        if cur + self.bound(j, caps) <= self.best {
            return Ok(());
        }
        let e = self.edges[j];
        let top = max_mult(e, caps);
        for t in (0..=top).rev() {
            apply(e, caps, t, false);
            self.mult[j] = t;
            self.run(j + 1, caps, cur + t as u64)?;
            apply(e, caps, t, true);
            if self.best >= self.ceiling {
                break;
            }
        }
        self.mult[j] = 0;
        Ok(())
    }
}

fn max_mult(e: u64, caps: &[u32]) -> u32 {
    let mut m = e;
    let mut best = u32::MAX;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        best = best.min(caps[i]);
        m &= m - 1;
    }
    best
}

fn apply(e: u64, caps: &mut [u32], t: u32, restore: bool) {
    let mut m = e;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        if restore {
            caps[i] += t;
        } else {
            caps[i] -= t;
        }
        m &= m - 1;
    }
}

/// Branch and bound over edge multiplicities, largest first. The LP value
/// scaled by the uniform capacity (when capacities are uniform) caps the
/// search so it stops as soon as an optimal packing is found.
fn capacitated(h: &Hypergraph, caps: &[u32]) -> Result<(u64, PackingCert)> {
    let edges = h.edges();
    let mut ceiling = u64::MAX;
    if edges.len() >= LP_BOUND_MIN_EDGES && caps.iter().all(|&c| c == caps[0]) {
        let (sol, _, _) = h.fractional()?;
        let scaled = sol.value * q(caps[0] as i64);
        ceiling = scaled.floor().to_integer().to_u64().unwrap_or(u64::MAX);
    }
    let mut s = Search {
        edges,
        best: 0,
        best_mult: vec![0; edges.len()],
        mult: vec![0; edges.len()],
        ceiling,
        nodes: 0,
    };
    let mut work = caps.to_vec();
    s.run(0, &mut work, 0)?;
    let cert = PackingCert {
        kind: PackingKind::Integral,
        multiplicities: edges
            .iter()
            .zip(&s.best_mult)
            .filter(|(_, &m)| m > 0)
            .map(|(&e, &m)| (e, Multiplicity(q(m as i64))))
            .collect(),
    };
    Ok((s.best, cert))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::k_stars;
    use crate::rational::qr;

    fn brute_nu(h: &Hypergraph) -> u64 {
        let m = h.edges().len();
        (0u64..1 << m)
            .filter(|sub| {
                let mut used = 0u64;
                (0..m).filter(|j| sub >> j & 1 == 1).all(|j| {
                    let e = h.edges()[j];
                    let ok = used & e == 0;
                    used |= e;
                    ok
                })
            })
            .map(|s| s.count_ones() as u64)
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn small_examples() {
        let h = Hypergraph::new(3, [0b001, 0b010, 0b100]).unwrap();
        assert_eq!(nu(&h).unwrap().0, 3);
        let stars = k_stars(5).unwrap();
        let (v, cert) = nu(&stars).unwrap();
        assert_eq!(v, 1);
        assert_eq!(cert.validate(&stars).unwrap(), q(1));
        assert_eq!(brute_nu(&stars), 1);
        assert_eq!(nu_star(&stars).unwrap().0, qr(5, 2));
        // M=2 on the stars: each pair index lies in two stars
        assert_eq!(nu_m(&stars, 2).unwrap().0, 5);
    }

    #[test]
    fn empty_hypergraph() {
        let h = Hypergraph::new(3, []).unwrap();
        assert_eq!(nu(&h).unwrap().0, 0);
        assert_eq!(nu_m(&h, 3).unwrap().0, 0);
        assert_eq!(nu_star(&h).unwrap().0, q(0));
    }

    #[test]
    fn w_packing() {
        let h = Hypergraph::new(2, [0b01, 0b11]).unwrap();
        let w = WeightFn::new(vec![qr(5, 2), q(1)]).unwrap();
        let (v, cert) = nu_w(&h, &w).unwrap();
        assert_eq!(v, 2);
        assert_eq!(cert.validate(&h).unwrap(), q(2));
    }
}
