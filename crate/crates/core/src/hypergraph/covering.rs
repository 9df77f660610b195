//! Hitting sets.

use num_traits::ToPrimitive;

use super::{CoverCert, CoverKind, Hypergraph, DEFAULT_NODE_BUDGET, LP_BOUND_MIN_EDGES};
use crate::error::{Error, Result};
use crate::rational::{q, Q};
use crate::weight::WeightFn;

/// Minimum fractional hitting set, exact.
pub fn tau_star(h: &Hypergraph) -> Result<(Q, CoverCert)> {
    if let Some((v, mut cover)) = integral_cover_if_tight(h)? {
        cover.kind = CoverKind::Fractional;
        return Ok((v, cover));
    }
    let (sol, _, cover) = h.fractional()?;
    Ok((sol.value, cover))
}

/// When `nu = tau` on a small hypergraph, `nu <= tau* <= tau` pins `tau*`
/// and the integral cover is optimal.
fn integral_cover_if_tight(h: &Hypergraph) -> Result<Option<(Q, CoverCert)>> {
    if h.edges().len() >= LP_BOUND_MIN_EDGES {
        return Ok(None);
    }
    let (t, cover) = tau(h)?;
    let (n, _) = super::nu(h)?;
    Ok((n == t).then(|| (q(t as i64), cover)))
}

/// Minimum hitting set.
pub fn tau(h: &Hypergraph) -> Result<(u64, CoverCert)> {
    let edges = h.edges();
    let mask = if edges.is_empty() {
        0
    } else {
        let floor = if edges.len() >= LP_BOUND_MIN_EDGES {
            let (sol, _, _) = h.fractional()?;
            sol.value.ceil().to_integer().to_u64().unwrap_or(0)
        } else {
            0
        };
        let greedy = greedy_cover(edges);
        let mut s = CoverSearch {
            edges,
            best: greedy.count_ones(),
            best_mask: greedy,
            floor: floor as u32,
            nodes: 0,
        };
        s.run(0, 0)?;
        s.best_mask
    };
    let cert = CoverCert {
        kind: CoverKind::Integral,
        weights: WeightFn::indicator(h.ground(), mask),
    };
    Ok((mask.count_ones() as u64, cert))
}

fn greedy_cover(edges: &[u64]) -> u64 {
    let mut chosen = 0u64;
    loop {
        let open: Vec<u64> = edges.iter().copied().filter(|&e| e & chosen == 0).collect();
        if open.is_empty() {
            return chosen;
        }
        let best = (0..64)
            .max_by_key(|&i| {
                let deg = open.iter().filter(|&&e| e >> i & 1 == 1).count();
                (deg, std::cmp::Reverse(i))
            })
            .expect("nonempty range");
        chosen |= 1 << best;
    }
}

struct CoverSearch<'a> {
    edges: &'a [u64],
    best: u32,
    best_mask: u64,
    floor: u32,
    nodes: u64,
}

impl CoverSearch<'_> {
    /// Branch on the smallest unhit edge; the `k`-th branch takes its `k`-th
    /// index and excludes the earlier ones. Disjoint unhit edges give the
    /// lower bound.
    fn run(&mut self, chosen: u64, excluded: u64) -> Result<()> {
        self.nodes += 1;
        if self.nodes > DEFAULT_NODE_BUDGET {
            return Err(Error::Budget("cover search node budget".into()));
        }
        if self.best <= self.floor {
            return Ok(());
        }
        let mut pick: Option<u64> = None;
        let mut disjoint = 0u32;
        let mut used = 0u64;
        for &e in self.edges {
            if e & chosen != 0 {
                continue;
            }
            let avail = e & !excluded;
            if avail == 0 {
                return Ok(());
            }
            if pick.is_none_or(|p| avail.count_ones() < p.count_ones()) {
                pick = Some(avail);
            }
            if e & used == 0 {
                used |= e;
                disjoint += 1;
            }
        }
        let Some(avail) = pick else {
            if chosen.count_ones() < self.best {
                self.best = chosen.count_ones();
                self.best_mask = chosen;
            }
            return Ok(());
        };
        if chosen.count_ones() + disjoint >= self.best {
            return Ok(());
        }
        let mut excl = excluded;
        let mut m = avail;
        while m != 0 {
            let i = m.trailing_zeros();
            self.run(chosen | 1 << i, excl)?;
            excl |= 1 << i;
            m &= m - 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::k_stars;
    use crate::rational::{q, qr};

    fn brute_tau(h: &Hypergraph) -> u32 {
        (0u64..1 << h.ground())
            .filter(|&s| h.is_hit_by(s))
            .map(|s| s.count_ones())
            .min()
            .unwrap()
    }

    #[test]
    fn small_examples() {
        let h = Hypergraph::new(2, [0b11]).unwrap();
        assert_eq!(tau(&h).unwrap().0, 1);
        let h = Hypergraph::new(2, [0b01, 0b11]).unwrap();
        let (v, cert) = tau_star(&h).unwrap();
        assert_eq!(v, q(1));
        assert_eq!(cert.validate(&h).unwrap(), q(1));
    }

    #[test]
    fn stars_of_k5() {
        let h = k_stars(5).unwrap();
        let (v, cert) = tau(&h).unwrap();
        assert_eq!(v, 3);
        assert_eq!(brute_tau(&h), 3);
        assert_eq!(cert.validate(&h).unwrap(), q(3));
        let quarter = WeightFn::constant(10, qr(1, 4));
        assert!(h.is_fractional_cover(&quarter));
        assert_eq!(tau_star(&h).unwrap().0, quarter.total());
    }
}
