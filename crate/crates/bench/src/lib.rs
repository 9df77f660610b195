//! Shared inputs for the benchmarks in `benches/`.

use boolcomp::zoo::{build_star, random_fn};
use boolcomp::{bublitz, named_fn, BoolFn};

/// Functions benchmarked across measures, smallest first.
pub fn fixtures() -> Vec<(&'static str, BoolFn)> {
    vec![
        ("nand_4", named_fn("NAND", Some(4)).expect("named")),
        ("bublitz", bublitz()),
        ("star_4", build_star(4).expect("star").function),
        ("random_10", random_fn(10, 1).expect("random")),
    ]
}
