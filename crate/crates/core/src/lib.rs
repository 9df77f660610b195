//! Combinatorial complexity measures of boolean functions and their behavior
//! under composition.

pub mod assemblage;
pub mod boolfn;
pub mod complimit;
pub mod error;
pub mod hypergraph;
pub mod measures;
pub mod rational;
pub mod tree;
pub mod verify;
pub mod weight;
pub mod zoo;

pub use boolfn::{bublitz, flip, named_fn, Assignment, BoolFn, Selector};
pub use error::{Error, Result};
pub use hypergraph::{CoverCert, Hypergraph, PackingCert};
pub use rational::{Surd, Q};
pub use weight::{WeightFn, WeightSelector};
