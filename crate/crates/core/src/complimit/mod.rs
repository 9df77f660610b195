//! Profile matrices, characteristic values and composition limits.

pub mod charval;
pub mod limit;
pub mod matrix;
pub mod profile;

pub use charval::{charval, charval_selector, default_tol, CharVal};
pub use limit::{
    bs_lift_packing, bs_lift_singleton, limit_convergence, sandwich_check, LiftedPacking,
    LimitTable, SandwichReport,
};
pub use matrix::{matrix_facts_check, submult_property, supermult_property, Mat2};
pub use profile::{profile_family, ProfileFamily, ProfileMatrix2, ProfileVector};
