//! Generalized iterated function systems and their Hutchinson operator pair.

mod affine;
mod iterate;
mod rational;
pub mod standard;
mod system;

pub use affine::{apply_map, apply_map_exact, AffineMap};
pub use iterate::{
    converged_attractor, iterate_to_attractor, uniqueness_probe, IterationConfig, IterationTrace, StepRecord,
    StopReason,
};
pub use rational::{
    check_rational_contraction, rational_functional, rational_terms, RationalContractionReport, RationalTerms,
};
pub use system::{
    check_pair_contraction, default_snap, ContractionReport, GifsSystem, LiftCheck, LiftReport, Operator,
    PairContraction,
};
