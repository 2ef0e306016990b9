//! Isoperimetric profiles `kappa(G, A, t)` of finite networks, the resistance
//! bounds they imply, good exhaustions, and numerical diagnostics for the
//! conditions that give one-ended forest trees.
//!
//! Exhaustive searches represent vertex sets as `u64` masks, so they are
//! limited to networks with at most 64 vertices and, by default, to
//! [`DEFAULT_VERTEX_CAP`].

mod bounds;
mod diagnostics;
mod good_subset;
mod profile;
mod subsets;

pub use bounds::{
    finite_hs_bound, hs_resistance_bound, integral_bound, sk_sequence, BoundStatus, FiniteHsReport,
    HsBound, HsOptions,
};
pub use diagnostics::{
    condition_diagnostics, BoxDiagnostics, ConditionOptions, ConditionReport, ShellConductance,
};
pub use good_subset::{
    good_subset, half_inequality, Certificate, GoodSubset, GoodSubsetOptions, HalfInequality,
};
pub use profile::{
    profile_brute, profile_table, BoundaryVariant, PowerProfile, Profile, StepProfile,
};
pub use subsets::DEFAULT_VERTEX_CAP;
