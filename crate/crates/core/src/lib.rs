//! Möbius function of the permutation pattern poset.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod oracle;
pub mod oscillation_fast;
pub mod perm;
pub mod sweep;

pub use engine::{min_r_general, weight_general, Engine, MobiusCache, Route, WeightedContribution};
pub use error::{Error, Result};
pub use oracle::{Downset, IntervalTable, Oracle, DEFAULT_DOWNSET_CAP};
pub use oscillation_fast::{mobius_oscillation, OscillationSolver, OscillationTrace, PiClass};
pub use perm::{
    classify_oscillation, contains, family_interleave, family_sum, OscKind, OscillationId, PermKey,
    Permutation, Shape, ShapeKind, SumDecomposition,
};
