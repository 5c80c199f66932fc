//! Bounded multi-objective archivers, quality indicators, and checkers for
//! the properties an archiver may or may not guarantee.

pub mod archivers;
pub mod dominance;
mod error;
pub mod experiment;
pub mod indicators;
pub mod properties;
pub mod sequences;

pub use archivers::{run, run_resolved, Archiver, ArchiverConfig, ArchiverKind, Trajectory};
pub use dominance::{better, dominates, minimal_set, weakly_dominates, ObjectiveVector};
pub use error::{Error, Result};
pub use indicators::{IndicatorKind, IndicatorSpec};
pub use properties::{check_anytime, check_lemmas, Property, ViolationReport};
pub use sequences::{Batch, Sequence};
