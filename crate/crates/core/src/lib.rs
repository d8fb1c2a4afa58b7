//! Quantum deletion and insertion errors on qudit density matrices.
//!
//! The crate computes deletion spheres (partial traces over qudit subsets),
//! constructs and samples insertion states, decides membership in composed
//! error spheres, and evaluates the quantum indel distance together with the
//! code-capability verdicts that follow from it.

pub mod channels;
pub mod codes;
pub mod distance;
pub mod error;
pub mod feasibility;
pub mod linalg;
pub mod random;
pub mod reproduction;
pub mod state;

pub use error::{Error, Result};
pub use linalg::{CMatrix, Tolerance, C64};
pub use state::{DensityMatrix, PureKet, QuditShape, SpectralForm};
