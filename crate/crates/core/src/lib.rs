//! Two-stage matrix-splitting iterations over simplicial cones.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense matrices, LU, eigenvalues, Kronecker products.
//! * [`cone`]: simplicial cones and the orders they induce.
//! * [`splitting`]: splittings `A = U - V`, classification and comparison.
//! * [`twostage`]: the outer/inner iteration, its operators and monotone bracketing.
//! * [`epimodel`]: the SAIUQR next-generation matrix built on top of the above.
//! * [`instances`]: seeded random instances for tests and benchmarks.

pub mod cone;
pub mod epimodel;
pub mod error;
pub mod instances;
pub mod linalg;
pub mod splitting;
pub mod twostage;

pub use cone::SimplicialCone;
pub use epimodel::{NgmMethod, NgmResult, SaiuqrParams};
pub use error::{Error, Hypothesis, Result};
pub use linalg::{DenseMatrix, DenseVector};
pub use splitting::{Splitting, SplittingClass};
pub use twostage::{IterationReport, MonotoneRun, Schedule, TwoStageConfig};
