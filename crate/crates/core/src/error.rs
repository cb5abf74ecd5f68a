use std::fmt;

use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: expected {expected}, found {found}")]
    DimensionMismatch {
        op: &'static str,
        expected: String,
        found: String,
    },

    #[error("matrix entries must be finite (entry {index} is {value})")]
    NonFinite { index: usize, value: f64 },

    #[error("matrix is singular: pivot {pivot:e} in column {column} is below threshold {threshold:e}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error("eigenvalue iteration did not converge after {iterations} iterations (best estimate {best})")]
    NoConvergence { iterations: usize, best: f64 },

    #[error("zero diagonal entry at index {index}")]
    ZeroDiagonal { index: usize },

    #[error("relaxation parameter {0} is outside (0, 2)")]
    BadRelaxation(f64),

    #[error("splitting does not reconstruct A: max |A - (U - V)| = {residual:e} exceeds {tolerance:e}")]
    NotASplitting { residual: f64, tolerance: f64 },

    #[error("hypothesis mismatch: {0}")]
    HypothesisMismatch(String),

    #[error("matrix is not monotone with respect to the cone (A^-1 is not cone-nonnegative)")]
    NotMonotone,

    #[error("the two splittings are of different matrices")]
    MismatchedA,

    #[error("comparison predicted rho1 <= rho2 but found rho1 = {rho1}, rho2 = {rho2} ({rule})")]
    ComparisonViolated {
        rule: String,
        rho1: f64,
        rho2: f64,
    },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(Hypothesis),

    #[error("iteration did not converge within {iterations} outer iterations (last update {last_update:e})")]
    MaxIterations { iterations: usize, last_update: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dims(op: &'static str, expected: impl fmt::Display, found: impl fmt::Display) -> Self {
        Error::DimensionMismatch {
            op,
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}

/// A named hypothesis of the monotone bracketing iteration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hypothesis {
    OuterRegular,
    InnerWeakTypeII,
    Commutation,
    Monotone,
    IterationMatrixNonnegative,
    RadiusBelowOne,
    LowerStartBelowSolution,
    UpperStartAboveSolution,
    LowerSequenceIncreasing,
    UpperSequenceDecreasing,
    SandwichOrder { step: usize },
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Hypothesis::OuterRegular => f.write_str("outer splitting A = U - V is not cone-regular"),
            Hypothesis::InnerWeakTypeII => {
                f.write_str("inner splitting U = F - G is not cone-weak-regular of type II")
            }
            Hypothesis::Commutation => f.write_str("V F^-1 G != G F^-1 V"),
            Hypothesis::Monotone => f.write_str("A^-1 is not cone-nonnegative"),
            Hypothesis::IterationMatrixNonnegative => {
                f.write_str("two-stage iteration matrix T_s is not cone-nonnegative")
            }
            Hypothesis::RadiusBelowOne => f.write_str("rho(T_s) >= 1"),
            Hypothesis::LowerStartBelowSolution => f.write_str("x0 is not below A^-1 b"),
            Hypothesis::UpperStartAboveSolution => f.write_str("y0 is not above A^-1 b"),
            Hypothesis::LowerSequenceIncreasing => f.write_str("x1 is not above x0"),
            Hypothesis::UpperSequenceDecreasing => f.write_str("y1 is not below y0"),
            Hypothesis::SandwichOrder { step } => {
                write!(f, "sandwich ordering x_k <= x_k+1 <= A^-1 b <= y_k+1 <= y_k broken at step {step}")
            }
        }
    }
}
