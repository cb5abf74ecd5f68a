//! Simplicial cones `K = { P y : y >= 0 }` and the partial orders they induce.

use crate::error::{Error, Result};
use crate::linalg::{inverse, DenseMatrix, DenseVector};

pub const DEFAULT_CONE_TOL: f64 = 1e-12;

/// A proper cone with nonsingular generator matrix `P`.
///
/// Membership and invariance reduce to entrywise checks in `P`-coordinates,
/// so `P^-1` is computed once at construction.
#[derive(Debug, Clone)]
pub struct SimplicialCone {
    generators: DenseMatrix,
    generators_inv: DenseMatrix,
    identity: bool,
    tol: f64,
}

impl SimplicialCone {
    /// The nonnegative orthant of dimension `n`.
    pub fn orthant(n: usize) -> Self {
        Self {
            generators: DenseMatrix::identity(n),
            generators_inv: DenseMatrix::identity(n),
            identity: true,
            tol: DEFAULT_CONE_TOL,
        }
    }

    pub fn with_generators(p: DenseMatrix) -> Result<Self> {
        let generators_inv = inverse(&p)?;
        let identity = p == DenseMatrix::identity(p.rows());
        Ok(Self {
            generators: p,
            generators_inv,
            identity,
            tol: DEFAULT_CONE_TOL,
        })
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol.max(0.0);
        self
    }

    pub fn dim(&self) -> usize {
        self.generators.rows()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn generators(&self) -> &DenseMatrix {
        &self.generators
    }

    pub fn is_orthant(&self) -> bool {
        self.identity
    }

    fn coords(&self, x: &DenseVector) -> Result<DenseVector> {
        if x.len() != self.dim() {
            return Err(Error::dims("cone membership", self.dim(), x.len()));
        }
        if self.identity {
            return Ok(x.clone());
        }
        self.generators_inv.mul_vec(x)
    }

    /// `x >=_K 0`.
    pub fn contains_vector(&self, x: &DenseVector) -> Result<bool> {
        Ok(self.coords(x)?.as_slice().iter().all(|&c| c >= -self.tol))
    }

    /// `x >_K 0` (interior).
    pub fn contains_vector_interior(&self, x: &DenseVector) -> Result<bool> {
        Ok(self.coords(x)?.as_slice().iter().all(|&c| c > self.tol))
    }

    /// `P^-1 A P`, the matrix in cone coordinates.
    pub fn to_cone_coords(&self, a: &DenseMatrix) -> Result<DenseMatrix> {
        if !a.is_square() || a.rows() != self.dim() {
            return Err(Error::dims(
                "cone invariance",
                format!("{0}x{0}", self.dim()),
                format!("{}x{}", a.rows(), a.cols()),
            ));
        }
        if self.identity {
            return Ok(a.clone());
        }
        self.generators_inv.matmul(&a.matmul(&self.generators)?)
    }

    /// `A K ⊆ K`, i.e. `A >=_K 0`.
    pub fn leaves_invariant(&self, a: &DenseMatrix) -> Result<bool> {
        Ok(self.to_cone_coords(a)?.is_entrywise_nonneg(self.tol))
    }

    /// `A <=_K B`, i.e. `B - A >=_K 0`.
    pub fn cone_le(&self, a: &DenseMatrix, b: &DenseMatrix) -> Result<bool> {
        self.leaves_invariant(&b.checked_sub(a)?)
    }

    /// `x <=_K y` for vectors, with an explicit slack.
    pub fn vector_le(&self, x: &DenseVector, y: &DenseVector, slack: f64) -> Result<bool> {
        if x.len() != y.len() {
            return Err(Error::dims("cone order", x.len(), y.len()));
        }
        let d = self.coords(&(y - x))?;
        Ok(d.as_slice().iter().all(|&c| c >= -slack))
    }
}
