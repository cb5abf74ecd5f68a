//! Matrix splittings `A = U - V` and their classification over a cone.

mod compare;

pub use compare::{
    compare_splittings, compare_two_stage, ComparisonReport, ComparisonRule, TwoStageComparison,
    TwoStageRule, COMPARISON_SLACK,
};

use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{inverse, solve_right, spectral_radius, DenseMatrix, LuFactors};
use crate::twostage::{build_t, build_t_hat};

/// Reconstruction tolerance for `A = U - V`, relative to `max(||A||, ||U||)`.
pub const SPLITTING_TOL: f64 = 1e-12;

/// Tolerance used for spectral radii computed inside this module.
pub const RADIUS_TOL: f64 = 1e-12;

/// A splitting `A = U - V` with a cached factorization of `U`.
#[derive(Debug, Clone)]
pub struct Splitting {
    a: DenseMatrix,
    u: DenseMatrix,
    v: DenseMatrix,
    u_lu: LuFactors,
}

/// Which splitting classes a splitting belongs to, with respect to one cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SplittingClass {
    pub regular: bool,
    pub weak_type1: bool,
    pub weak_type2: bool,
}

impl SplittingClass {
    pub fn is_weak_regular(&self) -> bool {
        self.weak_type1 || self.weak_type2
    }
}

/// Spectral radius of `U^-1 V` and whether it is below one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceCheck {
    pub convergent: bool,
    pub radius: f64,
}

fn square_dims(op: &'static str, m: &DenseMatrix, n: usize) -> Result<()> {
    if m.rows() != n || m.cols() != n {
        return Err(Error::dims(op, format!("{n}x{n}"), format!("{}x{}", m.rows(), m.cols())));
    }
    Ok(())
}

impl Splitting {
    /// Validates `A = U - V` and factors `U`.
    pub fn new(a: DenseMatrix, u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        let n = a.rows();
        square_dims("splitting", &a, n)?;
        square_dims("splitting", &u, n)?;
        square_dims("splitting", &v, n)?;
        let residual = a.max_abs_diff(&u.checked_sub(&v)?);
        let tolerance = SPLITTING_TOL * a.norm_inf().max(u.norm_inf());
        if residual > tolerance {
            return Err(Error::NotASplitting {
                residual,
                tolerance,
            });
        }
        let u_lu = LuFactors::new(&u)?;
        Ok(Self { a, u, v, u_lu })
    }

    /// Builds the splitting of `U - V`.
    pub fn from_parts(u: DenseMatrix, v: DenseMatrix) -> Result<Self> {
        let a = u.checked_sub(&v)?;
        Self::new(a, u, v)
    }

    /// `A = A - 0`: the exact solve.
    pub fn exact(a: DenseMatrix) -> Result<Self> {
        let n = a.rows();
        Self::new(a.clone(), a, DenseMatrix::zeros(n, n))
    }

    /// `U = diag(A)`, `V = U - A`.
    pub fn jacobi(a: &DenseMatrix) -> Result<Self> {
        check_diagonal(a)?;
        let u = a.diagonal_part();
        let v = u.checked_sub(a)?;
        Self::new(a.clone(), u, v)
    }

    /// `U = D - L` (lower triangle of `A`), `V = R = -strict_upper(A)`.
    pub fn gauss_seidel(a: &DenseMatrix) -> Result<Self> {
        Self::sor(a, 1.0)
    }

    /// `U = D/omega - L`, `V = ((1 - omega)/omega) D + R`.
    pub fn sor(a: &DenseMatrix, omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega < 2.0) {
            return Err(Error::BadRelaxation(omega));
        }
        check_diagonal(a)?;
        let n = a.rows();
        let d = a.diagonal();
        let mut u = a.strict_lower();
        let mut v = a.strict_upper().scale(-1.0);
        for i in 0..n {
            u[(i, i)] = d[i] / omega;
            v[(i, i)] = (1.0 - omega) / omega * d[i];
        }
        Self::new(a.clone(), u, v)
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &DenseMatrix {
        &self.a
    }

    pub fn u(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn v(&self) -> &DenseMatrix {
        &self.v
    }

    pub fn u_factors(&self) -> &LuFactors {
        &self.u_lu
    }

    pub fn u_inverse(&self) -> DenseMatrix {
        self.u_lu.inverse()
    }

    /// `H = U^-1 V`.
    pub fn iteration_matrix(&self) -> DenseMatrix {
        self.u_lu.solve(&self.v).expect("V has the dimension of U")
    }

    /// `V U^-1`.
    pub fn right_iteration_matrix(&self) -> Result<DenseMatrix> {
        solve_right(&self.v, &self.u)
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius(&self.iteration_matrix(), RADIUS_TOL)
    }

    /// `rho(U^-1 V) < 1 - tol`.
    pub fn is_convergent(&self, tol: f64) -> Result<ConvergenceCheck> {
        let radius = self.spectral_radius()?;
        Ok(ConvergenceCheck {
            convergent: radius < 1.0 - tol,
            radius,
        })
    }

    pub fn classify(&self, cone: &SimplicialCone) -> Result<SplittingClass> {
        let u_inv_nonneg = cone.leaves_invariant(&self.u_inverse())?;
        if !u_inv_nonneg {
            return Ok(SplittingClass::default());
        }
        let regular = cone.leaves_invariant(&self.v)?;
        let type1 = cone.leaves_invariant(&self.iteration_matrix())?;
        let type2 = cone.leaves_invariant(&self.right_iteration_matrix()?)?;
        Ok(SplittingClass {
            regular,
            weak_type1: regular || type1,
            weak_type2: regular || type2,
        })
    }

    /// True when `self` and `other` split the same matrix (up to roundoff).
    pub fn same_matrix(&self, other: &Splitting) -> bool {
        self.dim() == other.dim()
            && self.a.max_abs_diff(&other.a) <= SPLITTING_TOL * self.a.norm_inf().max(other.a.norm_inf()).max(1.0)
    }

    /// True when `inner` splits this splitting's `U`.
    pub fn is_split_by(&self, inner: &Splitting) -> bool {
        inner.dim() == self.dim()
            && inner.a.max_abs_diff(&self.u) <= SPLITTING_TOL * self.u.norm_inf().max(1.0)
    }
}

fn check_diagonal(a: &DenseMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::dims("splitting", "square matrix", format!("{}x{}", a.rows(), a.cols())));
    }
    match a.diagonal().iter().position(|&d| d == 0.0) {
        Some(index) => Err(Error::ZeroDiagonal { index }),
        None => Ok(()),
    }
}

/// `||V F^-1 G - G F^-1 V|| <= tol (1 + ||V|| ||F^-1|| ||G||)`.
pub fn commutation_holds(v: &DenseMatrix, f: &DenseMatrix, g: &DenseMatrix, tol: f64) -> Result<bool> {
    let n = f.rows();
    square_dims("commutation", f, n)?;
    square_dims("commutation", v, n)?;
    square_dims("commutation", g, n)?;
    let f_lu = LuFactors::new(f)?;
    let lhs = v.matmul(&f_lu.solve(g)?)?;
    let rhs = g.matmul(&f_lu.solve(v)?)?;
    let scale = 1.0 + v.norm_inf() * f_lu.inverse().norm_inf() * g.norm_inf();
    Ok(lhs.checked_sub(&rhs)?.norm_inf() <= tol * scale)
}

/// Tolerance for the commutation test used by hypothesis checks.
pub const COMMUTATION_TOL: f64 = 1e-10;

/// Tolerance for agreement of the two constructions of the induced splitting.
pub const INDUCED_TOL: f64 = 1e-8;

/// The splitting `A = B - C` with `B = A (I - T_s)^-1` induced by `s` inner sweeps.
///
/// When `V F^-1 G = G F^-1 V`, `B` is also checked against `(I - T^_s)^-1 A`.
pub fn induced_splitting(outer: &Splitting, inner: &Splitting, s: usize) -> Result<Splitting> {
    let n = outer.dim();
    let t = build_t(outer, inner, s)?;
    let eye = DenseMatrix::identity(n);
    let b = solve_right(outer.a(), &eye.checked_sub(&t)?)?;
    if commutation_holds(outer.v(), inner.u(), inner.v(), COMMUTATION_TOL)? {
        let t_hat = build_t_hat(outer, inner, s)?;
        let b_hat = inverse(&eye.checked_sub(&t_hat)?)?.matmul(outer.a())?;
        let gap = b.max_abs_diff(&b_hat);
        if gap > INDUCED_TOL * (1.0 + b.max_abs()) {
            return Err(Error::HypothesisMismatch(format!(
                "A (I - T)^-1 and (I - T^)^-1 A differ by {gap:e}"
            )));
        }
    }
    let c = b.checked_sub(outer.a())?;
    Splitting::new(outer.a().clone(), b, c)
}
