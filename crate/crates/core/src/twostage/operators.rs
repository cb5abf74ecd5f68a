//! Dense two-stage operators, formed for analysis only (the solvers never build them).

use crate::error::{Error, Result};
use crate::linalg::{solve_right, DenseMatrix};
use crate::splitting::Splitting;

fn check_sweeps(s: usize) -> Result<()> {
    if s == 0 {
        return Err(Error::InvalidConfig("inner sweep count must be at least 1".into()));
    }
    Ok(())
}

fn check_pair(outer: &Splitting, inner: &Splitting) -> Result<()> {
    if !outer.is_split_by(inner) {
        return Err(Error::HypothesisMismatch(
            "inner splitting does not split the outer U".into(),
        ));
    }
    Ok(())
}

/// `sum_{j<s} M^j`.
fn geometric_sum(m: &DenseMatrix, s: usize) -> Result<DenseMatrix> {
    let n = m.rows();
    let mut sum = DenseMatrix::zeros(n, n);
    let mut term = DenseMatrix::identity(n);
    for j in 0..s {
        sum = sum.checked_add(&term)?;
        if j + 1 < s {
            term = term.matmul(m)?;
        }
    }
    Ok(sum)
}

/// `P_s^-1 = sum_{j<s} (F^-1 G)^j F^-1`.
pub fn build_p_inv(inner: &Splitting, s: usize) -> Result<DenseMatrix> {
    check_sweeps(s)?;
    let fg = inner.iteration_matrix();
    let f_inv = inner.u_inverse();
    geometric_sum(&fg, s)?.matmul(&f_inv)
}

/// `F^-1 sum_{j<s} (G F^-1)^j`; equal to [`build_p_inv`].
pub fn build_p_inv_right(inner: &Splitting, s: usize) -> Result<DenseMatrix> {
    check_sweeps(s)?;
    let gf = solve_right(inner.v(), inner.u())?;
    inner.u_inverse().matmul(&geometric_sum(&gf, s)?)
}

/// `T_s = (F^-1 G)^s + P_s^-1 V`.
pub fn build_t(outer: &Splitting, inner: &Splitting, s: usize) -> Result<DenseMatrix> {
    check_sweeps(s)?;
    check_pair(outer, inner)?;
    let fg = inner.iteration_matrix();
    let p_inv = build_p_inv(inner, s)?;
    fg.pow(s)?.checked_add(&p_inv.matmul(outer.v())?)
}

/// `T_s = I - (I - (F^-1 G)^s)(I - U^-1 V)`.
pub fn build_t_closed_form(outer: &Splitting, inner: &Splitting, s: usize) -> Result<DenseMatrix> {
    check_sweeps(s)?;
    check_pair(outer, inner)?;
    let eye = DenseMatrix::identity(outer.dim());
    let left = eye.checked_sub(&inner.iteration_matrix().pow(s)?)?;
    let right = eye.checked_sub(&outer.iteration_matrix())?;
    eye.checked_sub(&left.matmul(&right)?)
}

/// `T^_s = (G F^-1)^s + sum_{j<s} (G F^-1)^j V F^-1`.
pub fn build_t_hat(outer: &Splitting, inner: &Splitting, s: usize) -> Result<DenseMatrix> {
    check_sweeps(s)?;
    check_pair(outer, inner)?;
    let gf = solve_right(inner.v(), inner.u())?;
    let vf = solve_right(outer.v(), inner.u())?;
    gf.pow(s)?.checked_add(&geometric_sum(&gf, s)?.matmul(&vf)?)
}
