//! Paired iterations from below and above the solution.

use crate::cone::SimplicialCone;
use crate::error::{Error, Hypothesis, Result};
use crate::linalg::{perron_power, spectral_radius, DenseMatrix, DenseVector, LuFactors, POWER_MAX_ITER};
use crate::splitting::{commutation_holds, Splitting, COMMUTATION_TOL, RADIUS_TOL};

use super::operators::{build_t, build_t_hat};
use super::solver::{two_stage_step, IterationReport, TwoStageConfig};

/// Result of a bracketing run. `lower[k]` and `upper[k]` are `x_k` and `y_k`.
#[derive(Debug, Clone)]
pub struct MonotoneRun {
    pub lower: Vec<DenseVector>,
    pub upper: Vec<DenseVector>,
    /// `A^-1 b` by LU, the common limit.
    pub solution: DenseVector,
    /// Update history holds `||y_k - x_k||_inf`.
    pub report: IterationReport,
    /// Whether `A >=_K 0`; informational, the run relies on `T_s >=_K 0` instead.
    pub a_nonneg: bool,
}

fn fail(h: Hypothesis) -> Error {
    Error::HypothesisFailed(h)
}

fn step_vec(outer: &Splitting, inner: &Splitting, x: &DenseVector, b: &DenseMatrix, s: usize) -> Result<DenseVector> {
    Ok(two_stage_step(outer, inner, &x.to_column(), b, s)?.column(0))
}

/// Bracketing run with inner SOR(`cfg.omega`) on `U`.
pub fn monotone_bracket(
    a: &DenseMatrix,
    b: &DenseVector,
    x0: &DenseVector,
    y0: &DenseVector,
    outer: &Splitting,
    cfg: &TwoStageConfig,
    cone: &SimplicialCone,
) -> Result<MonotoneRun> {
    let inner = Splitting::sor(outer.u(), cfg.omega)?;
    monotone_bracket_with(a, b, x0, y0, outer, &inner, cfg, cone)
}

/// Bracketing run with an explicit inner splitting.
///
/// All hypotheses are checked before iterating and the ordering
/// `x_k <= x_{k+1} <= A^-1 b <= y_{k+1} <= y_k` is checked at every step.
#[allow(clippy::too_many_arguments)]
pub fn monotone_bracket_with(
    a: &DenseMatrix,
    b: &DenseVector,
    x0: &DenseVector,
    y0: &DenseVector,
    outer: &Splitting,
    inner: &Splitting,
    cfg: &TwoStageConfig,
    cone: &SimplicialCone,
) -> Result<MonotoneRun> {
    cfg.validate()?;
    if !cfg.schedule.is_stationary() {
        return Err(Error::InvalidConfig("bracketing needs a constant schedule".into()));
    }
    let n = outer.dim();
    if !outer.same_matrix(&Splitting::exact(a.clone())?) {
        return Err(Error::HypothesisMismatch("outer splitting does not split A".into()));
    }
    if !outer.is_split_by(inner) {
        return Err(Error::HypothesisMismatch("inner splitting does not split the outer U".into()));
    }
    for v in [b, x0, y0] {
        if v.len() != n {
            return Err(Error::dims("bracketing vector", n, v.len()));
        }
    }
    let s = cfg.schedule.at(0);

    if !outer.classify(cone)?.regular {
        return Err(fail(Hypothesis::OuterRegular));
    }
    if !inner.classify(cone)?.weak_type2 {
        return Err(fail(Hypothesis::InnerWeakTypeII));
    }
    if !commutation_holds(outer.v(), inner.u(), inner.v(), COMMUTATION_TOL)? {
        return Err(fail(Hypothesis::Commutation));
    }
    let a_lu = LuFactors::new(a)?;
    if !cone.leaves_invariant(&a_lu.inverse())? {
        return Err(fail(Hypothesis::Monotone));
    }
    if !cone.leaves_invariant(&build_t(outer, inner, s)?)? {
        return Err(fail(Hypothesis::IterationMatrixNonnegative));
    }
    let a_nonneg = cone.leaves_invariant(a)?;

    let solution = a_lu.solve_vec(b)?;
    let scale = 1.0 + solution.norm_inf().max(x0.norm_inf()).max(y0.norm_inf());
    let slack = cone.tol() * scale;
    let le = |p: &DenseVector, q: &DenseVector| cone.vector_le(p, q, slack);

    if !le(x0, &solution)? {
        return Err(fail(Hypothesis::LowerStartBelowSolution));
    }
    if !le(&solution, y0)? {
        return Err(fail(Hypothesis::UpperStartAboveSolution));
    }
    let rhs = b.to_column();
    let x1 = step_vec(outer, inner, x0, &rhs, s)?;
    let y1 = step_vec(outer, inner, y0, &rhs, s)?;
    if !le(x0, &x1)? {
        return Err(fail(Hypothesis::LowerSequenceIncreasing));
    }
    if !le(&y1, y0)? {
        return Err(fail(Hypothesis::UpperSequenceDecreasing));
    }

    let mut lower = vec![x0.clone()];
    let mut upper = vec![y0.clone()];
    let mut history = Vec::new();
    let mut gap = (y0 - x0).norm_inf();
    let mut next = Some((x1, y1));
    let mut k = 0;
    while gap > cfg.eps && k < cfg.max_outer {
        let (xn, yn) = match next.take() {
            Some(pair) => pair,
            None => (
                step_vec(outer, inner, &lower[k], &rhs, s)?,
                step_vec(outer, inner, &upper[k], &rhs, s)?,
            ),
        };
        let ordered = le(&lower[k], &xn)? && le(&xn, &solution)? && le(&solution, &yn)? && le(&yn, &upper[k])?;
        if !ordered {
            return Err(fail(Hypothesis::SandwichOrder { step: k + 1 }));
        }
        gap = (&yn - &xn).norm_inf();
        history.push(gap);
        lower.push(xn);
        upper.push(yn);
        k += 1;
    }

    let last = lower.last().expect("at least x0");
    let final_residual = (&a.mul_vec(last)? - b).norm_inf();
    let report = IterationReport {
        outer_iterations: history.len(),
        converged: gap <= cfg.eps,
        final_update_norm: gap,
        residual_history: history,
        spectral_radius_t: None,
        final_residual,
    };
    Ok(MonotoneRun {
        lower,
        upper,
        solution,
        report,
        a_nonneg,
    })
}

/// Starting pair `(A^-1 b - z, A^-1 b + z)` with `z = A^-1 x` for the Perron vector `x` of `T^_s`.
pub fn bracketing_initials(
    outer: &Splitting,
    inner: &Splitting,
    s: usize,
    b: &DenseVector,
    cone: &SimplicialCone,
) -> Result<(DenseVector, DenseVector)> {
    let n = outer.dim();
    if b.len() != n {
        return Err(Error::dims("bracketing rhs", n, b.len()));
    }
    let t_hat = build_t_hat(outer, inner, s)?;
    let local = cone.to_cone_coords(&t_hat)?;
    if !local.is_entrywise_nonneg(cone.tol() * (1.0 + local.max_abs())) {
        return Err(fail(Hypothesis::InnerWeakTypeII));
    }
    if spectral_radius(&build_t(outer, inner, s)?, RADIUS_TOL)? >= 1.0 {
        return Err(fail(Hypothesis::RadiusBelowOne));
    }
    let clamped = local.map(|v| v.max(0.0));
    let perron = perron_power(&clamped, RADIUS_TOL, POWER_MAX_ITER)?;
    let x = cone.generators().mul_vec(&perron.vector)?;
    let a_lu = LuFactors::new(outer.a())?;
    let z = a_lu.solve_vec(&x)?;
    let solution = a_lu.solve_vec(b)?;
    Ok((&solution - &z, &solution + &z))
}
