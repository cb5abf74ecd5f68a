//! Outer/inner iteration for `A X = B`.

use crate::error::{Error, Result};
use crate::linalg::{spectral_radius, DenseMatrix, DenseVector};
use crate::splitting::{Splitting, RADIUS_TOL};

use super::operators::build_t;

/// Inner sweep counts `s(k)` per outer step `k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    Constant(usize),
    /// Explicit counts; the last one repeats once the list runs out.
    Explicit(Vec<usize>),
    /// `start + step * k`.
    Linear { start: usize, step: usize },
}

impl Schedule {
    pub fn at(&self, k: usize) -> usize {
        match self {
            Schedule::Constant(s) => *s,
            Schedule::Explicit(list) => list[k.min(list.len() - 1)],
            Schedule::Linear { start, step } => start.saturating_add(step.saturating_mul(k)),
        }
    }

    pub fn is_stationary(&self) -> bool {
        match self {
            Schedule::Constant(_) => true,
            Schedule::Explicit(list) => list.windows(2).all(|w| w[0] == w[1]),
            Schedule::Linear { step, .. } => *step == 0,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self {
            Schedule::Constant(s) => *s >= 1,
            Schedule::Explicit(list) => !list.is_empty() && list.iter().all(|&s| s >= 1),
            Schedule::Linear { start, .. } => *start >= 1,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("every inner count s(k) must be at least 1".into()))
        }
    }
}

#[derive(Debug, Clone)]
pub struct TwoStageConfig {
    pub schedule: Schedule,
    /// Relaxation for the default inner SOR splitting.
    pub omega: f64,
    /// Stop when `max |x_{k+1} - x_k| <= eps` over all columns.
    pub eps: f64,
    pub max_outer: usize,
    /// Starting vector for every column; zero when `None`.
    pub initial: Option<DenseVector>,
    /// Also compute `rho(T_s)` for the first sweep count.
    pub with_radius: bool,
}

impl Default for TwoStageConfig {
    fn default() -> Self {
        Self {
            schedule: Schedule::Constant(2),
            omega: 1.0,
            eps: 1e-8,
            max_outer: 100_000,
            initial: None,
            with_radius: false,
        }
    }
}

impl TwoStageConfig {
    pub fn stationary(s: usize, omega: f64, eps: f64) -> Self {
        Self {
            schedule: Schedule::Constant(s),
            omega,
            eps,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        if self.eps.is_nan() || self.eps <= 0.0 {
            return Err(Error::InvalidConfig(format!("eps must be positive, got {}", self.eps)));
        }
        if self.max_outer == 0 {
            return Err(Error::InvalidConfig("max_outer must be at least 1".into()));
        }
        if !(self.omega > 0.0 && self.omega < 2.0) {
            return Err(Error::BadRelaxation(self.omega));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub outer_iterations: usize,
    pub converged: bool,
    pub final_update_norm: f64,
    /// Update norm `max |x_{k+1} - x_k|` after every outer step.
    pub residual_history: Vec<f64>,
    pub spectral_radius_t: Option<f64>,
    /// `||A X - B||_inf` at the returned iterate.
    pub final_residual: f64,
}

impl IterationReport {
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::MaxIterations {
                iterations: self.outer_iterations,
                last_update: self.final_update_norm,
            })
        }
    }
}

fn initial_iterate(cfg: &TwoStageConfig, n: usize, m: usize) -> Result<DenseMatrix> {
    let mut x = DenseMatrix::zeros(n, m);
    if let Some(x0) = &cfg.initial {
        if x0.len() != n {
            return Err(Error::dims("initial vector", n, x0.len()));
        }
        for j in 0..m {
            x.set_column(j, x0);
        }
    }
    Ok(x)
}

fn check_system(a: &DenseMatrix, b: &DenseMatrix, outer: &Splitting) -> Result<()> {
    let n = outer.dim();
    if a.rows() != n || a.cols() != n || a.max_abs_diff(outer.a()) > 1e-12 * a.norm_inf().max(1.0) {
        return Err(Error::HypothesisMismatch("outer splitting does not split A".into()));
    }
    if b.rows() != n {
        return Err(Error::dims("right-hand side", format!("{n} rows"), b.rows()));
    }
    Ok(())
}

/// `max |x - y|` and `x <- y`.
fn advance(x: &mut DenseMatrix, y: DenseMatrix) -> f64 {
    let delta = x.max_abs_diff(&y);
    *x = y;
    delta
}

fn finish(
    a: &DenseMatrix,
    b: &DenseMatrix,
    x: &DenseMatrix,
    history: Vec<f64>,
    eps: f64,
    radius: Option<f64>,
) -> Result<IterationReport> {
    let final_update_norm = history.last().copied().unwrap_or(0.0);
    Ok(IterationReport {
        outer_iterations: history.len(),
        converged: final_update_norm <= eps,
        final_update_norm,
        residual_history: history,
        spectral_radius_t: radius,
        final_residual: a.matmul(x)?.checked_sub(b)?.norm_inf(),
    })
}

/// One outer step: `s` sweeps of `F y <- G y + (V x + b)` starting from `y = x`.
pub fn two_stage_step(
    outer: &Splitting,
    inner: &Splitting,
    x: &DenseMatrix,
    b: &DenseMatrix,
    s: usize,
) -> Result<DenseMatrix> {
    let rhs = outer.v().matmul(x)?.checked_add(b)?;
    let mut y = x.clone();
    for _ in 0..s {
        y = inner.u_factors().solve(&inner.v().matmul(&y)?.checked_add(&rhs)?)?;
    }
    Ok(y)
}

/// Two-stage iteration with an explicit inner splitting `U = F - G`.
///
/// Hitting `max_outer` is not an error: the last iterate is returned with
/// `converged = false` (see [`IterationReport::ensure_converged`]).
pub fn run_two_stage(
    a: &DenseMatrix,
    b: &DenseMatrix,
    outer: &Splitting,
    inner: &Splitting,
    cfg: &TwoStageConfig,
) -> Result<(DenseMatrix, IterationReport)> {
    cfg.validate()?;
    check_system(a, b, outer)?;
    if !outer.is_split_by(inner) {
        return Err(Error::HypothesisMismatch("inner splitting does not split the outer U".into()));
    }
    let radius = if cfg.with_radius {
        Some(spectral_radius(&build_t(outer, inner, cfg.schedule.at(0))?, RADIUS_TOL)?)
    } else {
        None
    };

    let mut x = initial_iterate(cfg, a.rows(), b.cols())?;
    let mut history = Vec::new();
    for k in 0..cfg.max_outer {
        let y = two_stage_step(outer, inner, &x, b, cfg.schedule.at(k))?;
        let delta = advance(&mut x, y);
        history.push(delta);
        if delta <= cfg.eps {
            break;
        }
    }
    let report = finish(a, b, &x, history, cfg.eps, radius)?;
    Ok((x, report))
}

/// Stationary two-stage iteration with inner SOR(`cfg.omega`) on `U`.
pub fn run_stationary(
    a: &DenseMatrix,
    b: &DenseMatrix,
    outer: &Splitting,
    cfg: &TwoStageConfig,
) -> Result<(DenseMatrix, IterationReport)> {
    if !cfg.schedule.is_stationary() {
        return Err(Error::InvalidConfig("stationary run needs a constant schedule".into()));
    }
    let inner = Splitting::sor(outer.u(), cfg.omega)?;
    run_two_stage(a, b, outer, &inner, cfg)
}

/// Two-stage iteration following `cfg.schedule`, with inner SOR(`cfg.omega`) on `U`.
pub fn run_nonstationary(
    a: &DenseMatrix,
    b: &DenseMatrix,
    outer: &Splitting,
    cfg: &TwoStageConfig,
) -> Result<(DenseMatrix, IterationReport)> {
    let inner = Splitting::sor(outer.u(), cfg.omega)?;
    run_two_stage(a, b, outer, &inner, cfg)
}

/// Classical iteration `x_{k+1} = U^-1 (V x_k + b)`; `cfg.schedule` and `cfg.omega` are ignored.
pub fn run_one_stage(
    a: &DenseMatrix,
    b: &DenseMatrix,
    splitting: &Splitting,
    cfg: &TwoStageConfig,
) -> Result<(DenseMatrix, IterationReport)> {
    cfg.validate()?;
    check_system(a, b, splitting)?;
    let radius = if cfg.with_radius {
        Some(splitting.spectral_radius()?)
    } else {
        None
    };
    let mut x = initial_iterate(cfg, a.rows(), b.cols())?;
    let mut history = Vec::new();
    for _ in 0..cfg.max_outer {
        let rhs = splitting.v().matmul(&x)?.checked_add(b)?;
        let y = splitting.u_factors().solve(&rhs)?;
        let delta = advance(&mut x, y);
        history.push(delta);
        if delta <= cfg.eps {
            break;
        }
    }
    let report = finish(a, b, &x, history, cfg.eps, radius)?;
    Ok((x, report))
}
