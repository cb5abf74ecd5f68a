//! Iteration-count sweep over the reinfection rate and system size.
//!
//! One-stage is the Jacobi iteration on `A`. Two-stage(ω) takes the SOR(ω)
//! splitting of `A` as the outer splitting and runs `s` Jacobi sweeps on its
//! `U` per outer step. Every run starts from zero with right-hand side `B`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twostage_core::epimodel::{build_infection, build_transition, expand_age, AgeStructure};
use twostage_core::linalg::{condition_number_2, spectral_radius};
use twostage_core::twostage::{build_t, run_one_stage, run_two_stage};
use twostage_core::{DenseMatrix, IterationReport, SaiuqrParams, Splitting, TwoStageConfig};

use crate::error::{CliError, CliResult, EXIT_FAILURE, EXIT_SINGULAR_TRANSITION};
use crate::output::{csv_line, num, opt_num, Render};

pub const DEFAULT_PHIS: [f64; 4] = [0.07, 0.08, 0.09, 0.10];
pub const DEFAULT_SIZES: [usize; 2] = [4, 64];
pub const DEFAULT_OMEGAS: [f64; 2] = [1.0, 1.7];

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub phis: Vec<f64>,
    pub sizes: Vec<usize>,
    pub omegas: [f64; 2],
    pub eps: f64,
    pub s: usize,
    pub max_outer: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            phis: DEFAULT_PHIS.to_vec(),
            sizes: DEFAULT_SIZES.to_vec(),
            omegas: DEFAULT_OMEGAS,
            eps: 1e-8,
            s: 2,
            max_outer: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub size: usize,
    pub phi: f64,
    pub one_stage_iters: usize,
    pub two_stage_w1_iters: usize,
    pub two_stage_w17_iters: usize,
    /// 2-norm condition number of `A`, reported for the 4x4 runs.
    pub kappa2: Option<f64>,
    /// Spectral radius of the two-stage operator at the first relaxation, reported for block runs.
    pub rho_t: Option<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

impl SweepTable {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

impl Render for SweepTable {
    fn csv(&self) -> String {
        let mut out = csv_line(
            [
                "size",
                "phi",
                "one_stage_iters",
                "two_stage_w1_iters",
                "two_stage_w17_iters",
                "kappa2",
                "rho_t",
                "converged",
            ]
            .map(String::from),
        );
        for r in &self.rows {
            out += &csv_line([
                r.size.to_string(),
                num(r.phi),
                r.one_stage_iters.to_string(),
                r.two_stage_w1_iters.to_string(),
                r.two_stage_w17_iters.to_string(),
                opt_num(r.kappa2),
                opt_num(r.rho_t),
                r.converged.to_string(),
            ]);
        }
        out
    }
}

fn core(e: twostage_core::Error) -> CliError {
    CliError::from_core(e, EXIT_SINGULAR_TRANSITION)
}

/// `(A, B)` of the given size; sizes above 4 use `size / 4` groups mixing only within themselves.
pub fn system(p: &SaiuqrParams, size: usize) -> CliResult<(DenseMatrix, DenseMatrix)> {
    if size == 0 || size % 4 != 0 {
        return Err(CliError::parse(format!("size must be a positive multiple of 4, got {size}")));
    }
    let a = build_transition(p).map_err(core)?;
    let b = build_infection(p).map_err(core)?;
    if size == 4 {
        return Ok((a, b));
    }
    let age = AgeStructure::same_group_only(vec![1.0; size / 4]).map_err(core)?;
    expand_age(&a, &b, &age).map_err(core)
}

fn two_stage_pair(a: &DenseMatrix, omega: f64) -> twostage_core::Result<(Splitting, Splitting)> {
    let outer = Splitting::sor(a, omega)?;
    let inner = Splitting::jacobi(outer.u())?;
    Ok((outer, inner))
}

fn count(report: &IterationReport) -> usize {
    report.outer_iterations.max(1)
}

pub fn sweep_row(p: &SaiuqrParams, phi: f64, size: usize, cfg: &SweepConfig) -> CliResult<SweepRow> {
    let p = p.with_phi(phi);
    p.validate().map_err(core)?;
    let (a, b) = system(&p, size)?;
    let run_cfg = TwoStageConfig {
        max_outer: cfg.max_outer,
        ..TwoStageConfig::stationary(cfg.s, 1.0, cfg.eps)
    };

    let jacobi = Splitting::jacobi(&a).map_err(core)?;
    let (_, one) = run_one_stage(&a, &b, &jacobi, &run_cfg).map_err(core)?;
    let mut two = Vec::with_capacity(2);
    for omega in cfg.omegas {
        let (outer, inner) = two_stage_pair(&a, omega).map_err(core)?;
        two.push(run_two_stage(&a, &b, &outer, &inner, &run_cfg).map_err(core)?.1);
    }

    let (kappa2, rho_t) = if size == 4 {
        (Some(condition_number_2(&a).map_err(core)?), None)
    } else {
        let (outer, inner) = two_stage_pair(&a, cfg.omegas[0]).map_err(core)?;
        let t = build_t(&outer, &inner, cfg.s).map_err(core)?;
        (None, Some(spectral_radius(&t, 1e-12).map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))?))
    };

    Ok(SweepRow {
        size,
        phi,
        one_stage_iters: count(&one),
        two_stage_w1_iters: count(&two[0]),
        two_stage_w17_iters: count(&two[1]),
        kappa2,
        rho_t,
        converged: one.converged && two.iter().all(|r| r.converged),
    })
}

/// Rows ordered by size, then by the order of `cfg.phis`; computed in parallel.
pub fn sweep(p: &SaiuqrParams, cfg: &SweepConfig) -> CliResult<SweepTable> {
    if cfg.s == 0 || cfg.eps.is_nan() || cfg.eps <= 0.0 {
        return Err(CliError::parse("sweeps need s >= 1 and eps > 0"));
    }
    let jobs: Vec<(usize, f64)> = cfg.sizes.iter().flat_map(|&n| cfg.phis.iter().map(move |&phi| (n, phi))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(size, phi)| sweep_row(p, phi, size, cfg))
        .collect::<CliResult<Vec<_>>>()?;
    Ok(SweepTable { rows })
}
