use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twostage_core::epimodel::{build_infection, ngm, AgeStructure};
use twostage_core::splitting::{compare_splittings, compare_two_stage};
use twostage_core::twostage::{bracketing_initials, monotone_bracket_with, run_one_stage, run_two_stage};
use twostage_core::{DenseMatrix, DenseVector, NgmMethod, SaiuqrParams, Splitting, TwoStageConfig};

use crate::error::{CliError, CliResult, EXIT_FAILURE, EXIT_NO_CONVERGENCE, EXIT_SINGULAR_TRANSITION, EXIT_SINGULAR_U};
use crate::input::{read_cone, read_matrix, read_params, read_vector, vector_from};
use crate::output::{csv_line, num, Render};

/// Printed output plus the exit status to use after printing it.
#[derive(Debug, Clone)]
pub struct Outcome<R> {
    pub report: R,
    pub code: u8,
}

impl<R> Outcome<R> {
    fn ok(report: R) -> Self {
        Self { report, code: 0 }
    }
}

pub fn matrix_rows(m: &DenseMatrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

fn core(singular: u8) -> impl Fn(twostage_core::Error) -> CliError {
    move |e| CliError::from_core(e, singular)
}

// ---------------------------------------------------------------- classify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub regular: bool,
    pub weak_type1: bool,
    pub weak_type2: bool,
    pub rho: f64,
    pub convergent: bool,
}

impl Render for ClassifyReport {
    fn csv(&self) -> String {
        csv_line(["regular", "weak_type1", "weak_type2", "rho", "convergent"].map(String::from))
            + &csv_line([
                self.regular.to_string(),
                self.weak_type1.to_string(),
                self.weak_type2.to_string(),
                num(self.rho),
                self.convergent.to_string(),
            ])
    }
}

fn load_splitting(a: &Path, u: &Path, v: &Path) -> CliResult<Splitting> {
    let (a, u, v) = (read_matrix(a)?, read_matrix(u)?, read_matrix(v)?);
    if !a.is_square() || u.rows() != a.rows() || u.cols() != a.cols() || v.rows() != a.rows() || v.cols() != a.cols() {
        return Err(CliError::new(
            crate::error::EXIT_NOT_A_SPLITTING,
            format!("A is {}x{}, U is {}x{}, V is {}x{}", a.rows(), a.cols(), u.rows(), u.cols(), v.rows(), v.cols()),
        ));
    }
    Splitting::new(a, u, v).map_err(core(EXIT_SINGULAR_U))
}

pub fn classify(a: &Path, u: &Path, v: &Path, cone: &str) -> CliResult<Outcome<ClassifyReport>> {
    let s = load_splitting(a, u, v)?;
    let cone = read_cone(cone, s.dim())?;
    let class = s.classify(&cone).map_err(core(EXIT_SINGULAR_U))?;
    let rho = s.spectral_radius().map_err(core(EXIT_FAILURE))?;
    Ok(Outcome::ok(ClassifyReport {
        regular: class.regular,
        weak_type1: class.weak_type1,
        weak_type2: class.weak_type2,
        rho,
        convergent: rho < 1.0,
    }))
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OuterKind {
    Jacobi,
    GaussSeidel,
    Sor,
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub two_stage: bool,
    pub outer: OuterKind,
    pub outer_omega: f64,
    pub config: TwoStageConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub solution: Vec<Vec<f64>>,
    pub outer_iterations: usize,
    pub converged: bool,
    pub final_update_norm: f64,
    pub final_residual: f64,
    pub rho_t: Option<f64>,
}

impl Render for SolveReport {
    fn csv(&self) -> String {
        let cols = self.solution.first().map_or(0, Vec::len);
        let mut out = csv_line((0..cols).map(|j| format!("x{j}")));
        for row in &self.solution {
            out += &csv_line(row.iter().map(|&v| num(v)));
        }
        out
    }
}

pub fn outer_splitting(a: &DenseMatrix, kind: OuterKind, omega: f64) -> twostage_core::Result<Splitting> {
    match kind {
        OuterKind::Jacobi => Splitting::jacobi(a),
        OuterKind::GaussSeidel => Splitting::gauss_seidel(a),
        OuterKind::Sor => Splitting::sor(a, omega),
    }
}

pub fn solve(a: &Path, b: &Path, opts: &SolveOptions) -> CliResult<Outcome<SolveReport>> {
    let a = read_matrix(a)?;
    let b = read_matrix(b)?;
    if !a.is_square() || b.rows() != a.rows() {
        return Err(CliError::parse(format!("A is {}x{} but B has {} rows", a.rows(), a.cols(), b.rows())));
    }
    let outer = outer_splitting(&a, opts.outer, opts.outer_omega).map_err(core(EXIT_SINGULAR_U))?;
    let (x, report) = if opts.two_stage {
        let inner = Splitting::sor(outer.u(), opts.config.omega).map_err(core(EXIT_SINGULAR_U))?;
        run_two_stage(&a, &b, &outer, &inner, &opts.config)
    } else {
        run_one_stage(&a, &b, &outer, &opts.config)
    }
    .map_err(core(EXIT_SINGULAR_U))?;
    let code = if report.converged { 0 } else { EXIT_NO_CONVERGENCE };
    Ok(Outcome {
        report: SolveReport {
            solution: matrix_rows(&x),
            outer_iterations: report.outer_iterations,
            converged: report.converged,
            final_update_norm: report.final_update_norm,
            final_residual: report.final_residual,
            rho_t: report.spectral_radius_t,
        },
        code,
    })
}

// ---------------------------------------------------------------- ngm

#[derive(Debug, Clone, Default)]
pub struct AgeInput {
    pub contact: Option<PathBuf>,
    pub populations: Option<PathBuf>,
}

impl AgeInput {
    pub fn load(&self) -> CliResult<Option<AgeStructure>> {
        match (&self.contact, &self.populations) {
            (None, None) => Ok(None),
            (Some(c), Some(n)) => {
                let contact = read_matrix(c)?;
                let pops = read_vector(n)?.into_vec();
                AgeStructure::new(pops, contact).map(Some).map_err(|e| CliError::parse(e.to_string()))
            }
            _ => Err(CliError::parse("--contact and --populations must be given together")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgmReport {
    pub r0: f64,
    pub ngm_first_row: Vec<f64>,
    /// Sum of all entries of the transition-matrix inverse.
    pub a_inverse_checksum: f64,
    pub size: usize,
    pub outer_iterations: Option<usize>,
}

impl Render for NgmReport {
    fn csv(&self) -> String {
        let mut head = vec!["r0".to_string(), "a_inverse_checksum".into(), "size".into()];
        head.extend((0..self.ngm_first_row.len()).map(|j| format!("ngm_0_{j}")));
        let mut row = vec![num(self.r0), num(self.a_inverse_checksum), self.size.to_string()];
        row.extend(self.ngm_first_row.iter().map(|&v| num(v)));
        csv_line(head) + &csv_line(row)
    }
}

pub fn ngm_report(p: &SaiuqrParams, age: Option<&AgeStructure>, method: &NgmMethod) -> CliResult<NgmReport> {
    let r = ngm(p, age, method).map_err(core(EXIT_SINGULAR_TRANSITION))?;
    Ok(NgmReport {
        r0: r.r0,
        ngm_first_row: r.ngm.row(0).to_vec(),
        a_inverse_checksum: r.transition_inverse.sum(),
        size: r.transition.rows(),
        outer_iterations: r.report.map(|rep| rep.outer_iterations),
    })
}

pub fn ngm_command(params: &Path, age: &AgeInput, method: &NgmMethod) -> CliResult<Outcome<NgmReport>> {
    let p = read_params(params)?;
    let age = age.load()?;
    Ok(Outcome::ok(ngm_report(&p, age.as_ref(), method)?))
}

// ---------------------------------------------------------------- monotone

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub lower: Vec<Vec<f64>>,
    pub upper: Vec<Vec<f64>>,
    pub solution: Vec<f64>,
    pub converged: bool,
    pub a_nonneg: bool,
}

impl Render for MonotoneReport {
    fn csv(&self) -> String {
        let n = self.solution.len();
        let mut head = vec!["k".to_string()];
        head.extend((0..n).map(|i| format!("x{i}")));
        head.extend((0..n).map(|i| format!("y{i}")));
        let mut out = csv_line(head);
        for (k, (x, y)) in self.lower.iter().zip(&self.upper).enumerate() {
            let mut row = vec![k.to_string()];
            row.extend(x.iter().chain(y).map(|&v| num(v)));
            out += &csv_line(row);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct MonotoneOptions {
    pub x0: Option<Vec<f64>>,
    pub y0: Option<Vec<f64>>,
    pub config: TwoStageConfig,
}

/// Bracketing run for `A x = B e_1` with outer Jacobi and inner SOR.
pub fn monotone_report(p: &SaiuqrParams, opts: &MonotoneOptions) -> CliResult<Outcome<MonotoneReport>> {
    let singular = core(EXIT_SINGULAR_TRANSITION);
    let a = twostage_core::epimodel::build_transition(p).map_err(&singular)?;
    let b = build_infection(p).map_err(&singular)?.column(0);
    let n = a.rows();
    let cone = twostage_core::SimplicialCone::orthant(n);
    let outer = Splitting::jacobi(&a).map_err(&singular)?;
    let inner = Splitting::sor(outer.u(), opts.config.omega).map_err(&singular)?;
    let s = opts.config.schedule.at(0);
    let (x0, y0) = match (&opts.x0, &opts.y0) {
        (Some(x), Some(y)) => (vector_from(x), vector_from(y)),
        (None, None) => bracketing_initials(&outer, &inner, s, &b, &cone).map_err(&singular)?,
        (Some(x), None) => (vector_from(x), bracketing_initials(&outer, &inner, s, &b, &cone).map_err(&singular)?.1),
        (None, Some(y)) => (bracketing_initials(&outer, &inner, s, &b, &cone).map_err(&singular)?.0, vector_from(y)),
    };
    for v in [&x0, &y0] {
        if v.len() != n {
            return Err(CliError::parse(format!("initial vectors need {n} components, got {}", v.len())));
        }
    }
    let run = monotone_bracket_with(&a, &b, &x0, &y0, &outer, &inner, &opts.config, &cone).map_err(&singular)?;
    let code = if run.report.converged { 0 } else { EXIT_NO_CONVERGENCE };
    let rows = |v: &[DenseVector]| v.iter().map(|x| x.as_slice().to_vec()).collect();
    Ok(Outcome {
        report: MonotoneReport {
            lower: rows(&run.lower),
            upper: rows(&run.upper),
            solution: run.solution.into_vec(),
            converged: run.report.converged,
            a_nonneg: run.a_nonneg,
        },
        code,
    })
}

pub fn monotone_command(params: &Path, opts: &MonotoneOptions) -> CliResult<Outcome<MonotoneReport>> {
    monotone_report(&read_params(params)?, opts)
}

// ---------------------------------------------------------------- compare

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub rho1: f64,
    pub rho2: f64,
    pub applied: Vec<String>,
    /// Hypothesis flags as `(name, holds)` pairs.
    pub hypotheses: Vec<(String, bool)>,
}

impl Render for CompareReport {
    fn csv(&self) -> String {
        let mut head = vec!["rho1".to_string(), "rho2".into(), "applied".into()];
        head.extend(self.hypotheses.iter().map(|(k, _)| k.clone()));
        let mut row = vec![num(self.rho1), num(self.rho2), format!("\"{}\"", self.applied.join(";"))];
        row.extend(self.hypotheses.iter().map(|(_, v)| v.to_string()));
        csv_line(head) + &csv_line(row)
    }
}

/// Matrices for a comparison: either two splittings of `A`, or one outer splitting and two inner ones.
#[derive(Debug, Clone)]
pub enum CompareInput {
    Classical {
        a: PathBuf,
        first: (PathBuf, PathBuf),
        second: (PathBuf, PathBuf),
    },
    TwoStage {
        a: PathBuf,
        outer: (PathBuf, PathBuf),
        first: (PathBuf, PathBuf),
        second: (PathBuf, PathBuf),
        s: usize,
    },
}

fn flag(name: &str, v: bool) -> (String, bool) {
    (name.to_string(), v)
}

pub fn compare(input: &CompareInput, cone: &str) -> CliResult<Outcome<CompareReport>> {
    let report = match input {
        CompareInput::Classical { a, first, second } => {
            let s1 = load_splitting(a, &first.0, &first.1)?;
            let s2 = load_splitting(a, &second.0, &second.1)?;
            let cone = read_cone(cone, s1.dim())?;
            let r = compare_splittings(&s1, &s2, &cone).map_err(core(EXIT_SINGULAR_U))?;
            CompareReport {
                rho1: r.rho1,
                rho2: r.rho2,
                applied: r.applied.iter().map(ToString::to_string).collect(),
                hypotheses: vec![
                    flag("first_regular", r.class1.regular),
                    flag("first_weak_type1", r.class1.weak_type1),
                    flag("first_weak_type2", r.class1.weak_type2),
                    flag("second_regular", r.class2.regular),
                    flag("second_weak_type1", r.class2.weak_type1),
                    flag("second_weak_type2", r.class2.weak_type2),
                    flag("v_order", r.v_order),
                    flag("u_inverse_order", r.u_inverse_order),
                    flag("u_order", r.u_order),
                ],
            }
        }
        CompareInput::TwoStage {
            a,
            outer,
            first,
            second,
            s,
        } => {
            let outer = load_splitting(a, &outer.0, &outer.1)?;
            let u = outer.u().clone();
            let inner = |(f, g): &(PathBuf, PathBuf)| -> CliResult<Splitting> {
                let (f, g) = (read_matrix(f)?, read_matrix(g)?);
                Splitting::new(u.clone(), f, g).map_err(core(EXIT_SINGULAR_U))
            };
            let (i1, i2) = (inner(first)?, inner(second)?);
            let cone = read_cone(cone, outer.dim())?;
            let r = compare_two_stage(&outer, &i1, &i2, *s, &cone).map_err(core(EXIT_SINGULAR_U))?;
            CompareReport {
                rho1: r.rho1,
                rho2: r.rho2,
                applied: r.applied.iter().map(ToString::to_string).collect(),
                hypotheses: vec![
                    flag("outer_regular", r.outer_regular),
                    flag("first_weak_type1", r.inner1.weak_type1),
                    flag("first_weak_type2", r.inner1.weak_type2),
                    flag("second_weak_type1", r.inner2.weak_type1),
                    flag("second_weak_type2", r.inner2.weak_type2),
                    flag("first_commutes", r.commute1),
                    flag("second_commutes", r.commute2),
                    flag("u_nonneg", r.u_nonneg),
                    flag("right_iteration_order", r.right_iteration_order),
                    flag("g_dominance", r.g_dominance),
                    flag("first_induced_regular", r.induced1_regular),
                    flag("second_induced_regular", r.induced2_regular),
                    flag("induced_v_order", r.induced_v_order),
                    flag("inner_inverse_order", r.inner_inverse_order),
                    flag("left_iteration_order", r.left_iteration_order),
                    flag("second_left_nonneg", r.second_left_nonneg),
                ],
            }
        }
    };
    Ok(Outcome::ok(report))
}
