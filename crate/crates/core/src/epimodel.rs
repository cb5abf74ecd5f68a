//! SAIUQR transmission model: transition and new-infection matrices, age
//! structure, contact composition and the next-generation matrix.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::{inverse, spectral_radius, DenseMatrix, DenseVector};
use crate::splitting::Splitting;
use crate::twostage::{run_stationary, IterationReport, TwoStageConfig};

const R0_TOL: f64 = 1e-13;

/// Rate parameters of the SAIUQR model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaiuqrParams {
    pub mu: f64,
    pub beta: f64,
    pub alpha_a: f64,
    pub alpha_i: f64,
    pub alpha_u: f64,
    pub xi_a: f64,
    pub gamma_a: f64,
    pub gamma_q: f64,
    pub delta: f64,
    pub eta_a: f64,
    pub eta_i: f64,
    pub eta_u: f64,
    pub theta: f64,
    pub rho_s: f64,
    pub phi: f64,
}

pub const PARAM_KEYS: [&str; 15] = [
    "mu", "beta", "alpha_a", "alpha_i", "alpha_u", "xi_a", "gamma_a", "gamma_q", "delta", "eta_a", "eta_i",
    "eta_u", "theta", "rho_s", "phi",
];

impl SaiuqrParams {
    /// Reference parameter set (reinfection rate 0.10).
    pub fn reference() -> Self {
        Self {
            mu: 1200.0,
            beta: 1.10,
            alpha_a: 0.264,
            alpha_i: 0.76,
            alpha_u: 0.96,
            xi_a: 0.07151,
            gamma_a: 0.0012,
            gamma_q: 0.0015,
            delta: 0.03,
            eta_a: 1.0 / 7.48,
            eta_i: 1.0 / 7.0,
            eta_u: 1.0 / 7.0,
            theta: 0.8,
            rho_s: 0.5,
            phi: 0.1,
        }
    }

    pub fn with_phi(mut self, phi: f64) -> Self {
        self.phi = phi;
        self
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    fn fields(&self) -> [f64; 15] {
        [
            self.mu,
            self.beta,
            self.alpha_a,
            self.alpha_i,
            self.alpha_u,
            self.xi_a,
            self.gamma_a,
            self.gamma_q,
            self.delta,
            self.eta_a,
            self.eta_i,
            self.eta_u,
            self.theta,
            self.rho_s,
            self.phi,
        ]
    }

    fn field_mut(&mut self, key: &str) -> Option<&mut f64> {
        Some(match key {
            "mu" => &mut self.mu,
            "beta" => &mut self.beta,
            "alpha_a" => &mut self.alpha_a,
            "alpha_i" => &mut self.alpha_i,
            "alpha_u" => &mut self.alpha_u,
            "xi_a" => &mut self.xi_a,
            "gamma_a" => &mut self.gamma_a,
            "gamma_q" => &mut self.gamma_q,
            "delta" => &mut self.delta,
            "eta_a" => &mut self.eta_a,
            "eta_i" => &mut self.eta_i,
            "eta_u" => &mut self.eta_u,
            "theta" => &mut self.theta,
            "rho_s" => &mut self.rho_s,
            "phi" => &mut self.phi,
            _ => return None,
        })
    }

    pub fn validate(&self) -> Result<()> {
        for (key, value) in PARAM_KEYS.iter().zip(self.fields()) {
            if !value.is_finite() {
                return Err(Error::InvalidParams(format!("{key} = {value} is not finite")));
            }
            if value < 0.0 {
                return Err(Error::InvalidParams(format!("{key} = {value} is negative")));
            }
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::InvalidParams(format!("theta = {} must lie in (0, 1)", self.theta)));
        }
        if self.rho_s > 1.0 {
            return Err(Error::InvalidParams(format!("rho_s = {} must lie in [0, 1]", self.rho_s)));
        }
        Ok(())
    }

    /// Parses `key = value` lines over the reference set; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut p = Self::reference();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {line:?}")))?;
            let key = key.trim();
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad value for {key}: {e}")))?;
            let slot = p
                .field_mut(key)
                .ok_or_else(|| parse_err(format!("unknown parameter {key:?}")))?;
            *slot = value;
        }
        p.validate()?;
        Ok(p)
    }
}

impl fmt::Display for SaiuqrParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (key, value) in PARAM_KEYS.iter().zip(self.fields()) {
            writeln!(f, "{key} = {value:?}")?;
        }
        Ok(())
    }
}

/// The 4x4 transition matrix (an M-matrix for valid parameters).
pub fn build_transition(p: &SaiuqrParams) -> Result<DenseMatrix> {
    p.validate()?;
    let mut a = DenseMatrix::zeros(4, 4);
    a[(0, 0)] = p.xi_a + p.gamma_a + p.eta_a + p.delta;
    a[(0, 3)] = -p.phi;
    a[(1, 0)] = -p.theta * p.gamma_a;
    a[(1, 1)] = p.eta_i + p.delta;
    a[(1, 3)] = -(1.0 - p.rho_s) * p.gamma_q;
    a[(2, 0)] = -(1.0 - p.theta) * p.gamma_a;
    a[(2, 2)] = p.eta_u + p.delta;
    a[(3, 0)] = -p.xi_a;
    a[(3, 3)] = p.gamma_q + p.delta;
    Ok(a)
}

/// The 4x4 new-infection matrix; only the first row is nonzero.
pub fn build_infection(p: &SaiuqrParams) -> Result<DenseMatrix> {
    p.validate()?;
    let mut b = DenseMatrix::zeros(4, 4);
    b[(0, 0)] = p.beta * p.alpha_a;
    b[(0, 1)] = p.beta * p.alpha_i;
    b[(0, 2)] = p.beta * p.alpha_u;
    Ok(b)
}

/// Population sizes per age group and the contact matrix between groups.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeStructure {
    populations: Vec<f64>,
    contact: DenseMatrix,
}

impl AgeStructure {
    pub fn new(populations: Vec<f64>, contact: DenseMatrix) -> Result<Self> {
        let m = populations.len();
        if m == 0 {
            return Err(Error::InvalidParams("at least one age group is required".into()));
        }
        if let Some(n) = populations.iter().find(|n| !(n.is_finite() && **n > 0.0)) {
            return Err(Error::InvalidParams(format!("population sizes must be positive, got {n}")));
        }
        if contact.rows() != m || contact.cols() != m {
            return Err(Error::dims(
                "contact matrix",
                format!("{m}x{m}"),
                format!("{}x{}", contact.rows(), contact.cols()),
            ));
        }
        Ok(Self {
            populations,
            contact,
        })
    }

    /// Contacts only within each group, with identity contact matrix.
    pub fn same_group_only(populations: Vec<f64>) -> Result<Self> {
        let m = populations.len();
        Self::new(populations, DenseMatrix::identity(m))
    }

    pub fn groups(&self) -> usize {
        self.populations.len()
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn contact(&self) -> &DenseMatrix {
        &self.contact
    }

    /// `K_ij = C_ij N_i / N_j`.
    pub fn kernel(&self) -> DenseMatrix {
        let n = &self.populations;
        DenseMatrix::from_fn(self.groups(), self.groups(), |i, j| self.contact[(i, j)] * n[i] / n[j])
    }
}

/// A control `u(t)`; values are clamped to `[0, 1]` when evaluated.
pub type Control = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Contact matrix split by setting, with time-dependent controls on all but home.
#[derive(Clone)]
pub struct ContactComponents {
    pub home: DenseMatrix,
    pub work: DenseMatrix,
    pub school: DenseMatrix,
    pub other: DenseMatrix,
    pub u_work: Control,
    pub u_school: Control,
    pub u_other: Control,
}

impl fmt::Debug for ContactComponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContactComponents")
            .field("home", &self.home)
            .field("work", &self.work)
            .field("school", &self.school)
            .field("other", &self.other)
            .finish_non_exhaustive()
    }
}

pub fn constant_control(value: f64) -> Control {
    Arc::new(move |_| value)
}

impl ContactComponents {
    /// All controls fixed at 1 (no intervention).
    pub fn new(home: DenseMatrix, work: DenseMatrix, school: DenseMatrix, other: DenseMatrix) -> Result<Self> {
        for (name, m) in [("work", &work), ("school", &school), ("other", &other)] {
            if m.rows() != home.rows() || m.cols() != home.cols() {
                return Err(Error::dims(
                    "contact components",
                    format!("{}x{} like home", home.rows(), home.cols()),
                    format!("{name} {}x{}", m.rows(), m.cols()),
                ));
            }
        }
        Ok(Self {
            home,
            work,
            school,
            other,
            u_work: constant_control(1.0),
            u_school: constant_control(1.0),
            u_other: constant_control(1.0),
        })
    }

    pub fn with_controls(mut self, work: Control, school: Control, other: Control) -> Self {
        self.u_work = work;
        self.u_school = school;
        self.u_other = other;
        self
    }

    /// `C(t) = C_H + u_W(t) C_W + u_S(t) C_S + u_O(t) C_O`.
    pub fn contact_matrix(&self, t: f64) -> DenseMatrix {
        let clamp = |u: &Control| u(t).clamp(0.0, 1.0);
        let (uw, us, uo) = (clamp(&self.u_work), clamp(&self.u_school), clamp(&self.u_other));
        DenseMatrix::from_fn(self.home.rows(), self.home.cols(), |i, j| {
            self.home[(i, j)] + uw * self.work[(i, j)] + us * self.school[(i, j)] + uo * self.other[(i, j)]
        })
    }
}

/// `(A4 ⊗ I_M, B4 ⊗ K)`.
pub fn expand_age(a4: &DenseMatrix, b4: &DenseMatrix, age: &AgeStructure) -> Result<(DenseMatrix, DenseMatrix)> {
    for m in [a4, b4] {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::dims("expand_age", "4x4", format!("{}x{}", m.rows(), m.cols())));
        }
    }
    Ok((a4.kron(&DenseMatrix::identity(age.groups())), b4.kron(&age.kernel())))
}

/// Shares of the contact matrix attributed to each infective class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncidenceFractions {
    pub f_a: f64,
    pub f_s: f64,
    pub f_u: f64,
}

impl IncidenceFractions {
    /// Defaults to the adjustment factors `(alpha_a, alpha_i, alpha_u)`.
    pub fn from_params(p: &SaiuqrParams) -> Self {
        Self {
            f_a: p.alpha_a,
            f_s: p.alpha_i,
            f_u: p.alpha_u,
        }
    }
}

/// Infectives per age group.
#[derive(Debug, Clone, PartialEq)]
pub struct Infectives {
    pub asymptomatic: DenseVector,
    pub symptomatic: DenseVector,
    pub unreported: DenseVector,
}

/// Force of infection per group, `beta sum_j C_ij (f_a I^a_j + f_s I^s_j + f_u I^u_j) / N_j`.
///
/// `beta` defaults to `p.beta`.
pub fn incidence(
    p: &SaiuqrParams,
    age: &AgeStructure,
    fractions: &IncidenceFractions,
    infectives: &Infectives,
    beta: Option<f64>,
) -> Result<DenseVector> {
    let m = age.groups();
    if fractions.f_a < 0.0 || fractions.f_s < 0.0 || fractions.f_u < 0.0 {
        return Err(Error::InvalidParams("incidence fractions must be nonnegative".into()));
    }
    for v in [&infectives.asymptomatic, &infectives.symptomatic, &infectives.unreported] {
        if v.len() != m {
            return Err(Error::dims("infectives", m, v.len()));
        }
    }
    let beta = beta.unwrap_or(p.beta);
    let weighted: Vec<f64> = (0..m)
        .map(|j| {
            (fractions.f_a * infectives.asymptomatic[j]
                + fractions.f_s * infectives.symptomatic[j]
                + fractions.f_u * infectives.unreported[j])
                / age.populations()[j]
        })
        .collect();
    let lambda = (0..m)
        .map(|i| beta * age.contact().row(i).iter().zip(&weighted).map(|(c, w)| c * w).sum::<f64>())
        .collect();
    Ok(DenseVector::from_vec(lambda))
}

/// Force of infection at time `t` with a time-dependent contact matrix and optional `beta(t)`.
pub fn incidence_at(
    p: &SaiuqrParams,
    populations: &[f64],
    contacts: &ContactComponents,
    t: f64,
    fractions: &IncidenceFractions,
    infectives: &Infectives,
    beta: Option<&dyn Fn(f64) -> f64>,
) -> Result<DenseVector> {
    let age = AgeStructure::new(populations.to_vec(), contacts.contact_matrix(t))?;
    incidence(p, &age, fractions, infectives, beta.map(|b| b(t)))
}

/// How `A^-1` and the next-generation matrix are obtained.
#[derive(Debug, Clone)]
pub enum NgmMethod {
    Direct,
    /// Solve `A X = B` by the stationary two-stage iteration (outer Jacobi, inner SOR).
    TwoStage(TwoStageConfig),
}

#[derive(Debug, Clone)]
pub struct NgmResult {
    pub transition: DenseMatrix,
    pub infection: DenseMatrix,
    pub transition_inverse: DenseMatrix,
    /// `B A^-1`.
    pub ngm: DenseMatrix,
    pub r0: f64,
    /// Iteration report of the `A X = B` solve (two-stage only).
    pub report: Option<IterationReport>,
}

/// Next-generation matrix and basic reproduction number.
pub fn ngm(p: &SaiuqrParams, age: Option<&AgeStructure>, method: &NgmMethod) -> Result<NgmResult> {
    let a4 = build_transition(p)?;
    let b4 = build_infection(p)?;
    let (a, b) = match age {
        Some(age) => expand_age(&a4, &b4, age)?,
        None => (a4, b4),
    };
    match method {
        NgmMethod::Direct => {
            let a_inv = inverse(&a)?;
            let ngm = b.matmul(&a_inv)?;
            let r0 = spectral_radius(&ngm, R0_TOL)?;
            Ok(NgmResult {
                transition: a,
                infection: b,
                transition_inverse: a_inv,
                ngm,
                r0,
                report: None,
            })
        }
        NgmMethod::TwoStage(cfg) => {
            let outer = Splitting::jacobi(&a)?;
            let (x, report) = run_stationary(&a, &b, &outer, cfg)?;
            report.ensure_converged()?;
            let (a_inv, inv_report) = run_stationary(&a, &DenseMatrix::identity(a.rows()), &outer, cfg)?;
            inv_report.ensure_converged()?;
            let ngm = b.matmul(&a_inv)?;
            let r0 = spectral_radius(&x.map(|v| v.max(0.0)), R0_TOL)?;
            Ok(NgmResult {
                transition: a,
                infection: b,
                transition_inverse: a_inv,
                ngm,
                r0,
                report: Some(report),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_mortality_gives_identity() {
        let p = SaiuqrParams {
            mu: 0.0,
            beta: 0.0,
            alpha_a: 0.0,
            alpha_i: 0.0,
            alpha_u: 0.0,
            xi_a: 0.0,
            gamma_a: 0.0,
            gamma_q: 0.0,
            delta: 1.0,
            eta_a: 0.0,
            eta_i: 0.0,
            eta_u: 0.0,
            theta: 0.5,
            rho_s: 0.0,
            phi: 0.0,
        };
        assert_eq!(build_transition(&p).unwrap(), DenseMatrix::identity(4));
        assert_eq!(build_infection(&p).unwrap(), DenseMatrix::zeros(4, 4));
    }

    #[test]
    fn reference_entries() {
        let p = SaiuqrParams::reference();
        let a = build_transition(&p).unwrap();
        assert!((a[(0, 0)] - 0.23639984).abs() < 5e-9);
        assert!((a[(3, 3)] - 0.0315).abs() < 1e-15);
        assert!((a[(1, 3)] + 0.00075).abs() < 1e-15);
        let b = build_infection(&p).unwrap();
        let row = b.row(0);
        for (got, want) in row.iter().zip([0.2904, 0.836, 1.056, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(b.as_slice()[4..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn transition_sign_pattern_and_monotone() {
        let a = build_transition(&SaiuqrParams::reference()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(a[(i, j)] <= 0.0);
                }
            }
        }
        assert!(inverse(&a).unwrap().is_entrywise_nonneg(0.0));
    }

    #[test]
    fn r0_is_first_entry_of_rank_one_ngm() {
        let r = ngm(&SaiuqrParams::reference().with_phi(0.07), None, &NgmMethod::Direct).unwrap();
        assert!((r.r0 - r.ngm[(0, 0)]).abs() < 1e-12 * r.r0);
        assert!(r.ngm.as_slice()[4..].iter().all(|&v| v == 0.0));
        assert!(r.ngm.matmul(&r.transition).unwrap().max_abs_diff(&r.infection) < 1e-8);
    }

    #[test]
    fn zero_beta_zero_r0() {
        let r = ngm(&SaiuqrParams::reference().with_beta(0.0), None, &NgmMethod::Direct).unwrap();
        assert_eq!(r.r0, 0.0);
    }

    #[test]
    fn parse_overrides_and_errors() {
        let p = SaiuqrParams::parse("# comment\nbeta = 0\nphi=0.07 # inline\n\n").unwrap();
        assert_eq!(p.beta, 0.0);
        assert_eq!(p.phi, 0.07);
        assert_eq!(p.mu, 1200.0);
        assert!(matches!(SaiuqrParams::parse("beta 1"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(SaiuqrParams::parse("x=1"), Err(Error::Parse { .. })));
        assert!(matches!(SaiuqrParams::parse("beta=abc"), Err(Error::Parse { .. })));
        assert!(matches!(SaiuqrParams::parse("theta=1"), Err(Error::InvalidParams(_))));
        assert!(matches!(SaiuqrParams::parse("delta=-1"), Err(Error::InvalidParams(_))));
        let round = SaiuqrParams::parse(&SaiuqrParams::reference().to_string()).unwrap();
        assert_eq!(round, SaiuqrParams::reference());
    }

    #[test]
    fn contact_composition() {
        let one = |v: f64| DenseMatrix::from_rows(&[[v]]).unwrap();
        let c = ContactComponents::new(one(1.0), one(2.0), one(3.0), one(4.0)).unwrap();
        assert_eq!(c.contact_matrix(0.0)[(0, 0)], 10.0);
        let off = c.clone().with_controls(constant_control(0.0), constant_control(0.0), constant_control(0.0));
        assert_eq!(off.contact_matrix(5.0)[(0, 0)], 1.0);
        let half = c.clone().with_controls(constant_control(0.5), constant_control(1.0), constant_control(1.0));
        assert_eq!(half.contact_matrix(0.0)[(0, 0)], 1.0 + 1.0 + 3.0 + 4.0);
        let wild = c.with_controls(constant_control(-3.0), constant_control(7.0), Arc::new(|t| t));
        assert_eq!(wild.contact_matrix(0.25)[(0, 0)], 1.0 + 3.0 + 1.0);
        assert!(ContactComponents::new(one(1.0), DenseMatrix::zeros(2, 2), one(0.0), one(0.0)).is_err());
    }

    #[test]
    fn kernel_and_expansion() {
        let age = AgeStructure::new(vec![2.0], DenseMatrix::from_rows(&[[1.0]]).unwrap()).unwrap();
        let a = build_transition(&SaiuqrParams::reference()).unwrap();
        let b = build_infection(&SaiuqrParams::reference()).unwrap();
        let (aa, bb) = expand_age(&a, &b, &age).unwrap();
        assert_eq!((aa, bb), (a.clone(), b.clone()));

        let age = AgeStructure::new(
            vec![1.0, 4.0],
            DenseMatrix::from_rows(&[[1.0, 2.0], [3.0, 4.0]]).unwrap(),
        )
        .unwrap();
        assert_eq!(age.kernel().as_slice(), &[1.0, 0.5, 12.0, 4.0]);
        let (aa, bb) = expand_age(&a, &b, &age).unwrap();
        assert_eq!((aa.rows(), bb.cols()), (8, 8));
        assert!(AgeStructure::new(vec![1.0, 0.0], DenseMatrix::identity(2)).is_err());
        assert!(AgeStructure::new(vec![1.0], DenseMatrix::identity(2)).is_err());
    }

    #[test]
    fn scalar_incidence() {
        let p = SaiuqrParams::reference();
        let age = AgeStructure::new(vec![100.0], DenseMatrix::from_rows(&[[1.0]]).unwrap()).unwrap();
        let inf = Infectives {
            asymptomatic: DenseVector::filled(1, 3.0),
            symptomatic: DenseVector::filled(1, 5.0),
            unreported: DenseVector::filled(1, 7.0),
        };
        let f = IncidenceFractions::from_params(&p);
        let lambda = incidence(&p, &age, &f, &inf, None).unwrap();
        let expected = p.beta * (p.alpha_a * 3.0 + p.alpha_i * 5.0 + p.alpha_u * 7.0) / 100.0;
        assert!((lambda[0] - expected).abs() < 1e-15);

        let doubled = Infectives {
            asymptomatic: inf.asymptomatic.scale(2.0),
            symptomatic: inf.symptomatic.scale(2.0),
            unreported: inf.unreported.scale(2.0),
        };
        assert!((incidence(&p, &age, &f, &doubled, None).unwrap()[0] - 2.0 * expected).abs() < 1e-15);
        let zero = Infectives {
            asymptomatic: DenseVector::zeros(1),
            symptomatic: DenseVector::zeros(1),
            unreported: DenseVector::zeros(1),
        };
        assert_eq!(incidence(&p, &age, &f, &zero, None).unwrap()[0], 0.0);
    }

    #[test]
    fn two_stage_ngm_agrees_with_direct() {
        let p = SaiuqrParams::reference();
        let direct = ngm(&p, None, &NgmMethod::Direct).unwrap();
        let cfg = TwoStageConfig::stationary(2, 1.0, 1e-12);
        let iter = ngm(&p, None, &NgmMethod::TwoStage(cfg)).unwrap();
        assert!((direct.r0 - iter.r0).abs() < 1e-9 * direct.r0);
        assert!(iter.report.unwrap().converged);
    }
}
