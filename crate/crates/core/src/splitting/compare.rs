//! Hypothesis-conditioned spectral-radius comparisons.
//!
//! Nothing here claims an ordering unless every hypothesis of the rule has
//! been verified numerically. A verified rule whose predicted ordering fails
//! is reported as [`Error::ComparisonViolated`].

use std::fmt;

use crate::cone::SimplicialCone;
use crate::error::{Error, Result};
use crate::linalg::{inverse, solve_right, spectral_radius, DenseMatrix};
use crate::twostage::{build_p_inv, build_t};

use super::{commutation_holds, Splitting, SplittingClass, COMMUTATION_TOL, RADIUS_TOL};

/// Slack allowed on a predicted `rho1 <= rho2`.
pub const COMPARISON_SLACK: f64 = 1e-9;

/// Ordering rules for two splittings of the same monotone matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComparisonRule {
    /// Both weak regular of type II and `V2 >= V1`.
    VOrderTypeII,
    /// Weak regular of different types and `U1^-1 >= U2^-1`.
    InverseOrderMixedTypes,
    /// Both weak regular of type II and `U2 >= U1 >= 0`.
    UOrderTypeII,
}

impl fmt::Display for ComparisonRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComparisonRule::VOrderTypeII => "type II pair with V2 >= V1",
            ComparisonRule::InverseOrderMixedTypes => "mixed-type pair with U1^-1 >= U2^-1",
            ComparisonRule::UOrderTypeII => "type II pair with U2 >= U1 >= 0",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub class1: SplittingClass,
    pub class2: SplittingClass,
    pub rho1: f64,
    pub rho2: f64,
    /// `V2 >=_K V1`.
    pub v_order: bool,
    /// `U1^-1 >=_K U2^-1`.
    pub u_inverse_order: bool,
    /// `U2 >=_K U1 >=_K 0`.
    pub u_order: bool,
    /// Rules whose full hypothesis set holds; each predicts `rho1 <= rho2 < 1`.
    pub applied: Vec<ComparisonRule>,
}

fn check_prediction(rule: impl fmt::Display, rho1: f64, rho2: f64) -> Result<()> {
    if rho1 <= rho2 + COMPARISON_SLACK && rho2 < 1.0 {
        Ok(())
    } else {
        Err(Error::ComparisonViolated {
            rule: rule.to_string(),
            rho1,
            rho2,
        })
    }
}

fn require_monotone(a: &DenseMatrix, cone: &SimplicialCone) -> Result<()> {
    let a_inv = inverse(a).map_err(|_| Error::NotMonotone)?;
    if cone.leaves_invariant(&a_inv)? {
        Ok(())
    } else {
        Err(Error::NotMonotone)
    }
}

/// Compares `rho(U1^-1 V1)` and `rho(U2^-1 V2)` for two splittings of one `K`-monotone matrix.
pub fn compare_splittings(s1: &Splitting, s2: &Splitting, cone: &SimplicialCone) -> Result<ComparisonReport> {
    if !s1.same_matrix(s2) {
        return Err(Error::MismatchedA);
    }
    require_monotone(s1.a(), cone)?;

    let class1 = s1.classify(cone)?;
    let class2 = s2.classify(cone)?;
    let rho1 = s1.spectral_radius()?;
    let rho2 = s2.spectral_radius()?;
    let v_order = cone.cone_le(s1.v(), s2.v())?;
    let u_inverse_order = cone.cone_le(&s2.u_inverse(), &s1.u_inverse())?;
    let u_order = cone.cone_le(s1.u(), s2.u())? && cone.leaves_invariant(s1.u())?;

    let mut applied = Vec::new();
    let both_type2 = class1.weak_type2 && class2.weak_type2;
    if both_type2 && v_order {
        applied.push(ComparisonRule::VOrderTypeII);
    }
    let mixed = (class1.weak_type1 && class2.weak_type2) || (class1.weak_type2 && class2.weak_type1);
    if mixed && u_inverse_order {
        applied.push(ComparisonRule::InverseOrderMixedTypes);
    }
    if both_type2 && u_order {
        applied.push(ComparisonRule::UOrderTypeII);
    }
    for rule in &applied {
        check_prediction(rule, rho1, rho2)?;
    }

    Ok(ComparisonReport {
        class1,
        class2,
        rho1,
        rho2,
        v_order,
        u_inverse_order,
        u_order,
        applied,
    })
}

/// Ordering rules for two inner splittings `U = F - G = F' - G'` under a common outer splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoStageRule {
    /// Type II inners, commuting, `U >= 0` and `G'F'^-1 >= GF^-1`.
    RightIterationOrderNonnegU,
    /// Type II inners, commuting, `G >= G F^-1 G` and `G'F'^-1 >= GF^-1`.
    RightIterationOrderDominantG,
    /// Type II inners, commuting, `G'F'^-1 >= GF^-1` and the first induced splitting is regular.
    RightIterationOrderInducedRegular,
    /// Type II inners, commuting, induced `C' >= C`.
    InducedVOrder,
    /// Type II inners, commuting, second induced splitting regular, `F^-1 >= F'^-1`, `F'^-1 G' >= 0`.
    InverseInnerOrder,
    /// First inner type I, second type II and commuting, `F^-1 >= F'^-1`, `F^-1 G >= F'^-1 G'`.
    MixedInnerTypes,
}

impl fmt::Display for TwoStageRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TwoStageRule::RightIterationOrderNonnegU => "G'F'^-1 >= GF^-1 with U >= 0",
            TwoStageRule::RightIterationOrderDominantG => "G'F'^-1 >= GF^-1 with G >= GF^-1G",
            TwoStageRule::RightIterationOrderInducedRegular => "G'F'^-1 >= GF^-1 with regular induced splitting",
            TwoStageRule::InducedVOrder => "induced C' >= C",
            TwoStageRule::InverseInnerOrder => "F^-1 >= F'^-1 with F'^-1G' >= 0",
            TwoStageRule::MixedInnerTypes => "type I vs type II inner with F^-1G >= F'^-1G'",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TwoStageComparison {
    pub outer_regular: bool,
    pub inner1: SplittingClass,
    pub inner2: SplittingClass,
    pub commute1: bool,
    pub commute2: bool,
    pub u_nonneg: bool,
    /// `G'F'^-1 >= G F^-1`.
    pub right_iteration_order: bool,
    /// `G >= G F^-1 G` for the first inner splitting.
    pub g_dominance: bool,
    /// `C = P - A >= 0` for the first induced splitting.
    pub induced1_regular: bool,
    /// `C' = P' - A >= 0` for the second induced splitting.
    pub induced2_regular: bool,
    /// `C' >= C`.
    pub induced_v_order: bool,
    /// `F^-1 >= F'^-1`.
    pub inner_inverse_order: bool,
    /// `F^-1 G >= F'^-1 G'`.
    pub left_iteration_order: bool,
    /// `F'^-1 G' >= 0`.
    pub second_left_nonneg: bool,
    pub rho1: f64,
    pub rho2: f64,
    pub applied: Vec<TwoStageRule>,
}

/// Compares `rho(T_s)` for two inner splittings of `outer.U`, each run with `s` sweeps.
pub fn compare_two_stage(
    outer: &Splitting,
    inner1: &Splitting,
    inner2: &Splitting,
    s: usize,
    cone: &SimplicialCone,
) -> Result<TwoStageComparison> {
    if !outer.is_split_by(inner1) || !outer.is_split_by(inner2) {
        return Err(Error::HypothesisMismatch("inner splittings must split the outer U".into()));
    }
    require_monotone(outer.a(), cone)?;
    let a = outer.a();

    let outer_regular = outer.classify(cone)?.regular;
    let c1 = inner1.classify(cone)?;
    let c2 = inner2.classify(cone)?;
    let commute1 = commutation_holds(outer.v(), inner1.u(), inner1.v(), COMMUTATION_TOL)?;
    let commute2 = commutation_holds(outer.v(), inner2.u(), inner2.v(), COMMUTATION_TOL)?;
    let u_nonneg = cone.leaves_invariant(outer.u())?;

    let gf1 = solve_right(inner1.v(), inner1.u())?;
    let gf2 = solve_right(inner2.v(), inner2.u())?;
    let right_iteration_order = cone.cone_le(&gf1, &gf2)?;
    let g = inner1.v();
    let g_dominance = cone.cone_le(&g.matmul(&inner1.iteration_matrix())?, g)?;

    let induced_v = |inner: &Splitting| -> Result<DenseMatrix> {
        inverse(&build_p_inv(inner, s)?)?.checked_sub(a)
    };
    let cc1 = induced_v(inner1)?;
    let cc2 = induced_v(inner2)?;
    let induced1_regular = cone.leaves_invariant(&cc1)?;
    let induced2_regular = cone.leaves_invariant(&cc2)?;
    let induced_v_order = cone.cone_le(&cc1, &cc2)?;

    let inner_inverse_order = cone.cone_le(&inner2.u_inverse(), &inner1.u_inverse())?;
    let fg1 = inner1.iteration_matrix();
    let fg2 = inner2.iteration_matrix();
    let left_iteration_order = cone.cone_le(&fg2, &fg1)?;
    let second_left_nonneg = cone.leaves_invariant(&fg2)?;

    let rho1 = spectral_radius(&build_t(outer, inner1, s)?, RADIUS_TOL)?;
    let rho2 = spectral_radius(&build_t(outer, inner2, s)?, RADIUS_TOL)?;

    let mut applied = Vec::new();
    if outer_regular {
        let type2_commuting = c1.weak_type2 && c2.weak_type2 && commute1 && commute2;
        if type2_commuting && u_nonneg && right_iteration_order {
            applied.push(TwoStageRule::RightIterationOrderNonnegU);
        }
        if type2_commuting && g_dominance && right_iteration_order {
            applied.push(TwoStageRule::RightIterationOrderDominantG);
        }
        if type2_commuting && right_iteration_order && induced1_regular {
            applied.push(TwoStageRule::RightIterationOrderInducedRegular);
        }
        if type2_commuting && induced_v_order {
            applied.push(TwoStageRule::InducedVOrder);
        }
        if type2_commuting && induced2_regular && inner_inverse_order && second_left_nonneg {
            applied.push(TwoStageRule::InverseInnerOrder);
        }
        if c1.weak_type1 && c2.weak_type2 && commute2 && inner_inverse_order && left_iteration_order {
            applied.push(TwoStageRule::MixedInnerTypes);
        }
    }
    for rule in &applied {
        check_prediction(rule, rho1, rho2)?;
    }

    Ok(TwoStageComparison {
        outer_regular,
        inner1: c1,
        inner2: c2,
        commute1,
        commute2,
        u_nonneg,
        right_iteration_order,
        g_dominance,
        induced1_regular,
        induced2_regular,
        induced_v_order,
        inner_inverse_order,
        left_iteration_order,
        second_left_nonneg,
        rho1,
        rho2,
        applied,
    })
}
