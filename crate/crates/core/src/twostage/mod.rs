//! Two-stage (outer/inner) splitting iterations.

mod monotone;
mod operators;
mod solver;

pub use monotone::{bracketing_initials, monotone_bracket, monotone_bracket_with, MonotoneRun};
pub use operators::{build_p_inv, build_p_inv_right, build_t, build_t_closed_form, build_t_hat};
pub use solver::{
    run_nonstationary, run_one_stage, run_stationary, run_two_stage, two_stage_step, IterationReport, Schedule,
    TwoStageConfig,
};
