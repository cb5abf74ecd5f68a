//! Command implementations behind the `twostage` binary.
//!
//! Each command returns a report that renders as JSON or CSV, together with
//! the exit status the binary should use. Errors carry their own status; see
//! [`error`] for the table.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;
pub mod sweep;

pub use commands::Outcome;
pub use error::CliError;
pub use output::{Format, Render};
pub use sweep::{SweepConfig, SweepRow, SweepTable};
