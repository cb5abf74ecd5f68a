use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use twostage_cli::commands::{
    self, AgeInput, CompareInput, MonotoneOptions, OuterKind, SolveOptions,
};
use twostage_cli::error::{CliResult, EXIT_NO_CONVERGENCE};
use twostage_cli::input::read_params;
use twostage_cli::sweep::{sweep, SweepConfig, DEFAULT_OMEGAS};
use twostage_cli::{Format, Outcome, Render};
use twostage_core::{NgmMethod, TwoStageConfig};

#[derive(Parser)]
#[command(name = "twostage", version, about = "Two-stage splitting iterations and next-generation matrices")]
struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum OuterArg {
    Jacobi,
    GaussSeidel,
    Sor,
}

#[derive(Clone, Copy, ValueEnum)]
enum NgmMethodArg {
    Direct,
    Twostage,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMethodArg {
    OneStage,
    TwoStage,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a splitting A = U - V with respect to a cone.
    Classify {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        v: PathBuf,
        /// `orthant` or a CSV file with the cone generators as columns.
        #[arg(long, default_value = "orthant")]
        cone: String,
    },
    /// Solve A X = B iteratively.
    Solve {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long, value_enum, default_value = "two-stage")]
        method: SolveMethodArg,
        #[arg(long, value_enum, default_value = "jacobi")]
        outer: OuterArg,
        /// Relaxation of an SOR outer splitting.
        #[arg(long, default_value_t = 1.0)]
        outer_omega: f64,
        /// Relaxation of the inner SOR splitting.
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        max_outer: usize,
        /// Also report the spectral radius of the iteration operator.
        #[arg(long)]
        radius: bool,
    },
    /// Basic reproduction number of the SAIUQR model.
    Ngm {
        #[arg(long)]
        params: PathBuf,
        #[arg(long)]
        contact: Option<PathBuf>,
        #[arg(long)]
        populations: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "direct")]
        method: NgmMethodArg,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 1e-12)]
        eps: f64,
        #[arg(long, default_value_t = 100_000)]
        max_outer: usize,
    },
    /// Iteration counts of one-stage and two-stage schemes over reinfection rates and sizes.
    Table1 {
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = [0.07, 0.08, 0.09, 0.10])]
        phis: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 64])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1e-8)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 100_000)]
        max_outer: usize,
    },
    /// Paired iterations from below and above the solution of A x = B e_1.
    Monotone {
        #[arg(long)]
        params: PathBuf,
        /// Lower start, comma separated; computed automatically when omitted.
        #[arg(long, value_delimiter = ',')]
        x0: Option<Vec<f64>>,
        /// Upper start, comma separated; computed automatically when omitted.
        #[arg(long, value_delimiter = ',')]
        y0: Option<Vec<f64>>,
        #[arg(long, default_value_t = 1e-10)]
        eps: f64,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        #[arg(long, default_value_t = 100_000)]
        max_outer: usize,
    },
    /// Compare spectral radii of two splittings, or of two inner splittings under one outer splitting.
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        u1: Option<PathBuf>,
        #[arg(long)]
        v1: Option<PathBuf>,
        #[arg(long)]
        u2: Option<PathBuf>,
        #[arg(long)]
        v2: Option<PathBuf>,
        /// Outer U for a two-stage comparison.
        #[arg(long, requires_all = ["v", "f1", "g1", "f2", "g2"])]
        u: Option<PathBuf>,
        #[arg(long)]
        v: Option<PathBuf>,
        #[arg(long)]
        f1: Option<PathBuf>,
        #[arg(long)]
        g1: Option<PathBuf>,
        #[arg(long)]
        f2: Option<PathBuf>,
        #[arg(long)]
        g2: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        s: usize,
        #[arg(long, default_value = "orthant")]
        cone: String,
    },
}

fn emit<R: Render>(outcome: Outcome<R>, format: Format) -> u8 {
    print!("{}", outcome.report.render(format));
    outcome.code
}

fn pick(format: Option<FormatArg>, default: Format) -> Format {
    match format {
        Some(FormatArg::Json) => Format::Json,
        Some(FormatArg::Csv) => Format::Csv,
        None => default,
    }
}

fn stationary(s: usize, omega: f64, eps: f64, max_outer: usize) -> TwoStageConfig {
    TwoStageConfig {
        max_outer,
        ..TwoStageConfig::stationary(s, omega, eps)
    }
}

fn run(cli: Cli) -> CliResult<u8> {
    let fmt = cli.format;
    Ok(match cli.command {
        Command::Classify { a, u, v, cone } => emit(commands::classify(&a, &u, &v, &cone)?, pick(fmt, Format::Json)),
        Command::Solve {
            a,
            b,
            method,
            outer,
            outer_omega,
            omega,
            s,
            eps,
            max_outer,
            radius,
        } => {
            let opts = SolveOptions {
                two_stage: matches!(method, SolveMethodArg::TwoStage),
                outer: match outer {
                    OuterArg::Jacobi => OuterKind::Jacobi,
                    OuterArg::GaussSeidel => OuterKind::GaussSeidel,
                    OuterArg::Sor => OuterKind::Sor,
                },
                outer_omega,
                config: TwoStageConfig {
                    with_radius: radius,
                    ..stationary(s, omega, eps, max_outer)
                },
            };
            emit(commands::solve(&a, &b, &opts)?, pick(fmt, Format::Json))
        }
        Command::Ngm {
            params,
            contact,
            populations,
            method,
            omega,
            s,
            eps,
            max_outer,
        } => {
            let method = match method {
                NgmMethodArg::Direct => NgmMethod::Direct,
                NgmMethodArg::Twostage => NgmMethod::TwoStage(stationary(s, omega, eps, max_outer)),
            };
            let age = AgeInput { contact, populations };
            emit(commands::ngm_command(&params, &age, &method)?, pick(fmt, Format::Json))
        }
        Command::Table1 {
            params,
            phis,
            sizes,
            eps,
            s,
            max_outer,
        } => {
            let p = read_params(&params)?;
            let cfg = SweepConfig {
                phis,
                sizes,
                omegas: DEFAULT_OMEGAS,
                eps,
                s,
                max_outer,
            };
            let table = sweep(&p, &cfg)?;
            let code = if table.all_converged() { 0 } else { EXIT_NO_CONVERGENCE };
            emit(Outcome { report: table, code }, pick(fmt, Format::Csv))
        }
        Command::Monotone {
            params,
            x0,
            y0,
            eps,
            s,
            omega,
            max_outer,
        } => {
            let opts = MonotoneOptions {
                x0,
                y0,
                config: stationary(s, omega, eps, max_outer),
            };
            emit(commands::monotone_command(&params, &opts)?, pick(fmt, Format::Csv))
        }
        Command::Compare {
            a,
            u1,
            v1,
            u2,
            v2,
            u,
            v,
            f1,
            g1,
            f2,
            g2,
            s,
            cone,
        } => {
            let input = match (u, v, f1, g1, f2, g2) {
                (Some(u), Some(v), Some(f1), Some(g1), Some(f2), Some(g2)) => CompareInput::TwoStage {
                    a,
                    outer: (u, v),
                    first: (f1, g1),
                    second: (f2, g2),
                    s,
                },
                _ => match (u1, v1, u2, v2) {
                    (Some(u1), Some(v1), Some(u2), Some(v2)) => CompareInput::Classical {
                        a,
                        first: (u1, v1),
                        second: (u2, v2),
                    },
                    _ => {
                        return Err(twostage_cli::CliError::parse(
                            "compare needs --u1 --v1 --u2 --v2, or --u --v --f1 --g1 --f2 --g2",
                        ))
                    }
                },
            };
            emit(commands::compare(&input, &cone)?, pick(fmt, Format::Json))
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
