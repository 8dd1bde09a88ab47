//! `stirap`: compile quantum circuits into pointer-chain Hamiltonians and
//! run the dark-state / spectral / sweep analyses from the command line.
//!
//! Exit codes: 0 on success, 1 on parse/configuration/IO errors (message on
//! stderr), 2 when a numeric invariant fails its tolerance, and for
//! `verify` the number of failed invariant groups (capped at 125).

mod commands;
mod output;
mod verify;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "stirap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct ModelArgs {
    /// Circuit DSL file
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Boundary coupling J
    #[arg(long = "J", default_value_t = 1.0)]
    coupling_j: f64,
    /// Internal coupling M
    #[arg(long = "M", default_value_t = 10.0)]
    coupling_m: f64,
    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overwrite existing output files
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum FamilyArg {
    #[default]
    Identity,
    RandomRot,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum ScheduleArg {
    #[default]
    Linear,
    Smoothstep,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form dark state, its populations, and its kernel
    /// residual; cross-check against the eigensolver zero space
    Darkstate {
        #[command(flatten)]
        model: ModelArgs,
        /// Interpolation parameter in [0, 1]
        #[arg(long, default_value_t = 0.5)]
        s: f64,
        /// Zero-space threshold (default 1e-6·max(J, M))
        #[arg(long = "zero-tol")]
        zero_tol: Option<f64>,
    },
    /// Exact spectrum at one s or across an s grid
    Spectrum {
        #[command(flatten)]
        model: ModelArgs,
        /// Single interpolation parameter
        #[arg(long)]
        s: Option<f64>,
        /// Number of uniform grid points covering [0, 1]
        #[arg(long = "s-grid")]
        s_grid: Option<usize>,
    },
    /// Minimum gap versus chain length with a power-law fit
    Gapscan {
        #[command(flatten)]
        model: ModelArgs,
        /// Even chain lengths to scan
        #[arg(long = "n-list", value_delimiter = ',', default_values_t = vec![2, 4, 6, 8, 10, 12])]
        n_list: Vec<usize>,
        /// Number of uniform s points per chain length
        #[arg(long = "s-grid", default_value_t = 101)]
        s_grid: usize,
        /// Circuit family generating the scan
        #[arg(long, value_enum, default_value_t)]
        family: FamilyArg,
        /// Seed for the random-rotation family
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Integrate the adiabatic sweep for each total time
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Sweep durations in units of 1/J, ascending
        #[arg(long = "T-list", value_delimiter = ',', default_values_t = vec![10.0, 30.0, 100.0, 300.0, 1000.0])]
        t_list: Vec<f64>,
        /// Sweep profile s(t)
        #[arg(long, value_enum, default_value_t)]
        schedule: ScheduleArg,
        /// Maximum dt·‖H‖ per step
        #[arg(long = "step-budget", default_value_t = 0.1)]
        step_budget: f64,
    },
    /// Emit the spin-model Pauli coupling table
    CompileSpin {
        #[command(flatten)]
        model: ModelArgs,
        /// Interpolation parameter in [0, 1]
        #[arg(long, default_value_t = 0.5)]
        s: f64,
    },
    /// Run every module invariant at small sizes and summarize
    Verify {
        #[command(flatten)]
        model: ModelArgs,
        /// Seed for the gate-independence check
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Command failure, carrying the process exit code.
pub enum CmdError {
    /// Parse / configuration / IO problems: exit 1.
    Usage(String),
    /// A numeric invariant violated its tolerance: exit 2.
    Invariant(String),
    /// Count of failed `verify` groups.
    Failures(usize),
}

impl From<stirap_core::Error> for CmdError {
    fn from(e: stirap_core::Error) -> Self {
        CmdError::Usage(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(()) => 0,
        Err(CmdError::Usage(msg)) => {
            eprintln!("error: {msg}");
            1
        }
        Err(CmdError::Invariant(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CmdError::Failures(n)) => n.min(125) as i32,
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<(), CmdError> {
    match cli.command {
        Command::Darkstate { model, s, zero_tol } => commands::darkstate(&model, s, zero_tol),
        Command::Spectrum { model, s, s_grid } => commands::spectrum(&model, s, s_grid),
        Command::Gapscan {
            model,
            n_list,
            s_grid,
            family,
            seed,
        } => commands::gapscan(&model, &n_list, s_grid, family, seed),
        Command::Evolve {
            model,
            t_list,
            schedule,
            step_budget,
        } => commands::evolve(&model, &t_list, schedule, step_budget),
        Command::CompileSpin { model, s } => commands::compile_spin(&model, s),
        Command::Verify { model, seed } => verify::run(&model, seed),
    }
}
