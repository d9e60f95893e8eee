//! Thin command-line frontend over the library commands.

use clap::{Parser, Subcommand, ValueEnum};
use dyrac::statics::CurveKind;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "dyrac",
    about = "Simulation and analysis toolkit for a sliding-pivot variable impedance actuator",
    version
)]
struct Args {
    /// Override the physics integration step (s).
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// Seed hook for randomized test drivers; the commands themselves are
    /// deterministic and ignore it.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CurveKindArg {
    /// Zero-deflection stiffness ratio over radius ratio.
    StiffnessMap,
    /// Output torque over deflection per pivot radius.
    TorqueDeflection,
    /// Secant stiffness over torque per pivot radius.
    StiffnessTorque,
}

impl From<CurveKindArg> for CurveKind {
    fn from(kind: CurveKindArg) -> Self {
        match kind {
            CurveKindArg::StiffnessMap => CurveKind::StiffnessRatioVsRadiusRatio,
            CurveKindArg::TorqueDeflection => CurveKind::TorqueVsDeflection,
            CurveKindArg::StiffnessTorque => CurveKind::StiffnessVsTorque,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a characterization curve as CSV.
    Curves {
        #[arg(long, value_enum)]
        kind: CurveKindArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a scenario file and write the full trace CSV.
    Simulate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Time the pivot-radius step response of a scenario.
    Step {
        #[arg(long)]
        scenario: PathBuf,
        /// Optional r(t) CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the cubic-log stiffness map to a `k_e,r_m` CSV.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Optional fitted-curve CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Grid-search hard-soft stiffness schedules for peak output speed.
    Optimize {
        #[arg(long)]
        scenario: PathBuf,
        /// Axes `t_soft=<a:b:n>,t_stiff=<a:b:n>,r_low_mm=<a:b:n>,r_high_mm=<a:b:n>`.
        #[arg(long)]
        grid: String,
        /// Optional candidate-report CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    // route usage errors to the parse exit code (3); --help and
    // --version still exit 0
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &args.command {
        Command::Curves { kind, out } => dyrac::cli::cmd_curves((*kind).into(), out),
        Command::Simulate { scenario, out } => dyrac::cli::cmd_simulate(scenario, out, args.dt),
        Command::Step { scenario, out } => dyrac::cli::cmd_step(scenario, out.as_deref(), args.dt),
        Command::Fit { data, out } => dyrac::cli::cmd_fit(data, out.as_deref()),
        Command::Optimize {
            scenario,
            grid,
            out,
        } => dyrac::cli::cmd_optimize(scenario, grid, out.as_deref(), args.dt),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
