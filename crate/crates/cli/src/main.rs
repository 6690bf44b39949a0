use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wflo_cli::commands::{self, Common, Failure};

/// Wake-aware wind farm layout optimization.
#[derive(Parser)]
#[command(name = "wflo", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// TOML run configuration; defaults to the case 1 preset.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Chaos seed x0 in (0, 1).
    #[arg(long, value_name = "X0")]
    seed: Option<f64>,
    /// Output directory. Overrides the config and $WFLO_OUT.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl From<CommonArgs> for Common {
    fn from(a: CommonArgs) -> Self {
        Common {
            config: a.config,
            seed: a.seed,
            out: a.out,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the adapted GA and write the best layout, trace and summary.
    Optimize(CommonArgs),
    /// Score a layout file under the configured scenario.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        /// Layout CSV as written by `optimize`.
        #[arg(long, value_name = "PATH")]
        layout: PathBuf,
    },
    /// Optimize at shrinking cell edges and fit the power curve.
    Sweep(CommonArgs),
    /// Uniform layout versus AGA, and AGA versus the ablated GA.
    Compare(CommonArgs),
    /// Check the evaluator and optimizer against the reference oracles.
    Verify(CommonArgs),
    /// Tabulate the aggregate cost curve.
    CostCurve {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest turbine count in the table.
        #[arg(long, default_value_t = 100)]
        max: u32,
    },
}

fn run(cli: Cli) -> Result<String, Failure> {
    match cli.command {
        Command::Optimize(c) => {
            let (config, out) = commands::prepare(&c.into())?;
            commands::optimize(&config, &out)
        }
        Command::Evaluate { common, layout } => {
            let (config, out) = commands::prepare(&common.into())?;
            commands::evaluate(&config, &out, &layout)
        }
        Command::Sweep(c) => {
            let (config, out) = commands::prepare(&c.into())?;
            commands::sweep(&config, &out)
        }
        Command::Compare(c) => {
            let (config, out) = commands::prepare(&c.into())?;
            commands::compare(&config, &out)
        }
        Command::Verify(c) => {
            let (config, out) = commands::prepare(&c.into())?;
            commands::verify(&config, &out)
        }
        Command::CostCurve { common, max } => {
            let (_, out) = commands::prepare(&common.into())?;
            commands::cost_table(max, &out)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(line) => {
            println!("{line}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
