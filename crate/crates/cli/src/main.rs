use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fractb::Param;
use fractb_cli::{load_scenario, parse_override, run, CliResult, Command};

/// Fractional-order TB model toolkit.
#[derive(Parser)]
#[command(name = "fractb", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct Common {
    /// Scenario file (`key = value` lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fractional order, 0 < alpha <= 1.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Final time in years.
    #[arg(long, global = true)]
    tf: Option<f64>,
    /// Number of time steps.
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Scenario override, repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the model under the constant treatment rate gamma.
    Simulate,
    /// Print and write the endemic equilibrium.
    Equilibrium,
    /// Print the basic reproduction number.
    R0,
    /// Normalized sensitivity indices of R0.
    Sensitivity,
    /// Change one parameter and compare infectious curves from the equilibrium.
    Perturb {
        #[arg(long)]
        param: Param,
        /// Percentage change.
        #[arg(long, default_value_t = 15.0, allow_negative_numbers = true)]
        pct: f64,
    },
    /// Solve the optimal control problem and write the trajectory.
    Optimize,
    /// Solve the optimal control problem and report cost-effectiveness.
    CostEff,
    /// Cost-effectiveness over a grid of weights B and orders alpha.
    SweepB {
        #[arg(long, value_delimiter = ',')]
        b_values: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',')]
        alphas: Option<Vec<f64>>,
    },
}

fn execute(cli: Cli) -> CliResult<String> {
    let Common { config, alpha, tf, steps, out, set } = cli.common;
    let mut overrides = set.iter().map(|s| parse_override(s)).collect::<CliResult<Vec<_>>>()?;
    let flags = [
        ("alpha", alpha.map(|v| v.to_string())),
        ("tf", tf.map(|v| v.to_string())),
        ("steps", steps.map(|v| v.to_string())),
        ("out", out.map(|p| p.display().to_string())),
    ];
    overrides.extend(flags.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_owned(), v))));
    let scenario = load_scenario(config.as_deref(), &overrides)?;

    let command = match cli.command {
        Cmd::Simulate => Command::Simulate,
        Cmd::Equilibrium => Command::Equilibrium,
        Cmd::R0 => Command::R0,
        Cmd::Sensitivity => Command::Sensitivity,
        Cmd::Perturb { param, pct } => Command::Perturb { param, pct },
        Cmd::Optimize => Command::Optimize,
        Cmd::CostEff => Command::CostEff,
        Cmd::SweepB { b_values, alphas } => Command::SweepB { b_values, alphas },
    };
    run(&command, &scenario)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(stdout) => {
            print!("{stdout}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
