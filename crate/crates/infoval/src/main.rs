//! `infoval`: optimal allocation and value of information from the command line.

mod commands;
mod config;
mod error;
mod figures;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "infoval", version, about = "Optimal portfolios and the value of information about the market price of risk")]
pub struct Cli {
    /// Parameter file with flat `key = value` lines (r, sigma, lambda,
    /// sigma_x, x_bar, rho, pi0, r0, T, gamma, w); missing keys take the
    /// Table 1 values with rho = 0.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set gamma=4.03`; repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", allow_hyphen_values = true)]
    pub set: Vec<String>,
    /// Directory for CSV tables and the manifest.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime of the Riccati system: critical correlation, risk aversion and time.
    Classify,
    /// Riccati coefficients, filter variance and Q on the solver grid.
    Solve,
    /// Optimal stock weights and the penalty along [0, T] at a fixed state.
    Strategy(StrategyArgs),
    /// Density and cdf of optimal terminal wealth.
    Density(DensityArgs),
    /// Annualized mean and standard deviation of optimal wealth against gamma.
    Frontier(FrontierArgs),
    /// Value of initial and dynamic information along one parameter axis.
    Voi(VoiArgs),
    /// Monte Carlo estimates next to their closed forms.
    Simulate(SimulateArgs),
    /// Data behind figures 1 to 8 as fig1.csv ... fig8.csv.
    Figures(FiguresArgs),
    /// Run the filter on an observed price path.
    Filter(FilterArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfoArg {
    Full,
    Partial,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Simple,
    Geometric,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    #[value(name = "R0")]
    R0,
    #[value(name = "T")]
    T,
    #[value(name = "rho")]
    Rho,
    #[value(name = "gamma")]
    Gamma,
}

#[derive(Debug, Args)]
pub struct StrategyArgs {
    /// Value of X (full information) and pi (partial information); defaults to pi0.
    #[arg(long, allow_hyphen_values = true)]
    pub state: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args)]
pub struct DensityArgs {
    #[arg(long, value_enum, default_value_t = InfoArg::Both)]
    pub info: InfoArg,
    /// Condition on this X_0 instead of integrating over the prior.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long)]
    pub u_max: Option<f64>,
    #[arg(long, default_value_t = 1 << 14)]
    pub n_u: usize,
    #[arg(long, default_value_t = 2001)]
    pub n_w: usize,
    #[arg(long)]
    pub tail_tol: Option<f64>,
    #[arg(long, requires = "w_max")]
    pub w_min: Option<f64>,
    #[arg(long, requires = "w_min")]
    pub w_max: Option<f64>,
    /// u_max = 1000 and a 1e-3 tail gate, needed for partial information.
    #[arg(long)]
    pub wide: bool,
}

#[derive(Debug, Args)]
pub struct FrontierArgs {
    /// List `a,b,c` or range `start:end:count`.
    #[arg(long, default_value = "1.5:20:38")]
    pub gammas: String,
    #[arg(long, value_enum, default_value_t = InfoArg::Both)]
    pub info: InfoArg,
    #[arg(long, value_enum, default_value_t = ConventionArg::Simple)]
    pub convention: ConventionArg,
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct VoiArgs {
    #[arg(long, value_enum)]
    pub sweep: AxisArg,
    /// Axis values, list or `start:end:count`; a default per axis otherwise.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Correlations to repeat the sweep for; defaults to the configured rho.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 500)]
    pub steps: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub no_antithetic: bool,
    /// Start every path at this X_0 instead of drawing from the prior.
    #[arg(long, allow_hyphen_values = true)]
    pub x0: Option<f64>,
    /// Write the first N paths (at most 100) to paths.csv.
    #[arg(long, default_value_t = 0)]
    pub dump: usize,
}

#[derive(Debug, Args)]
pub struct FiguresArgs {
    /// Correlation used for the density, frontier and cdf figures (3 to 5).
    #[arg(long, default_value_t = -0.9, allow_hyphen_values = true)]
    pub rho_density: f64,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    /// CSV with columns `t,s` on a uniform time grid inside [0, T].
    #[arg(long)]
    pub prices: PathBuf,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(&CliError::Config(e.to_string().trim_end().to_string())),
    };
    match commands::run(&cli, &argv[1..]) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code() as u8)
}
