use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use frontrun_core::{Error, ModelParams, SignalStructure, ThetaPair};

#[derive(Parser, Debug)]
#[command(name = "frontrun", version, about = "Two-period Kyle market with a front-running HFT")]
pub struct Cli {
    /// Write output to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one equilibrium from the closed forms.
    Solve(SolveArgs),
    /// Comparative statics along one theta, as CSV.
    Sweep(SweepArgs),
    /// Welfare region over a theta1 x thetaz grid, as CSV.
    Classify(ClassifyArgs),
    /// Monte Carlo play of the game against the analytic values.
    Simulate(SimulateArgs),
    /// Equilibrium by damped best-response iteration.
    FixedPoint(FixedPointArgs),
    /// IT intensity without fast noise, for an exogenous HFT intensity.
    PartialEquilibrium(PartialArgs),
    /// Limiting values for large or small theta1 and large thetaz.
    Limits(LimitsArgs),
}

/// Market parameters: either `--theta1/--thetaz` (with scales `--sigma-v`,
/// `--sigma-2`), or all raw `--sigma-*` values.
#[derive(Args, Debug, Clone, Default)]
pub struct ParamArgs {
    #[arg(long)]
    pub theta1: Option<f64>,
    #[arg(long)]
    pub thetaz: Option<f64>,
    #[arg(long)]
    pub sigma_v: Option<f64>,
    #[arg(long)]
    pub sigma_1: Option<f64>,
    #[arg(long)]
    pub sigma_2: Option<f64>,
    #[arg(long)]
    pub sigma_z: Option<f64>,
}

impl ParamArgs {
    /// Thetas as typed, falling back to those implied by `params`.
    pub fn thetas(&self, params: &ModelParams) -> ThetaPair {
        match (self.theta1, self.thetaz) {
            (Some(t1), Some(tz)) => ThetaPair::new(t1, tz),
            _ => params.thetas(),
        }
    }

    /// Builds the model; `fallback` thetas apply when no parameters are given at all.
    pub fn resolve(&self, fallback: Option<ThetaPair>) -> Result<ModelParams, Error> {
        let sigma_v = self.sigma_v.unwrap_or(1.0);
        let sigma_2 = self.sigma_2.unwrap_or(1.0);
        let has_theta = self.theta1.is_some() || self.thetaz.is_some();
        let has_raw = self.sigma_1.is_some() || self.sigma_z.is_some();
        match (has_theta, has_raw) {
            (true, true) => Err(Error::InvalidConfig(
                "give either --theta1/--thetaz or raw --sigma-1/--sigma-z, not both".into(),
            )),
            (true, false) => match (self.theta1, self.thetaz) {
                (Some(t1), Some(tz)) => ModelParams::from_thetas(ThetaPair::new(t1, tz), sigma_v, sigma_2),
                _ => Err(Error::InvalidConfig("--theta1 and --thetaz must be given together".into())),
            },
            (false, true) => match (self.sigma_1, self.sigma_z) {
                (Some(s1), Some(sz)) => ModelParams::new(sigma_v, s1, sigma_2, sz),
                _ => Err(Error::InvalidConfig("--sigma-1 and --sigma-z must be given together".into())),
            },
            (false, false) => match fallback {
                Some(thetas) => ModelParams::from_thetas(thetas, sigma_v, sigma_2),
                None => Err(Error::InvalidConfig(
                    "missing parameters: give --theta1 and --thetaz, or --sigma-1 and --sigma-z".into(),
                )),
            },
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Signal {
    Own,
    Aggregate,
}

impl From<Signal> for SignalStructure {
    fn from(s: Signal) -> Self {
        match s {
            Signal::Own => SignalStructure::OwnOrder,
            Signal::Aggregate => SignalStructure::AggregateOrder,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisArg {
    Theta1,
    Thetaz,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleArg {
    Linear,
    Log,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub axis: AxisArg,
    #[arg(long)]
    pub from: f64,
    #[arg(long)]
    pub to: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    pub scale: ScaleArg,
    /// Value of the theta that is not swept.
    #[arg(long)]
    pub held: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_2: f64,
    /// Append the no-HFT reference columns.
    #[arg(long)]
    pub baseline: bool,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub theta1_from: f64,
    #[arg(long)]
    pub theta1_to: f64,
    #[arg(long, default_value_t = 50)]
    pub theta1_points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    pub theta1_scale: ScaleArg,
    #[arg(long)]
    pub thetaz_from: f64,
    #[arg(long)]
    pub thetaz_to: f64,
    #[arg(long, default_value_t = 50)]
    pub thetaz_points: usize,
    #[arg(long, value_enum, default_value_t = ScaleArg::Linear)]
    pub thetaz_scale: ScaleArg,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Pair every draw with its negation.
    #[arg(long)]
    pub antithetic: bool,
    /// Classic market without an HFT (beta = 0); thetas default to (1, 0).
    #[arg(long, conflicts_with = "partial_beta")]
    pub no_hft: bool,
    /// Exogenous HFT intensity for a market without fast noise.
    #[arg(long)]
    pub partial_beta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Signal::Own)]
    pub signal: Signal,
}

#[derive(Args, Debug)]
pub struct FixedPointArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, value_enum, default_value_t = Signal::Own)]
    pub signal: Signal,
    #[arg(long, default_value_t = 0.5)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iter: usize,
    #[arg(long, requires = "init_beta")]
    pub init_alpha: Option<f64>,
    #[arg(long, requires = "init_alpha")]
    pub init_beta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct PartialArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub thetaz: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_2: f64,
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long)]
    pub thetaz: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_v: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_2: f64,
}
