//! Flags and the TOML config file. Every option is optional on both sides;
//! flags win over file values, which win over built-in defaults.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use trunclap::profiles::{ProfileFlags, ProfileSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "trunclap",
    version,
    about = "Fractional truncated Laplacians: evaluation, exponents, verification"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Global {
    /// Output format [default: table].
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write results here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for the frame optimizer's multistarts.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// TOML config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Absolute quadrature tolerance.
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    /// Panel budget per integral.
    #[arg(long, global = true)]
    pub max_subdivisions: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate an operator on a radial profile.
    Eval(EvalArgs),
    /// Evaluate a one-dimensional constant.
    Constants(ConstantsArgs),
    /// Solve for a critical exponent.
    Solve(SolveArgs),
    /// Run a scenario suite.
    Verify(VerifyArgs),
    /// Sweep s toward 1 and export rows.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalArgs {
    /// I+, I-, J+, J-, P+, P- or dir (directional, needs --theta).
    #[arg(long)]
    pub op: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Profile as name:p1,p2 (power:0.4, gaussian:1, shifted_power:1,0.75, ...).
    #[arg(long)]
    pub profile: Option<String>,
    /// Comma-separated radii.
    #[arg(long, value_delimiter = ',')]
    pub r: Option<Vec<f64>>,
    /// Angle between ξ and x for `dir`.
    #[arg(long)]
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsArgs {
    /// c_hat, c_perp, c_k, c_k_prime, c_k_second, c_power, c_tilde, f_s, f_beta,
    /// c2_prime_zero, c_k_critical or normalization.
    #[arg(long)]
    pub name: Option<String>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Comma-separated γ values.
    #[arg(long, value_delimiter = ',')]
    pub gamma: Option<Vec<f64>>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    /// Comma-separated β values.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveArgs {
    /// gamma_bar, gamma_tilde or beta_bar.
    #[arg(long)]
    pub exponent: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Bracket cap for gamma_tilde, as a multiple of N.
    #[arg(long)]
    pub cap_factor: Option<f64>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyArgs {
    /// paper-core, fundamental, liouville, frames, smp, asymptotics, or
    /// `config` for the [[scenario]] list of the config file.
    #[arg(long)]
    pub suite: Option<String>,
    /// Comma-separated tightening factors for the robustness gate.
    #[arg(long, value_delimiter = ',')]
    pub tighten: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepArgs {
    /// operator_convergence, gamma_bar_trend, gamma_tilde_trend or constant_trends.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "N")]
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated ascending s values in (1/2, 1).
    #[arg(long, value_delimiter = ',')]
    pub s_grid: Option<Vec<f64>>,
}

/// One `[[scenario]]` entry.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEntry {
    pub name: String,
    pub op: String,
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub s: f64,
    pub profile: String,
    /// supersolution, subsolution, solution, nonpositive, nonnegative or frame_prediction.
    pub claim: String,
    pub p: Option<f64>,
    pub radii: Option<Vec<f64>>,
    pub tolerance: Option<f64>,
    pub theta: Option<f64>,
    #[serde(default)]
    pub expect_failure: bool,
}

/// One `[[profile]]` entry; `id` can stand in for a profile string anywhere.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedProfile {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub params: Vec<f64>,
    pub scale: Option<f64>,
    pub flags: Option<ProfileFlags>,
}

impl NamedProfile {
    pub fn spec(&self) -> ProfileSpec {
        ProfileSpec {
            name: self.name.clone(),
            params: self.params.clone(),
            scale: self.scale,
            flags: self.flags,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub abs_tol: Option<f64>,
    pub rel_tol: Option<f64>,
    pub max_subdivisions: Option<usize>,
    pub eval: EvalArgs,
    pub constants: ConstantsArgs,
    pub solve: SolveArgs,
    pub verify: VerifyArgs,
    pub sweep: SweepArgs,
    pub scenario: Vec<ScenarioEntry>,
    pub profile: Vec<NamedProfile>,
}

macro_rules! merge {
    ($flag:expr, $file:expr; $($f:ident),*) => {
        $( if $flag.$f.is_none() { $flag.$f = $file.$f.clone(); } )*
    };
}

impl Global {
    pub fn merge(&mut self, file: &ConfigFile) {
        merge!(self, file; format, output, seed, abs_tol, rel_tol, max_subdivisions);
    }
}

impl EvalArgs {
    pub fn merge(&mut self, file: &EvalArgs) {
        merge!(self, file; op, k, n, s, profile, r, theta);
    }
}

impl ConstantsArgs {
    pub fn merge(&mut self, file: &ConstantsArgs) {
        merge!(self, file; name, s, gamma, k, n, beta);
    }
}

impl SolveArgs {
    pub fn merge(&mut self, file: &SolveArgs) {
        merge!(self, file; exponent, k, n, s, cap_factor);
    }
}

impl VerifyArgs {
    pub fn merge(&mut self, file: &VerifyArgs) {
        merge!(self, file; suite, tighten);
    }
}

impl SweepArgs {
    pub fn merge(&mut self, file: &SweepArgs) {
        merge!(self, file; target, k, n, r, beta, s_grid);
    }
}
