//! Command-line surface. Every run flag can also be set through an
//! environment variable named `LADDER_<FLAG>` (upper case, `-` → `_`).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{self, ConfigError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "ladder",
    version,
    about = "Hilbert-space reduction for frustrated spin ladders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one reduction trajectory and write its CSV.
    Run(RunArgs),
    /// Run SU(2) and SO(4) side by side and summarise their stability.
    Compare(RunArgs),
    /// Write the full Hamiltonian as `i j value` triplets.
    DumpMatrix(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// Named preset applied before the config file and flags.
    #[arg(long, env = "LADDER_PRESET")]
    pub preset: Option<String>,

    /// Flat `key = value` config file.
    #[arg(long, env = "LADDER_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, env = "LADDER_LENGTH")]
    pub length: Option<String>,
    /// su2 | so4
    #[arg(long, env = "LADDER_REPRESENTATION")]
    pub representation: Option<String>,
    #[arg(long, env = "LADDER_JT", allow_hyphen_values = true)]
    pub jt: Option<String>,
    #[arg(long, env = "LADDER_JL", allow_hyphen_values = true)]
    pub jl: Option<String>,
    #[arg(long, env = "LADDER_JC", allow_hyphen_values = true)]
    pub jc: Option<String>,
    /// diagonal | amplitude
    #[arg(long, env = "LADDER_ORDERING")]
    pub ordering: Option<String>,
    /// once | each-step
    #[arg(long, env = "LADDER_REORDER_POLICY")]
    pub reorder_policy: Option<String>,
    #[arg(long, env = "LADDER_EPSILON", allow_hyphen_values = true)]
    pub epsilon: Option<String>,
    #[arg(long, env = "LADDER_MIN_DIM")]
    pub min_dim: Option<String>,
    /// Percent deviation of p(1) counted as unstable.
    #[arg(long, env = "LADDER_INSTABILITY_THRESHOLD", allow_hyphen_values = true)]
    pub instability_threshold: Option<String>,
    #[arg(long, env = "LADDER_PATIENCE")]
    pub patience: Option<String>,
    #[arg(long, env = "LADDER_TRACK")]
    pub track: Option<String>,
    #[arg(long, env = "LADDER_DENSE_THRESHOLD")]
    pub dense_threshold: Option<String>,
    #[arg(long, env = "LADDER_TOL", allow_hyphen_values = true)]
    pub tol: Option<String>,
    #[arg(long, env = "LADDER_SEED")]
    pub seed: Option<String>,
    /// Stop with exit code 3 when the renormalization equation has no real root.
    #[arg(long, env = "LADDER_STRICT_ROOTS")]
    pub strict_roots: Option<String>,
    /// Output path; stdout when omitted.
    #[arg(long, env = "LADDER_OUT")]
    pub out: Option<String>,
}

impl RunArgs {
    fn overrides(&self) -> Vec<(String, String)> {
        let fields = [
            ("length", &self.length),
            ("representation", &self.representation),
            ("jt", &self.jt),
            ("jl", &self.jl),
            ("jc", &self.jc),
            ("ordering", &self.ordering),
            ("reorder-policy", &self.reorder_policy),
            ("epsilon", &self.epsilon),
            ("min-dim", &self.min_dim),
            ("instability-threshold", &self.instability_threshold),
            ("patience", &self.patience),
            ("track", &self.track),
            ("dense-threshold", &self.dense_threshold),
            ("tol", &self.tol),
            ("seed", &self.seed),
            ("strict-roots", &self.strict_roots),
            ("out", &self.out),
        ];
        fields
            .into_iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect()
    }

    /// Resolves defaults, preset, config file and flags into one config.
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let file = match &self.config {
            Some(path) => config::read_config_file(path)?,
            None => Vec::new(),
        };
        config::resolve(self.preset.as_deref(), &file, &self.overrides())
    }
}
