//! Run configuration: defaults, named presets, flat `key = value` files and
//! command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ladder_core::eigensolver::{DEFAULT_DENSE_THRESHOLD, DEFAULT_SEED, DEFAULT_TOLERANCE};
use ladder_core::observables::DEFAULT_EPSILON;
use ladder_core::{
    CouplingSet, OrderingStrategy, ReductionConfig, ReorderPolicy, Representation, SolverConfig,
};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ConfigError {
    #[error("invalid value for `{field}`: {message}")]
    InvalidField { field: String, message: String },

    #[error("unknown config key `{0}`")]
    UnknownKey(String),

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },

    #[error("cannot read config file {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl ConfigError {
    fn field(field: &str, message: impl Into<String>) -> Self {
        ConfigError::InvalidField {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub length: usize,
    pub representation: Representation,
    pub jt: f64,
    pub jl: f64,
    pub jc: f64,
    pub ordering: OrderingStrategy,
    pub reorder_policy: ReorderPolicy,
    pub epsilon: f64,
    pub min_dim: usize,
    pub instability_threshold: f64,
    pub patience: usize,
    pub track: usize,
    pub dense_threshold: usize,
    pub tol: f64,
    pub seed: u64,
    pub strict_roots: bool,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            length: 6,
            representation: Representation::Su2,
            jt: 15.0,
            jl: 5.0,
            jc: 3.0,
            ordering: OrderingStrategy::DiagonalAscending,
            reorder_policy: ReorderPolicy::OrderOnce,
            epsilon: DEFAULT_EPSILON,
            min_dim: 8,
            instability_threshold: 10.0,
            patience: 5,
            track: 4,
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            tol: DEFAULT_TOLERANCE,
            seed: DEFAULT_SEED,
            strict_roots: false,
            out: None,
        }
    }
}

/// Names accepted by `--preset`.
pub const PRESETS: [&str; 4] = [
    "paper-su2-strong",
    "paper-su2-weak",
    "paper-so4-strong",
    "paper-so4-weak",
];

impl RunConfig {
    /// The four `L = 6` experiments: SU(2)/SO(4) at `J_t = 15` and `J_t = 5.5`.
    pub fn preset(name: &str) -> Result<Self, ConfigError> {
        let (representation, jt) = match name {
            "paper-su2-strong" => (Representation::Su2, 15.0),
            "paper-su2-weak" => (Representation::Su2, 5.5),
            "paper-so4-strong" => (Representation::So4, 15.0),
            "paper-so4-weak" => (Representation::So4, 5.5),
            _ => return Err(ConfigError::UnknownPreset(name.to_string())),
        };
        Ok(RunConfig {
            representation,
            jt,
            ..RunConfig::default()
        })
    }

    /// Applies one `key = value` setting. Keys match the long flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let value = value.trim();
        match key.trim() {
            "length" => self.length = parse(key, value)?,
            "representation" => self.representation = parse_representation(value)?,
            "jt" => self.jt = parse(key, value)?,
            "jl" => self.jl = parse(key, value)?,
            "jc" => self.jc = parse(key, value)?,
            "ordering" => self.ordering = parse_ordering(value)?,
            "reorder-policy" => self.reorder_policy = parse_reorder(value)?,
            "epsilon" => self.epsilon = parse(key, value)?,
            "min-dim" => self.min_dim = parse(key, value)?,
            "instability-threshold" => self.instability_threshold = parse(key, value)?,
            "patience" => self.patience = parse(key, value)?,
            "track" => self.track = parse(key, value)?,
            "dense-threshold" => self.dense_threshold = parse(key, value)?,
            "tol" => self.tol = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "strict-roots" => self.strict_roots = parse(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.length == 0 || self.length > ladder_core::basis::MAX_LENGTH {
            return Err(ConfigError::field(
                "length",
                format!("must be in 1..={}", ladder_core::basis::MAX_LENGTH),
            ));
        }
        for (name, v) in [("jt", self.jt), ("jl", self.jl), ("jc", self.jc)] {
            if !v.is_finite() {
                return Err(ConfigError::field(name, "must be finite"));
            }
        }
        if self.jt == 0.0 {
            return Err(ConfigError::field("jt", "must be nonzero"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(ConfigError::field("epsilon", "must be positive"));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(ConfigError::field("tol", "must be positive"));
        }
        if self.instability_threshold.is_nan() || self.instability_threshold < 0.0 {
            return Err(ConfigError::field(
                "instability-threshold",
                "must be a non-negative percentage",
            ));
        }
        if self.track == 0 {
            return Err(ConfigError::field("track", "must be at least 1"));
        }
        if self.patience == 0 {
            return Err(ConfigError::field("patience", "must be at least 1"));
        }
        Ok(())
    }

    pub fn couplings(&self) -> Result<CouplingSet, ConfigError> {
        CouplingSet::new(self.jt, self.jl, self.jc)
            .map_err(|e| ConfigError::field("jt", e.to_string()))
    }

    pub fn reduction(&self) -> ReductionConfig {
        ReductionConfig {
            ordering: self.ordering,
            reorder: self.reorder_policy,
            min_dim: self.min_dim,
            track: self.track,
            instability_threshold_percent: self.instability_threshold,
            patience: self.patience,
            strict_roots: self.strict_roots,
            solver: SolverConfig {
                dense_threshold: self.dense_threshold,
                tol: self.tol,
                seed: self.seed,
                ..SolverConfig::default()
            },
        }
    }
}

fn parse<T: FromStr>(field: &str, value: &str) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e: T::Err| ConfigError::field(field, format!("`{value}`: {e}")))
}

pub fn parse_representation(value: &str) -> Result<Representation, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "su2" => Ok(Representation::Su2),
        "so4" => Ok(Representation::So4),
        _ => Err(ConfigError::field(
            "representation",
            format!("`{value}` (su2|so4)"),
        )),
    }
}

pub fn parse_ordering(value: &str) -> Result<OrderingStrategy, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "diagonal" | "diagonal-ascending" => Ok(OrderingStrategy::DiagonalAscending),
        "amplitude" | "amplitude-descending" => Ok(OrderingStrategy::AmplitudeDescending),
        _ => Err(ConfigError::field(
            "ordering",
            format!("`{value}` (diagonal|amplitude)"),
        )),
    }
}

pub fn parse_reorder(value: &str) -> Result<ReorderPolicy, ConfigError> {
    match value.to_ascii_lowercase().as_str() {
        "once" | "order-once" => Ok(ReorderPolicy::OrderOnce),
        "each-step" | "reorder-each-step" => Ok(ReorderPolicy::ReorderEachStep),
        _ => Err(ConfigError::field(
            "reorder-policy",
            format!("`{value}` (once|each-step)"),
        )),
    }
}

/// Parsed flat config document: `(key, value)` pairs in file order.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, ConfigError> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(ConfigError::Syntax { line: i + 1 })?;
        entries.push((key.trim().to_string(), value.trim().to_string()));
    }
    Ok(entries)
}

pub fn read_config_file(path: &Path) -> Result<Vec<(String, String)>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    parse_config_text(&text)
}

/// Builds a config from an optional preset, file entries, and flag overrides,
/// applied in that order.
pub fn resolve(
    preset: Option<&str>,
    file_entries: &[(String, String)],
    overrides: &[(String, String)],
) -> Result<RunConfig, ConfigError> {
    let file_preset = file_entries
        .iter()
        .find(|(k, _)| k == "preset")
        .map(|(_, v)| v.as_str());
    let mut config = match preset.or(file_preset) {
        Some(name) => RunConfig::preset(name)?,
        None => RunConfig::default(),
    };
    for (key, value) in file_entries.iter().filter(|(k, _)| k != "preset") {
        config.set(key, value)?;
    }
    for (key, value) in overrides {
        config.set(key, value)?;
    }
    config.validate()?;
    Ok(config)
}
