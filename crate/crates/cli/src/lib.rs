//! Run orchestration for ladder reduction experiments: configuration,
//! execution, and CSV output.

pub mod args;
pub mod config;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use ladder_core::{
    deepest_stable_dim, observe, run_reduction, setup, LadderError, ReductionError,
    ReductionTrajectory, Representation, StepObservables, Termination,
};

pub use config::{ConfigError, RunConfig};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const NO_REAL_ROOT: i32 = 3;
    pub const SOLVER: i32 = 4;
    pub const IO: i32 = 5;
}

/// `p(1)` bound used for the deepest-stable summary, in percent.
pub const STABLE_P1_PERCENT: f64 = 1.0;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error("{0}")]
    Setup(#[from] LadderError),

    #[error("eigensolver failed at dimension {dim}: {message}")]
    Solver {
        dim: usize,
        message: String,
        partial: Option<Box<RunReport>>,
    },

    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error("representations disagree on {0}")]
    Mismatch(&'static str),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Mismatch(_) => exit::USAGE,
            RunError::Setup(_) | RunError::Solver { .. } => exit::SOLVER,
            RunError::Io { .. } => exit::IO,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub trajectory: ReductionTrajectory,
    pub observables: Vec<StepObservables>,
}

impl RunReport {
    fn new(trajectory: ReductionTrajectory, config: &RunConfig) -> Result<Self, RunError> {
        let observables = observe(&trajectory, config.length, config.epsilon)?;
        Ok(RunReport {
            trajectory,
            observables,
        })
    }

    pub fn deepest_stable_dim(&self) -> Option<usize> {
        deepest_stable_dim(&self.observables, STABLE_P1_PERCENT)
    }

    pub fn exit_code(&self) -> i32 {
        match self.trajectory.termination {
            Termination::NoRealRootStop => exit::NO_REAL_ROOT,
            _ => exit::OK,
        }
    }

    pub fn csv(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        output::write_trajectory(&mut buf, &self.trajectory, &self.observables)
            .expect("writing to memory cannot fail");
        buf
    }
}

/// Build, order, reduce and observe for one configuration.
pub fn execute(config: &RunConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let couplings = config.couplings()?;
    let (basis, ham) = setup(config.representation, config.length, &couplings)?;
    match run_reduction(&ham, &basis, couplings.rung(), &config.reduction()) {
        Ok(trajectory) => RunReport::new(trajectory, config),
        Err(ReductionError::Setup(e)) => Err(e.into()),
        Err(ReductionError::Solver {
            dim,
            source,
            trajectory,
        }) => {
            let partial = match trajectory {
                Some(t) => Some(Box::new(RunReport::new(*t, config)?)),
                None => None,
            };
            Err(RunError::Solver {
                dim,
                message: source.to_string(),
                partial,
            })
        }
    }
}

fn write_to(path: Option<&Path>, bytes: &[u8]) -> Result<(), RunError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| RunError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| RunError::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    }
}

/// Executes `config` and writes its CSV to `config.out` (stdout if unset).
/// On solver failure the completed steps are still written.
pub fn run(config: &RunConfig) -> Result<RunReport, RunError> {
    match execute(config) {
        Ok(report) => {
            write_to(config.out.as_deref(), &report.csv())?;
            Ok(report)
        }
        Err(RunError::Solver {
            dim,
            message,
            partial,
        }) => {
            if let Some(p) = &partial {
                write_to(config.out.as_deref(), &p.csv())?;
            }
            Err(RunError::Solver {
                dim,
                message,
                partial,
            })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct Comparison {
    pub su2: RunReport,
    pub so4: RunReport,
}

impl Comparison {
    pub fn csv(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        output::write_comparison(&mut buf, &self.su2.observables, &self.so4.observables)
            .expect("writing to memory cannot fail");
        buf
    }

    pub fn summary(&self) -> String {
        let fmt = |d: Option<usize>| d.map_or_else(|| "none".to_string(), |n| n.to_string());
        format!(
            "deepest n with p1 < {STABLE_P1_PERCENT}%: su2 {} so4 {}\n",
            fmt(self.su2.deepest_stable_dim()),
            fmt(self.so4.deepest_stable_dim())
        )
    }
}

/// Runs the SU(2) and SO(4) trajectories concurrently.
pub fn compare_representations(su2: &RunConfig, so4: &RunConfig) -> Result<Comparison, RunError> {
    if su2.length != so4.length {
        return Err(RunError::Mismatch("length"));
    }
    if (su2.jt, su2.jl, su2.jc) != (so4.jt, so4.jl, so4.jc) {
        return Err(RunError::Mismatch("couplings"));
    }
    if su2.representation != Representation::Su2 || so4.representation != Representation::So4 {
        return Err(RunError::Mismatch("representation"));
    }
    let (a, b) = std::thread::scope(|s| {
        let a = s.spawn(|| execute(su2));
        let b = s.spawn(|| execute(so4));
        (
            a.join().expect("su2 run panicked"),
            b.join().expect("so4 run panicked"),
        )
    });
    Ok(Comparison { su2: a?, so4: b? })
}

/// Writes the comparison CSV to `out` (stdout if `None`).
pub fn write_comparison(comparison: &Comparison, out: Option<&Path>) -> Result<(), RunError> {
    write_to(out, &comparison.csv())
}

/// Writes the `(i, j, value)` triplets of `H(g)` at `g = J_t`.
pub fn dump_matrix(config: &RunConfig) -> Result<(), RunError> {
    config.validate()?;
    let couplings = config.couplings()?;
    let (_, ham) = setup(config.representation, config.length, &couplings)?;
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| RunError::Io { path, source }
    };
    match config.out.as_deref() {
        Some(p) => {
            let file = File::create(p).map_err(io_err(p))?;
            ham.write_dump(couplings.rung(), BufWriter::new(file))
                .map_err(io_err(p))
        }
        None => ham
            .write_dump(couplings.rung(), io::stdout().lock())
            .map_err(io_err(Path::new("<stdout>"))),
    }
}
