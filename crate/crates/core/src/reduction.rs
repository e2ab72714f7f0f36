//! Step-by-step elimination of basis states with renormalization of `g`.
//!
//! Removing the last state `Φ_n` of the ordered basis and asking that the
//! fixed ground energy `λ₁` stay an eigenvalue of the projected problem
//! gives a quadratic `a g² + b g + c = 0` for the new coupling:
//!
//! ```text
//! F   = Σ_{i<n} a_1i ⟨Φ_1|H₁|Φ_i⟩
//! G   = H_1n Σ_{i<n} a_1i ⟨Φ_n|H₁|Φ_i⟩
//! a   = G − H_nn F
//! b   = a_11 H_nn (λ₁ − α_1) + F (λ₁ − α_n)
//! c   = −a_11 (λ₁ − α_1)(λ₁ − α_n)
//! ```
//!
//! with `H_ij = ⟨Φ_i|H₁|Φ_j⟩` and `α_i = ⟨Φ_i|H₀|Φ_i⟩`. The root closest to
//! the current `g` is taken.

use crate::basis::{ordering_permutation, Basis, OrderingStrategy};
use crate::eigensolver::{lowest_eigenpairs, normalized_amplitudes, SolverConfig};
use crate::error::{EigenError, LadderError};
use crate::hamiltonian::HamiltonianPair;
use crate::observables::deviation_p;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub f_1n: f64,
    pub g_1n: f64,
    pub h_nn: f64,
    pub h_1n: f64,
    pub alpha_1: f64,
    pub alpha_n: f64,
    pub a_11: f64,
}

impl QuadraticCoefficients {
    pub fn eval(&self, g: f64) -> f64 {
        (self.a * g + self.b) * g + self.c
    }

    pub fn is_finite(&self) -> bool {
        [self.a, self.b, self.c].iter().all(|v| v.is_finite())
    }
}

/// Coefficients for eliminating position `last` against reference position
/// `first`, given the current normalized ground amplitudes.
pub fn quadratic_coefficients(
    ham: &HamiltonianPair,
    amplitudes: &[f64],
    lambda1: f64,
    first: usize,
    last: usize,
) -> Result<QuadraticCoefficients, LadderError> {
    let dim = ham.dim();
    if amplitudes.len() != dim {
        return Err(LadderError::DimensionMismatch {
            expected: dim,
            found: amplitudes.len(),
        });
    }
    for index in [first, last] {
        if index >= dim {
            return Err(LadderError::IndexOutOfRange { index, dim });
        }
    }
    if first == last {
        return Err(LadderError::InvalidArgument(
            "reference and eliminated state coincide".into(),
        ));
    }
    let h1 = ham.h1();
    // sums run over every state but the eliminated one
    let f_1n: f64 = h1
        .row(first)
        .filter(|&(i, _)| i != last)
        .map(|(i, h)| amplitudes[i] * h)
        .sum();
    let coupling_n: f64 = h1
        .row(last)
        .filter(|&(i, _)| i != last)
        .map(|(i, h)| amplitudes[i] * h)
        .sum();
    let h_1n = h1.get(first, last);
    let h_nn = h1.get(last, last);
    let g_1n = h_1n * coupling_n;
    let alpha_1 = ham.h0().get(first, first);
    let alpha_n = ham.h0().get(last, last);
    let a_11 = amplitudes[first];

    let a = g_1n - h_nn * f_1n;
    let b = a_11 * h_nn * (lambda1 - alpha_1) + f_1n * (lambda1 - alpha_n);
    let c = -a_11 * (lambda1 - alpha_1) * (lambda1 - alpha_n);
    Ok(QuadraticCoefficients {
        a,
        b,
        c,
        f_1n,
        g_1n,
        h_nn,
        h_1n,
        alpha_1,
        alpha_n,
        a_11,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RootStatus {
    TwoReal,
    OneReal,
    NoRealRoot,
    ZeroLeadingCoeff,
    /// All three coefficients vanish; any `g` solves it and `g` is kept.
    Indeterminate,
}

impl RootStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootStatus::TwoReal => "two_real",
            RootStatus::OneReal => "one_real",
            RootStatus::NoRealRoot => "no_real_root",
            RootStatus::ZeroLeadingCoeff => "zero_leading_coeff",
            RootStatus::Indeterminate => "indeterminate",
        }
    }
}

const LEADING_EPS: f64 = 1e-14;

/// Solves the quadratic and picks the root closest to `g_current`.
pub fn renormalize_g(
    coeffs: &QuadraticCoefficients,
    g_current: f64,
) -> Result<(f64, RootStatus), LadderError> {
    let QuadraticCoefficients { a, b, c, .. } = *coeffs;
    if !coeffs.is_finite() {
        return Err(LadderError::InvalidArgument(
            "non-finite quadratic coefficients".into(),
        ));
    }
    let scale = b.abs().max(c.abs()).max(1.0);
    if a.abs() < LEADING_EPS * scale {
        if b.abs() < LEADING_EPS * c.abs().max(1.0) {
            if c.abs() < LEADING_EPS {
                return Err(LadderError::DegenerateEquation);
            }
            log::debug!("linear equation without solution, keeping g = {g_current}");
            return Ok((g_current, RootStatus::NoRealRoot));
        }
        return Ok((-c / b, RootStatus::ZeroLeadingCoeff));
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        log::debug!("complex roots (disc = {disc:e}), keeping g = {g_current}");
        return Ok((g_current, RootStatus::NoRealRoot));
    }
    if disc == 0.0 {
        return Ok((-b / (2.0 * a), RootStatus::OneReal));
    }
    // cancellation-free pair of roots
    let q = -0.5 * (b + b.signum_or_one() * disc.sqrt());
    let r1 = q / a;
    let r2 = c / q;
    let (d1, d2) = ((r1 - g_current).abs(), (r2 - g_current).abs());
    let root = if d1 < d2 {
        r1
    } else if d2 < d1 {
        r2
    } else {
        log::debug!("equidistant roots {r1} and {r2}, taking the larger");
        r1.max(r2)
    };
    Ok((root, RootStatus::TwoReal))
}

trait SignumOrOne {
    fn signum_or_one(self) -> f64;
}

impl SignumOrOne for f64 {
    fn signum_or_one(self) -> f64 {
        if self < 0.0 {
            -1.0
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReorderPolicy {
    #[default]
    OrderOnce,
    ReorderEachStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionConfig {
    pub ordering: OrderingStrategy,
    pub reorder: ReorderPolicy,
    /// Iteration stops once the dimension reaches this floor.
    pub min_dim: usize,
    /// Number of lowest levels tracked per step.
    pub track: usize,
    /// `p(1)` in percent above which a step counts as unstable.
    pub instability_threshold_percent: f64,
    /// Consecutive unstable steps that end the run.
    pub patience: usize,
    /// Stop instead of keeping `g` when the quadratic has no real root.
    pub strict_roots: bool,
    pub solver: SolverConfig,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig {
            ordering: OrderingStrategy::DiagonalAscending,
            reorder: ReorderPolicy::OrderOnce,
            min_dim: 8,
            track: 4,
            instability_threshold_percent: 10.0,
            patience: 5,
            strict_roots: false,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    ReachedMinDim,
    InstabilityStop,
    NoRealRootStop,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::ReachedMinDim => "reached_min_dim",
            Termination::InstabilityStop => "instability_stop",
            Termination::NoRealRootStop => "no_real_root_stop",
        }
    }
}

/// Record of one iteration. Step 0 is the full-space solve and carries no
/// elimination data.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionStep {
    pub step: usize,
    /// Dimension after this step's elimination.
    pub dim: usize,
    pub g_before: f64,
    pub g_after: f64,
    pub root_status: Option<RootStatus>,
    pub coefficients: Option<QuadraticCoefficients>,
    /// Reference-enumeration index of the eliminated state.
    pub eliminated_state: Option<usize>,
    /// `|a_1n|` of the eliminated state just before elimination.
    pub dropped_amplitude: Option<f64>,
    /// Lowest eigenvalues of the reduced problem at `g_after`, ascending.
    pub eigenvalues: Vec<f64>,
    /// Ground-state amplitudes in the current ordered basis.
    pub amplitudes: Vec<f64>,
    /// Reference-enumeration indices of the states still in the basis.
    pub labels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReductionTrajectory {
    pub initial_dim: usize,
    /// Full-space ground energy, held fixed for the whole run.
    pub lambda1: f64,
    pub steps: Vec<ReductionStep>,
    pub termination: Termination,
}

impl ReductionTrajectory {
    pub fn couplings(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.g_after).collect()
    }

    pub fn full_eigenvalues(&self) -> &[f64] {
        &self.steps[0].eigenvalues
    }

    pub fn final_dim(&self) -> usize {
        self.steps.last().map_or(self.initial_dim, |s| s.dim)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ReductionError {
    #[error(transparent)]
    Setup(#[from] LadderError),

    #[error("eigensolver failed at dimension {dim}: {source}")]
    Solver {
        dim: usize,
        source: EigenError,
        /// Steps completed before the failure, if any.
        trajectory: Option<Box<ReductionTrajectory>>,
    },
}

struct Current {
    ham: HamiltonianPair,
    labels: Vec<usize>,
    amplitudes: Vec<f64>,
}

impl Current {
    fn reorder(&mut self, perm: &[usize]) -> Result<(), LadderError> {
        self.ham = self.ham.permute(perm)?;
        self.labels = perm.iter().map(|&p| self.labels[p]).collect();
        self.amplitudes = perm.iter().map(|&p| self.amplitudes[p]).collect();
        Ok(())
    }
}

fn order(current: &mut Current, g: f64, strategy: OrderingStrategy) -> Result<(), LadderError> {
    let perm = ordering_permutation(&current.ham, g, strategy, Some(&current.amplitudes))?;
    current.reorder(&perm)
}

/// Runs the elimination loop from the full basis down to `config.min_dim`
/// or until the spectrum is declared unstable.
pub fn run_reduction(
    ham: &HamiltonianPair,
    basis: &Basis,
    g0: f64,
    config: &ReductionConfig,
) -> Result<ReductionTrajectory, ReductionError> {
    let dim = ham.dim();
    if basis.dim() != dim {
        return Err(LadderError::DimensionMismatch {
            expected: basis.dim(),
            found: dim,
        }
        .into());
    }
    if config.track == 0 {
        return Err(LadderError::InvalidArgument("track at least one level".into()).into());
    }
    let solve = |h: &HamiltonianPair, g: f64| {
        let k = config.track.min(h.dim());
        lowest_eigenpairs(h, g, k, &config.solver)
    };

    let full = solve(ham, g0).map_err(|source| ReductionError::Solver {
        dim,
        source,
        trajectory: None,
    })?;
    let lambda1 = full.eigenvalues[0];
    let full_energies = full.eigenvalues.clone();
    let mut current = Current {
        ham: ham.clone(),
        labels: basis.labels().to_vec(),
        amplitudes: normalized_amplitudes(&full.eigenvectors[0]),
    };
    order(&mut current, g0, config.ordering)?;

    let mut trajectory = ReductionTrajectory {
        initial_dim: dim,
        lambda1,
        steps: vec![ReductionStep {
            step: 0,
            dim,
            g_before: g0,
            g_after: g0,
            root_status: None,
            coefficients: None,
            eliminated_state: None,
            dropped_amplitude: None,
            eigenvalues: full.eigenvalues,
            amplitudes: current.amplitudes.clone(),
            labels: current.labels.clone(),
        }],
        termination: Termination::ReachedMinDim,
    };

    let mut g = g0;
    let mut unstable_run = 0usize;
    let floor = config.min_dim.max(1);
    let mut n = dim;
    while n > floor {
        let last = n - 1;
        let coeffs = quadratic_coefficients(&current.ham, &current.amplitudes, lambda1, 0, last)?;
        let (g_new, status) = match renormalize_g(&coeffs, g) {
            Ok(r) => r,
            Err(LadderError::DegenerateEquation) => {
                log::debug!("indeterminate renormalization at n = {n}, keeping g");
                (g, RootStatus::Indeterminate)
            }
            Err(e) => return Err(e.into()),
        };
        if status == RootStatus::NoRealRoot && config.strict_roots {
            trajectory.termination = Termination::NoRealRootStop;
            return Ok(trajectory);
        }

        let dropped = current.amplitudes[last].abs();
        let eliminated = current.labels[last];
        current.ham = current.ham.truncate(last)?;
        current.labels.truncate(last);
        n = last;

        let result = match solve(&current.ham, g_new) {
            Ok(r) => r,
            Err(source) => {
                return Err(ReductionError::Solver {
                    dim: n,
                    source,
                    trajectory: Some(Box::new(trajectory)),
                })
            }
        };
        current.amplitudes = normalized_amplitudes(&result.eigenvectors[0]);
        if config.reorder == ReorderPolicy::ReorderEachStep {
            order(&mut current, g_new, config.ordering)?;
        }

        let p1 = deviation_p(full_energies[0], result.eigenvalues[0])?;
        trajectory.steps.push(ReductionStep {
            step: dim - n,
            dim: n,
            g_before: g,
            g_after: g_new,
            root_status: Some(status),
            coefficients: Some(coeffs),
            eliminated_state: Some(eliminated),
            dropped_amplitude: Some(dropped),
            eigenvalues: result.eigenvalues,
            amplitudes: current.amplitudes.clone(),
            labels: current.labels.clone(),
        });
        g = g_new;

        if p1 > config.instability_threshold_percent {
            unstable_run += 1;
            if unstable_run >= config.patience.max(1) {
                trajectory.termination = Termination::InstabilityStop;
                return Ok(trajectory);
            }
        } else {
            unstable_run = 0;
        }
    }
    Ok(trajectory)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Representation;
    use nalgebra::DMatrix;

    fn coeffs(a: f64, b: f64, c: f64) -> QuadraticCoefficients {
        QuadraticCoefficients {
            a,
            b,
            c,
            f_1n: 0.0,
            g_1n: 0.0,
            h_nn: 0.0,
            h_1n: 0.0,
            alpha_1: 0.0,
            alpha_n: 0.0,
            a_11: 0.0,
        }
    }

    #[test]
    fn closest_root() {
        assert_eq!(
            renormalize_g(&coeffs(1.0, 0.0, -4.0), 1.5).unwrap(),
            (2.0, RootStatus::TwoReal)
        );
        assert_eq!(
            renormalize_g(&coeffs(1.0, 0.0, -4.0), -0.1).unwrap(),
            (-2.0, RootStatus::TwoReal)
        );
    }

    #[test]
    fn linear_and_complex_cases() {
        assert_eq!(
            renormalize_g(&coeffs(0.0, 2.0, -3.0), 7.0).unwrap(),
            (1.5, RootStatus::ZeroLeadingCoeff)
        );
        assert_eq!(
            renormalize_g(&coeffs(1.0, 0.0, 1.0), 0.3).unwrap(),
            (0.3, RootStatus::NoRealRoot)
        );
        assert_eq!(
            renormalize_g(&coeffs(1.0, -4.0, 4.0), 0.0).unwrap(),
            (2.0, RootStatus::OneReal)
        );
        assert_eq!(
            renormalize_g(&coeffs(0.0, 0.0, 0.0), 1.0),
            Err(LadderError::DegenerateEquation)
        );
    }

    #[test]
    fn equidistant_roots_take_larger() {
        // roots ±2, current g = 0
        assert_eq!(
            renormalize_g(&coeffs(1.0, 0.0, -4.0), 0.0).unwrap(),
            (2.0, RootStatus::TwoReal)
        );
    }

    #[test]
    fn coefficient_errors() {
        let h1 = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let h =
            HamiltonianPair::from_dense(Representation::Su2, &DMatrix::zeros(2, 2), &h1).unwrap();
        assert!(matches!(
            quadratic_coefficients(&h, &[1.0, 0.0], -1.0, 0, 2),
            Err(LadderError::IndexOutOfRange { index: 2, dim: 2 })
        ));
        assert!(matches!(
            quadratic_coefficients(&h, &[1.0], -1.0, 0, 1),
            Err(LadderError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn zero_h0_constant_term() {
        let h1 = DMatrix::from_row_slice(3, 3, &[1.0, 0.2, 0.3, 0.2, -1.0, 0.4, 0.3, 0.4, 0.5]);
        let h =
            HamiltonianPair::from_dense(Representation::Su2, &DMatrix::zeros(3, 3), &h1).unwrap();
        let amps = [0.6, -0.7, 0.3872983346207417];
        let q = quadratic_coefficients(&h, &amps, -2.5, 0, 2).unwrap();
        assert_eq!(q.alpha_1, 0.0);
        assert_eq!(q.alpha_n, 0.0);
        assert_eq!(q.c, -0.6 * 2.5 * 2.5);
    }
}
