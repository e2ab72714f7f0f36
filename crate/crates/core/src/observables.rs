//! Stability and structure diagnostics along a reduction trajectory.

use crate::error::LadderError;
use crate::reduction::ReductionTrajectory;

/// Threshold on `|a_1i|` separating relevant from irrelevant amplitudes.
pub const DEFAULT_EPSILON: f64 = 1e-2;

/// Percentage deviation `|(e_full - e_reduced)/e_full| × 100`.
pub fn deviation_p(e_full: f64, e_reduced: f64) -> Result<f64, LadderError> {
    if e_full == 0.0 {
        return Err(LadderError::UndefinedDeviation);
    }
    Ok(((e_full - e_reduced) / e_full).abs() * 100.0)
}

/// Shannon entropy of `P_i = a_i²` divided by the number of sites `2L`.
pub fn entropy_per_site(amplitudes: &[f64], length: usize) -> Result<f64, LadderError> {
    if length == 0 {
        return Err(LadderError::InvalidArgument(
            "length must be positive".into(),
        ));
    }
    let norm_sq: f64 = amplitudes.iter().map(|a| a * a).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(LadderError::Unnormalized { norm_sq });
    }
    let h: f64 = amplitudes
        .iter()
        .map(|a| a * a)
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln())
        .sum();
    Ok(h.max(0.0) / (2 * length) as f64)
}

/// `(relevant, irrelevant)` with relevant meaning `|a| > epsilon` strictly.
pub fn relevant_count(amplitudes: &[f64], epsilon: f64) -> (usize, usize) {
    let relevant = amplitudes.iter().filter(|a| a.abs() > epsilon).count();
    (relevant, amplitudes.len() - relevant)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepObservables {
    pub dim: usize,
    /// Energies per site `λ_i / 2L`.
    pub energies: Vec<f64>,
    /// Deviations from the full-space energies, in percent.
    pub deviations: Vec<f64>,
    pub entropy: f64,
    pub relevant: usize,
    pub irrelevant: usize,
}

impl StepObservables {
    pub fn p1(&self) -> f64 {
        self.deviations[0]
    }

    /// Relevant minus irrelevant.
    pub fn count_difference(&self) -> i64 {
        self.relevant as i64 - self.irrelevant as i64
    }
}

/// Observables for every step of `trajectory`.
pub fn observe(
    trajectory: &ReductionTrajectory,
    length: usize,
    epsilon: f64,
) -> Result<Vec<StepObservables>, LadderError> {
    let sites = (2 * length) as f64;
    let full: Vec<f64> = trajectory
        .full_eigenvalues()
        .iter()
        .map(|l| l / sites)
        .collect();
    trajectory
        .steps
        .iter()
        .map(|step| {
            let energies: Vec<f64> = step.eigenvalues.iter().map(|l| l / sites).collect();
            let deviations = energies
                .iter()
                .zip(&full)
                .map(|(&e, &ef)| deviation_p(ef, e))
                .collect::<Result<Vec<_>, _>>()?;
            let (relevant, irrelevant) = relevant_count(&step.amplitudes, epsilon);
            Ok(StepObservables {
                dim: step.dim,
                energies,
                deviations,
                entropy: entropy_per_site(&step.amplitudes, length)?,
                relevant,
                irrelevant,
            })
        })
        .collect()
}

/// Smallest dimension `n` such that `p(1) < threshold` at every recorded
/// dimension `≥ n`.
pub fn deepest_stable_dim(
    observables: &[StepObservables],
    threshold_percent: f64,
) -> Option<usize> {
    let mut deepest = None;
    for obs in observables {
        if obs.p1() < threshold_percent {
            deepest = Some(obs.dim);
        } else {
            break;
        }
    }
    deepest
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deviation_examples() {
        assert_eq!(deviation_p(-3.0, -3.0).unwrap(), 0.0);
        assert!((deviation_p(-1.0, -1.01).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(deviation_p(2.0, 1.0).unwrap(), 50.0);
        assert_eq!(deviation_p(0.0, 1.0), Err(LadderError::UndefinedDeviation));
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy_per_site(&[0.0, 1.0, 0.0], 3).unwrap(), 0.0);
        let h = 0.5f64.sqrt();
        assert!((entropy_per_site(&[h, h], 1).unwrap() - 0.5 * 2f64.ln()).abs() < 1e-15);
        let n = 37;
        let uniform = vec![1.0 / (n as f64).sqrt(); n];
        let s = entropy_per_site(&uniform, 2).unwrap();
        assert!((s - (n as f64).ln() / 4.0).abs() < 1e-14);
        assert!(matches!(
            entropy_per_site(&[0.5, 0.5], 1),
            Err(LadderError::Unnormalized { .. })
        ));
    }

    #[test]
    fn relevant_examples() {
        assert_eq!(relevant_count(&[0.9, 0.02, 0.005], 0.01), (2, 1));
        assert_eq!(relevant_count(&[0.01, -0.01], 0.01), (0, 2));
        let n = 9999;
        let uniform = vec![1.0 / (n as f64).sqrt(); n];
        assert_eq!(relevant_count(&uniform, DEFAULT_EPSILON), (n, 0));
    }

    #[test]
    fn deepest_stable() {
        let mk = |dim, p| StepObservables {
            dim,
            energies: vec![],
            deviations: vec![p],
            entropy: 0.0,
            relevant: 0,
            irrelevant: dim,
        };
        let obs = vec![mk(10, 0.0), mk(9, 0.5), mk(8, 2.0), mk(7, 0.1)];
        assert_eq!(deepest_stable_dim(&obs, 1.0), Some(9));
        assert_eq!(deepest_stable_dim(&obs[2..], 1.0), None);
    }
}
