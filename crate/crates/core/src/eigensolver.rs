//! Lowest eigenpairs of `H₀ + g H₁`.
//!
//! Small problems go to a dense symmetric eigensolver. Larger ones use
//! Lanczos with full reorthogonalization; the `k` pairs are found one at a
//! time, each run restricted to the orthogonal complement of the pairs
//! already locked, so degenerate levels are resolved as well.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::Basis;
use crate::error::{EigenError, LadderError};
use crate::hamiltonian::HamiltonianPair;

pub const DEFAULT_DENSE_THRESHOLD: usize = 256;
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0x5eed_1adde5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Dimensions up to this size are diagonalized densely.
    pub dense_threshold: usize,
    /// Bound on `‖Hx - λx‖₂` for every returned pair.
    pub tol: f64,
    /// Lanczos steps allowed per locked pair.
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            dense_threshold: DEFAULT_DENSE_THRESHOLD,
            tol: DEFAULT_TOLERANCE,
            max_iterations: 1000,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    /// Total Lanczos steps; zero for the dense path.
    pub iterations: usize,
}

impl EigenResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground_energy(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// The `k` algebraically smallest eigenpairs.
pub fn lowest_eigenpairs(
    ham: &HamiltonianPair,
    g: f64,
    k: usize,
    config: &SolverConfig,
) -> Result<EigenResult, EigenError> {
    let dim = ham.dim();
    if k == 0 || k > dim {
        return Err(EigenError::TooManyPairs { requested: k, dim });
    }
    if config.tol.is_nan() || config.tol <= 0.0 {
        return Err(EigenError::InvalidSetting(format!(
            "tolerance must be positive, got {}",
            config.tol
        )));
    }
    let mut result = if dim <= config.dense_threshold {
        dense_lowest(ham, g, k)
    } else {
        lanczos_lowest(ham, g, k, config)?
    };
    for v in &mut result.eigenvectors {
        fix_sign(v);
    }
    result.residuals = result
        .eigenvalues
        .iter()
        .zip(&result.eigenvectors)
        .map(|(&lambda, v)| residual(ham, g, lambda, v))
        .collect();
    if result.residuals.iter().any(|&r| r > config.tol) {
        return Err(EigenError::NoConvergence {
            iterations: result.iterations,
            residuals: result.residuals,
        });
    }
    let degenerate = result
        .eigenvalues
        .windows(2)
        .any(|w| (w[1] - w[0]).abs() <= 10.0 * config.tol);
    if degenerate {
        log::debug!("degenerate levels among the lowest {k} at dim {dim}");
    }
    Ok(result)
}

/// Ground-state amplitudes `a_1i`, unit norm, largest magnitude positive.
pub fn ground_amplitudes(result: &EigenResult, basis: &Basis) -> Result<Vec<f64>, LadderError> {
    let v = result
        .eigenvectors
        .first()
        .ok_or_else(|| LadderError::InvalidArgument("no eigenpairs".into()))?;
    if v.len() != basis.dim() {
        return Err(LadderError::DimensionMismatch {
            expected: basis.dim(),
            found: v.len(),
        });
    }
    Ok(normalized_amplitudes(v))
}

pub(crate) fn normalized_amplitudes(v: &[f64]) -> Vec<f64> {
    let norm = dot(v, v).sqrt();
    let mut a: Vec<f64> = v.iter().map(|x| x / norm).collect();
    fix_sign(&mut a);
    a
}

/// Flips `v` so its largest-magnitude entry (first on ties) is positive.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

fn residual(ham: &HamiltonianPair, g: f64, lambda: f64, v: &[f64]) -> f64 {
    let mut hv = vec![0.0; v.len()];
    ham.apply(g, v, &mut hv);
    hv.iter()
        .zip(v)
        .map(|(h, x)| (h - lambda * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(y, x)| *y += alpha * x);
}

/// Dense symmetric diagonalization of a full matrix; eigenvalues ascending,
/// eigenvectors as matching columns.
pub fn dense_spectrum(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = a
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigendecomposition failed");
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let values = order.iter().map(|&i| s[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| u[(r, order[c])]);
    (values, vectors)
}

fn dense_lowest(ham: &HamiltonianPair, g: f64, k: usize) -> EigenResult {
    let (values, vectors) = dense_spectrum(ham.dense(g));
    EigenResult {
        eigenvalues: values[..k].to_vec(),
        eigenvectors: (0..k)
            .map(|c| vectors.column(c).iter().copied().collect())
            .collect(),
        residuals: Vec::new(),
        iterations: 0,
    }
}

/// Symmetric tridiagonal matrix with diagonal `alpha` and off-diagonal `beta`.
struct Tridiagonal<'a> {
    alpha: &'a [f64],
    beta: &'a [f64],
}

impl Tridiagonal<'_> {
    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.alpha.len() {
            let off = if i == 0 {
                0.0
            } else {
                self.beta[i - 1].powi(2) / q
            };
            q = self.alpha[i] - x - off;
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn lowest_eigenvalue(&self) -> f64 {
        let m = self.alpha.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..m {
            let r = if i > 0 { self.beta[i - 1].abs() } else { 0.0 }
                + if i + 1 < m { self.beta[i].abs() } else { 0.0 };
            lo = lo.min(self.alpha[i] - r);
            hi = hi.max(self.alpha[i] + r);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for the eigenvalue `theta` by inverse iteration.
    fn eigenvector(&self, theta: f64) -> Vec<f64> {
        let m = self.alpha.len();
        let scale = self
            .alpha
            .iter()
            .chain(self.beta.iter())
            .fold(0.0f64, |a, &b| a.max(b.abs()))
            .max(1.0);
        let shift = theta - 1e3 * f64::EPSILON * scale;
        let mut x = vec![1.0; m];
        for _ in 0..3 {
            x = self.solve_shifted(shift, &x, scale);
            let norm = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
        }
        x
    }

    /// Solves `(T - shift) y = rhs` with the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, rhs: &[f64], scale: f64) -> Vec<f64> {
        let m = self.alpha.len();
        let tiny = f64::EPSILON * scale;
        let mut diag = vec![0.0; m];
        let mut y = rhs.to_vec();
        diag[0] = self.alpha[0] - shift;
        for i in 1..m {
            if diag[i - 1].abs() < tiny {
                diag[i - 1] = tiny;
            }
            let factor = self.beta[i - 1] / diag[i - 1];
            diag[i] = self.alpha[i] - shift - factor * self.beta[i - 1];
            y[i] -= factor * y[i - 1];
        }
        if diag[m - 1].abs() < tiny {
            diag[m - 1] = tiny;
        }
        y[m - 1] /= diag[m - 1];
        for i in (0..m - 1).rev() {
            y[i] = (y[i] - self.beta[i] * y[i + 1]) / diag[i];
        }
        y
    }
}

struct LockedPair {
    value: f64,
    vector: Vec<f64>,
}

fn orthogonalize(v: &mut [f64], against: &[Vec<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in against {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

fn lanczos_lowest(
    ham: &HamiltonianPair,
    g: f64,
    k: usize,
    config: &SolverConfig,
) -> Result<EigenResult, EigenError> {
    let dim = ham.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut locked: Vec<LockedPair> = Vec::with_capacity(k);
    let mut total_iterations = 0;
    for _ in 0..k {
        let locked_vectors: Vec<Vec<f64>> = locked.iter().map(|p| p.vector.clone()).collect();
        let (pair, iterations) =
            lanczos_one(ham, g, &locked_vectors, &mut rng, config).map_err(|err| match err {
                EigenError::NoConvergence {
                    iterations,
                    mut residuals,
                } => {
                    let mut best: Vec<f64> = locked
                        .iter()
                        .map(|p| residual(ham, g, p.value, &p.vector))
                        .collect();
                    best.append(&mut residuals);
                    EigenError::NoConvergence {
                        iterations: total_iterations + iterations,
                        residuals: best,
                    }
                }
                other => other,
            })?;
        total_iterations += iterations;
        locked.push(pair);
    }
    // locking can return near-degenerate pairs out of order
    locked.sort_by(|a, b| a.value.total_cmp(&b.value));
    debug_assert!(locked.iter().all(|p| p.vector.len() == dim));
    Ok(EigenResult {
        eigenvalues: locked.iter().map(|p| p.value).collect(),
        eigenvectors: locked.into_iter().map(|p| p.vector).collect(),
        residuals: Vec::new(),
        iterations: total_iterations,
    })
}

/// Lowest eigenpair of `H` restricted to the complement of `locked`.
fn lanczos_one(
    ham: &HamiltonianPair,
    g: f64,
    locked: &[Vec<f64>],
    rng: &mut ChaCha8Rng,
    config: &SolverConfig,
) -> Result<(LockedPair, usize), EigenError> {
    let dim = ham.dim();
    let available = dim - locked.len();
    let max_steps = config.max_iterations.min(available);
    let check_every = 5;

    let mut start: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
    orthogonalize(&mut start, locked);
    let norm = dot(&start, &start).sqrt();
    start.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![start];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; dim];
    let mut best_residual = f64::INFINITY;

    for step in 0..max_steps {
        let q = &basis[step];
        ham.apply(g, q, &mut w);
        let a = dot(q, &w);
        alpha.push(a);
        axpy(-a, q, &mut w);
        if step > 0 {
            axpy(-beta[step - 1], &basis[step - 1], &mut w);
        }
        orthogonalize(&mut w, locked);
        orthogonalize(&mut w, &basis);
        let b = dot(&w, &w).sqrt();

        let m = step + 1;
        let exhausted = b <= 1e-12 * alpha.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        let last = m == max_steps;
        if exhausted || last || m % check_every == 0 {
            let t = Tridiagonal {
                alpha: &alpha,
                beta: &beta,
            };
            let theta = t.lowest_eigenvalue();
            let s = t.eigenvector(theta);
            let estimate = if exhausted { 0.0 } else { b * s[m - 1].abs() };
            if exhausted || estimate <= 0.1 * config.tol {
                let mut y = vec![0.0; dim];
                for (coef, q) in s.iter().zip(&basis) {
                    axpy(*coef, q, &mut y);
                }
                orthogonalize(&mut y, locked);
                let norm = dot(&y, &y).sqrt();
                y.iter_mut().for_each(|x| *x /= norm);
                ham.apply(g, &y, &mut w);
                let value = dot(&y, &w);
                let r = residual(ham, g, value, &y);
                best_residual = best_residual.min(r);
                if r <= config.tol {
                    return Ok((LockedPair { value, vector: y }, m));
                }
                if exhausted {
                    break;
                }
            } else {
                best_residual = best_residual.min(estimate);
            }
        }
        if exhausted || last {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(std::mem::replace(&mut w, vec![0.0; dim]));
    }
    Err(EigenError::NoConvergence {
        iterations: alpha.len(),
        residuals: vec![best_residual],
    })
}
