//! Hilbert-space reduction with coupling renormalization for frustrated
//! two-leg spin-1/2 ladders.
//!
//! The ladder Hamiltonian is written as `H = H₀ + g H₁` with `g = J_t`.
//! States are removed one at a time from an ordered basis while `g` is
//! adjusted so that the full-space ground energy stays an eigenvalue of the
//! reduced problem. Both the product (SU(2)) basis and the rung
//! singlet/triplet (SO(4)) basis are supported.

pub mod basis;
pub mod eigensolver;
pub mod error;
pub mod hamiltonian;
pub mod observables;
pub mod reduction;
pub mod sparse;

pub use basis::{
    enumerate_so4, enumerate_su2, order_basis, su2_to_so4_matrix, Basis, BasisState,
    OrderingStrategy, Representation, RungConfig, RungState, SpinConfig,
};
pub use eigensolver::{ground_amplitudes, lowest_eigenpairs, EigenResult, SolverConfig};
pub use error::{EigenError, LadderError};
pub use hamiltonian::{build, build_so4, build_su2, CouplingSet, HamiltonianPair};
pub use observables::{
    deepest_stable_dim, deviation_p, entropy_per_site, observe, relevant_count, StepObservables,
};
pub use reduction::{
    quadratic_coefficients, renormalize_g, run_reduction, QuadraticCoefficients, ReductionConfig,
    ReductionError, ReductionStep, ReductionTrajectory, ReorderPolicy, RootStatus, Termination,
};
pub use sparse::CsrMatrix;

/// Enumerates the basis for `representation` and builds its Hamiltonian.
pub fn setup(
    representation: Representation,
    length: usize,
    couplings: &CouplingSet,
) -> Result<(Basis, HamiltonianPair), LadderError> {
    let basis = match representation {
        Representation::Su2 => enumerate_su2(length)?,
        Representation::So4 => enumerate_so4(length)?,
    };
    let ham = build(&basis, couplings)?;
    Ok((basis, ham))
}
