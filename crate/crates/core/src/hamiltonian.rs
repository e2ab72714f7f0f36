//! Ladder Hamiltonian `H = H₀ + g H₁` with `g = J_t` and `H₀ = 0`.
//!
//! `H₁` contains the rung bonds with unit weight and the leg and diagonal
//! bonds scaled by the ratios `γ_tl = J_l/J_t`, `γ_c = J_c/J_t`. Legs have
//! open ends. The SO(4) matrix is the SU(2) matrix conjugated by the
//! rung-wise Clebsch-Gordan transform.

use std::io::{self, Write};

use nalgebra::DMatrix;

use crate::basis::{
    enumerate_su2, so4_components, su2_overlaps, Basis, Representation, RungConfig, SpinConfig,
};
use crate::error::LadderError;
use crate::sparse::CsrMatrix;

/// Coupling strengths of the frustrated ladder. The ratios to `J_t` are
/// fixed here and never change while `g` is renormalized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet {
    rung: f64,
    leg: f64,
    cross: f64,
}

impl CouplingSet {
    pub fn new(rung: f64, leg: f64, cross: f64) -> Result<Self, LadderError> {
        if rung == 0.0 || !rung.is_finite() {
            return Err(LadderError::ZeroRungCoupling);
        }
        if !leg.is_finite() || !cross.is_finite() {
            return Err(LadderError::InvalidArgument(
                "couplings must be finite".into(),
            ));
        }
        Ok(CouplingSet { rung, leg, cross })
    }

    /// `J_t`, also the starting value of `g`.
    pub fn rung(&self) -> f64 {
        self.rung
    }

    pub fn leg(&self) -> f64 {
        self.leg
    }

    pub fn cross(&self) -> f64 {
        self.cross
    }

    pub fn gamma_leg(&self) -> f64 {
        self.leg / self.rung
    }

    pub fn gamma_cross(&self) -> f64 {
        self.cross / self.rung
    }

    /// `J_1 = (J_l + J_c)/2`, coupling of neighbouring rung spins `S`.
    pub fn j1(&self) -> f64 {
        0.5 * (self.leg + self.cross)
    }

    /// `J_2 = (J_l - J_c)/2`, coupling of neighbouring `R` vectors.
    pub fn j2(&self) -> f64 {
        0.5 * (self.leg - self.cross)
    }
}

/// Sparse symmetric pair `(H₀, H₁)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianPair {
    representation: Representation,
    h0: CsrMatrix,
    h1: CsrMatrix,
}

impl HamiltonianPair {
    pub fn new(
        representation: Representation,
        h0: CsrMatrix,
        h1: CsrMatrix,
    ) -> Result<Self, LadderError> {
        if h0.dim() != h1.dim() {
            return Err(LadderError::DimensionMismatch {
                expected: h1.dim(),
                found: h0.dim(),
            });
        }
        Ok(HamiltonianPair {
            representation,
            h0,
            h1,
        })
    }

    /// Pair from dense matrices, mostly for tests and toy problems.
    pub fn from_dense(
        representation: Representation,
        h0: &DMatrix<f64>,
        h1: &DMatrix<f64>,
    ) -> Result<Self, LadderError> {
        Self::new(
            representation,
            CsrMatrix::from_dense(h0),
            CsrMatrix::from_dense(h1),
        )
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }

    pub fn h0(&self) -> &CsrMatrix {
        &self.h0
    }

    pub fn h1(&self) -> &CsrMatrix {
        &self.h1
    }

    /// `ε_i = (H₀)_ii + g (H₁)_ii`.
    pub fn diagonal(&self, g: f64) -> Vec<f64> {
        self.h0
            .diagonal()
            .into_iter()
            .zip(self.h1.diagonal())
            .map(|(a, b)| a + g * b)
            .collect()
    }

    /// `y = (H₀ + g H₁) x` into a caller buffer.
    pub fn apply(&self, g: f64, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        self.h0.mul_add(1.0, x, y);
        self.h1.mul_add(g, x, y);
    }

    pub fn matvec(&self, g: f64, x: &[f64]) -> Result<Vec<f64>, LadderError> {
        if x.len() != self.dim() {
            return Err(LadderError::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        let mut y = vec![0.0; x.len()];
        self.apply(g, x, &mut y);
        Ok(y)
    }

    /// Deletes every row and column not listed in the increasing list `keep`.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self, LadderError> {
        Ok(HamiltonianPair {
            representation: self.representation,
            h0: self.h0.restrict(keep)?,
            h1: self.h1.restrict(keep)?,
        })
    }

    /// Restriction to the leading `n` states.
    pub fn truncate(&self, n: usize) -> Result<Self, LadderError> {
        Ok(HamiltonianPair {
            representation: self.representation,
            h0: self.h0.truncate(n)?,
            h1: self.h1.truncate(n)?,
        })
    }

    pub fn permute(&self, perm: &[usize]) -> Result<Self, LadderError> {
        crate::basis::check_permutation(perm, self.dim())?;
        Ok(HamiltonianPair {
            representation: self.representation,
            h0: self.h0.permute(perm),
            h1: self.h1.permute(perm),
        })
    }

    pub fn dense(&self, g: f64) -> DMatrix<f64> {
        self.h0.to_dense() + self.h1.to_dense() * g
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.h0.max_asymmetry().max(self.h1.max_asymmetry())
    }

    /// Writes `H₀ + g H₁` in the `row col value` text format.
    pub fn write_dump<W: Write>(&self, g: f64, out: W) -> io::Result<()> {
        CsrMatrix::from_dense(&self.dense(g)).write_dump(out)
    }
}

/// A two-spin exchange `w s_a·s_b` between bit positions `a` and `b`.
#[derive(Debug, Clone, Copy)]
struct Bond {
    a: usize,
    b: usize,
    weight: f64,
}

fn ladder_bonds(length: usize, couplings: &CouplingSet) -> Vec<Bond> {
    let site = SpinConfig::site_bit;
    let (gl, gc) = (couplings.gamma_leg(), couplings.gamma_cross());
    let mut bonds = Vec::with_capacity(5 * length);
    for i in 0..length {
        bonds.push(Bond {
            a: site(i, 0),
            b: site(i, 1),
            weight: 1.0,
        });
    }
    for i in 0..length.saturating_sub(1) {
        let j = i + 1;
        for (a, b, weight) in [
            (site(i, 0), site(j, 0), gl),
            (site(i, 1), site(j, 1), gl),
            (site(i, 0), site(j, 1), gc),
            (site(i, 1), site(j, 0), gc),
        ] {
            if weight != 0.0 {
                bonds.push(Bond { a, b, weight });
            }
        }
    }
    bonds
}

fn su2_h1(basis: &Basis, couplings: &CouplingSet) -> CsrMatrix {
    let bonds = ladder_bonds(basis.length(), couplings);
    let mut triplets = Vec::new();
    for p in 0..basis.dim() {
        let bits = basis.raw(p);
        let mut diag = 0.0;
        for bond in &bonds {
            let up_a = bits >> bond.a & 1;
            let up_b = bits >> bond.b & 1;
            if up_a == up_b {
                diag += 0.25 * bond.weight;
            } else {
                diag -= 0.25 * bond.weight;
                let flipped = bits ^ (1 << bond.a | 1 << bond.b);
                let q = basis
                    .index_of_raw(flipped)
                    .expect("spin flip leaves the M_tot = 0 sector");
                triplets.push((p, q, 0.5 * bond.weight));
            }
        }
        triplets.push((p, p, diag));
    }
    CsrMatrix::from_triplets(basis.dim(), triplets)
}

/// Product-state Hamiltonian. The physical operator is `g H₁` with `g = J_t`.
pub fn build_su2(basis: &Basis, couplings: &CouplingSet) -> Result<HamiltonianPair, LadderError> {
    if basis.representation() != Representation::Su2 {
        return Err(LadderError::RepresentationMismatch {
            expected: Representation::Su2,
            found: basis.representation(),
        });
    }
    let h1 = su2_h1(basis, couplings);
    HamiltonianPair::new(Representation::Su2, CsrMatrix::zeros(basis.dim()), h1)
}

/// Rung singlet/triplet Hamiltonian, `H₁ = Uᵀ H₁^(su2) U`.
///
/// Only entries with row ≤ column are computed; the lower triangle is a
/// mirror, so the result is exactly symmetric.
pub fn build_so4(basis: &Basis, couplings: &CouplingSet) -> Result<HamiltonianPair, LadderError> {
    if basis.representation() != Representation::So4 {
        return Err(LadderError::RepresentationMismatch {
            expected: Representation::So4,
            found: basis.representation(),
        });
    }
    let length = basis.length();
    let su2 = enumerate_su2(length)?;
    let h_su2 = su2_h1(&su2, couplings);
    let cutoff = 1e-13
        * 1f64
            .max(couplings.gamma_leg().abs())
            .max(couplings.gamma_cross().abs());

    let dim = basis.dim();
    let mut work = vec![0.0; su2.dim()];
    let mut touched = Vec::new();
    let mut column = vec![0.0; dim];
    let mut column_touched = Vec::new();
    let mut triplets = Vec::new();
    for q in 0..dim {
        // work = H_su2 · U[:, q]
        for (bits, u) in so4_components(RungConfig::new(basis.raw(q), length)) {
            let s = su2.index_of_raw(bits).expect("component outside M_tot = 0");
            for (t, h) in h_su2.row(s) {
                if work[t] == 0.0 {
                    touched.push(t);
                }
                work[t] += h * u;
            }
        }
        // column = Uᵀ · work
        for &t in &touched {
            let w = work[t];
            work[t] = 0.0;
            if w == 0.0 {
                continue;
            }
            for (codes, u) in su2_overlaps(SpinConfig::new(su2.raw(t), length)) {
                let p = basis.index_of_raw(codes).expect("overlap outside basis");
                if p <= q {
                    if column[p] == 0.0 {
                        column_touched.push(p);
                    }
                    column[p] += u * w;
                }
            }
        }
        touched.clear();
        for &p in &column_touched {
            let v = column[p];
            column[p] = 0.0;
            if v.abs() > cutoff {
                triplets.push((p, q, v));
                if p != q {
                    triplets.push((q, p, v));
                }
            }
        }
        column_touched.clear();
    }
    let h1 = CsrMatrix::from_triplets(dim, triplets);
    HamiltonianPair::new(Representation::So4, CsrMatrix::zeros(dim), h1)
}

/// Builds the Hamiltonian matching the basis representation.
pub fn build(basis: &Basis, couplings: &CouplingSet) -> Result<HamiltonianPair, LadderError> {
    match basis.representation() {
        Representation::Su2 => build_su2(basis, couplings),
        Representation::So4 => build_so4(basis, couplings),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_so4, su2_to_so4_matrix};

    fn strong() -> CouplingSet {
        CouplingSet::new(15.0, 5.0, 3.0).unwrap()
    }

    fn sorted_eigs(m: DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn couplings_reject_zero_rung() {
        assert_eq!(
            CouplingSet::new(0.0, 1.0, 1.0),
            Err(LadderError::ZeroRungCoupling)
        );
        let c = strong();
        assert_eq!(c.gamma_leg(), 5.0 / 15.0);
        assert_eq!(c.j1(), 4.0);
        assert_eq!(c.j2(), 1.0);
    }

    #[test]
    fn single_rung_su2() {
        let basis = enumerate_su2(1).unwrap();
        let h = build_su2(&basis, &CouplingSet::new(2.0, 7.0, 1.0).unwrap()).unwrap();
        assert!(h.h0().is_zero());
        let expected = DMatrix::from_row_slice(2, 2, &[-0.25, 0.5, 0.5, -0.25]);
        assert_eq!(h.h1().to_dense(), expected);
        let e = sorted_eigs(h.h1().to_dense());
        assert!((e[0] + 0.75).abs() < 1e-14 && (e[1] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn single_rung_so4_is_diagonal() {
        let basis = enumerate_so4(1).unwrap();
        let h = build_so4(&basis, &strong()).unwrap();
        let m = h.h1().to_dense();
        assert!((m[(0, 0)] + 0.75).abs() < 1e-15);
        assert!((m[(1, 1)] - 0.25).abs() < 1e-15);
        assert_eq!(m[(0, 1)], 0.0);
        assert_eq!(m[(1, 0)], 0.0);
    }

    #[test]
    fn representation_mismatch() {
        let su2 = enumerate_su2(2).unwrap();
        let so4 = enumerate_so4(2).unwrap();
        assert!(matches!(
            build_so4(&su2, &strong()),
            Err(LadderError::RepresentationMismatch { .. })
        ));
        assert!(matches!(
            build_su2(&so4, &strong()),
            Err(LadderError::RepresentationMismatch { .. })
        ));
    }

    #[test]
    fn so4_equals_conjugated_su2() {
        for length in [2, 3] {
            let u = su2_to_so4_matrix(length).unwrap();
            let su2 = build_su2(&enumerate_su2(length).unwrap(), &strong()).unwrap();
            let so4 = build_so4(&enumerate_so4(length).unwrap(), &strong()).unwrap();
            let oracle = u.transpose() * su2.h1().to_dense() * &u;
            let err = (oracle - so4.h1().to_dense()).abs().max();
            assert!(err < 1e-12, "L={length}: {err}");
        }
    }

    #[test]
    fn exact_symmetry_and_sparsity() {
        let length = 5;
        for basis in [
            enumerate_su2(length).unwrap(),
            enumerate_so4(length).unwrap(),
        ] {
            let h = build(&basis, &strong()).unwrap();
            assert_eq!(h.max_asymmetry(), 0.0);
            for i in 0..h.dim() {
                assert!(h.h1().row_nnz(i) <= 1 + 3 * 2 * length);
            }
        }
    }

    #[test]
    fn matvec_edge_cases() {
        let basis = enumerate_su2(1).unwrap();
        let h = build_su2(&basis, &strong()).unwrap();
        assert_eq!(h.matvec(0.0, &[1.0, 2.0]).unwrap(), vec![0.0, 0.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y = h.matvec(15.0, &[s, -s]).unwrap();
        assert!((y[0] + 0.75 * 15.0 * s).abs() < 1e-13);
        assert!((y[1] - 0.75 * 15.0 * s).abs() < 1e-13);
        assert!(matches!(
            h.matvec(1.0, &[1.0]),
            Err(LadderError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn restrict_examples() {
        let basis = enumerate_su2(1).unwrap();
        let h = build_su2(&basis, &strong()).unwrap();
        assert_eq!(h.restrict(&[0, 1]).unwrap(), h);
        let one = h.restrict(&[0]).unwrap();
        assert_eq!(one.h1().to_dense()[(0, 0)], -0.25);
        assert!(matches!(
            h.restrict(&[]),
            Err(LadderError::EmptyRestriction)
        ));

        let big = build_su2(&enumerate_su2(3).unwrap(), &strong()).unwrap();
        let twice = big
            .restrict(&[0, 2, 3, 5, 7, 11, 13])
            .unwrap()
            .restrict(&[1, 2, 4, 6])
            .unwrap();
        assert_eq!(twice, big.restrict(&[2, 3, 7, 13]).unwrap());
    }

    #[test]
    fn bond_weights_follow_ratios() {
        let c = CouplingSet::new(4.0, 2.0, 1.0).unwrap();
        let bonds = ladder_bonds(2, &c);
        assert_eq!(bonds.len(), 6);
        let total: f64 = bonds.iter().map(|b| b.weight).sum();
        assert_eq!(total, 2.0 + 2.0 * 0.5 + 2.0 * 0.25);
        // no bonds across the open end
        assert_eq!(ladder_bonds(1, &c).len(), 1);
    }
}
