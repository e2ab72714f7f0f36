//! Bases of the `M_tot = 0` sector of a two-leg spin-1/2 ladder.
//!
//! Two bases span the same subspace:
//!
//! * **SU(2)** product states. Site `(i, k)` (rung `i = 0..L`, leg `k = 0, 1`)
//!   is bit `2i + k` of a `u32`; a set bit means `m = +1/2`.
//! * **SO(4)** rung-coupled states. Each rung carries `(S, M)` packed as a
//!   two-bit code in the order `(0,0) < (1,-1) < (1,0) < (1,1)`; rung 0 is the
//!   most significant digit so that ascending codes are lexicographic order.
//!
//! Both enumerations are ascending in their packed encoding, which fixes the
//! reference index of every state.

use std::collections::HashMap;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::LadderError;
use crate::hamiltonian::HamiltonianPair;

/// Largest supported ladder length (2L bits must fit a `u32`).
pub const MAX_LENGTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Representation {
    Su2,
    So4,
}

/// Product configuration of the `2L` spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfig {
    bits: u32,
    length: usize,
}

impl SpinConfig {
    pub fn new(bits: u32, length: usize) -> Self {
        SpinConfig { bits, length }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn site_bit(rung: usize, leg: usize) -> usize {
        2 * rung + leg
    }

    pub fn is_up(&self, rung: usize, leg: usize) -> bool {
        self.bits >> Self::site_bit(rung, leg) & 1 == 1
    }

    /// Twice the total magnetization.
    pub fn two_m_total(&self) -> i32 {
        2 * self.bits.count_ones() as i32 - 2 * self.length as i32
    }
}

/// `(S, M)` of a single rung.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RungState {
    pub spin: u8,
    pub proj: i8,
}

impl RungState {
    pub const SINGLET: RungState = RungState { spin: 0, proj: 0 };
    pub const TRIPLET_DOWN: RungState = RungState { spin: 1, proj: -1 };
    pub const TRIPLET_ZERO: RungState = RungState { spin: 1, proj: 0 };
    pub const TRIPLET_UP: RungState = RungState { spin: 1, proj: 1 };

    const ORDER: [RungState; 4] = [
        Self::SINGLET,
        Self::TRIPLET_DOWN,
        Self::TRIPLET_ZERO,
        Self::TRIPLET_UP,
    ];

    pub fn from_code(code: u32) -> Self {
        Self::ORDER[(code & 3) as usize]
    }

    pub fn code(&self) -> u32 {
        match (self.spin, self.proj) {
            (0, 0) => 0,
            (1, -1) => 1,
            (1, 0) => 2,
            (1, 1) => 3,
            _ => unreachable!("invalid rung state ({}, {})", self.spin, self.proj),
        }
    }
}

/// Configuration of `L` rungs in the coupled basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RungConfig {
    codes: u32,
    length: usize,
}

impl RungConfig {
    pub fn new(codes: u32, length: usize) -> Self {
        RungConfig { codes, length }
    }

    pub fn from_rungs(rungs: &[RungState]) -> Self {
        let codes = rungs.iter().fold(0u32, |acc, r| acc << 2 | r.code());
        RungConfig {
            codes,
            length: rungs.len(),
        }
    }

    pub fn codes(&self) -> u32 {
        self.codes
    }

    pub fn rung(&self, i: usize) -> RungState {
        RungState::from_code(self.codes >> (2 * (self.length - 1 - i)))
    }

    pub fn rungs(&self) -> Vec<RungState> {
        (0..self.length).map(|i| self.rung(i)).collect()
    }

    pub fn total_proj(&self) -> i32 {
        (0..self.length).map(|i| self.rung(i).proj as i32).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisState {
    Su2(SpinConfig),
    So4(RungConfig),
}

/// Ordered list of basis states with exact reverse lookup.
///
/// States are stored as their packed `u32` encoding; `labels` keeps the
/// position each state had in the reference enumeration so orderings and
/// truncations can be traced back.
#[derive(Debug, Clone)]
pub struct Basis {
    representation: Representation,
    length: usize,
    states: Vec<u32>,
    labels: Vec<usize>,
    index: HashMap<u32, usize>,
}

impl Basis {
    fn from_states(representation: Representation, length: usize, states: Vec<u32>) -> Self {
        let labels = (0..states.len()).collect();
        let index = states.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        Basis {
            representation,
            length,
            states,
            labels,
            index,
        }
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn raw_states(&self) -> &[u32] {
        &self.states
    }

    pub fn raw(&self, p: usize) -> u32 {
        self.states[p]
    }

    pub fn state(&self, p: usize) -> BasisState {
        match self.representation {
            Representation::Su2 => BasisState::Su2(SpinConfig::new(self.states[p], self.length)),
            Representation::So4 => BasisState::So4(RungConfig::new(self.states[p], self.length)),
        }
    }

    /// Reference-enumeration index of the state at position `p`.
    pub fn label(&self, p: usize) -> usize {
        self.labels[p]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        let raw = match (self.representation, state) {
            (Representation::Su2, BasisState::Su2(c)) if c.length() == self.length => c.bits(),
            (Representation::So4, BasisState::So4(c)) if c.length == self.length => c.codes(),
            _ => return None,
        };
        self.index_of_raw(raw)
    }

    pub fn index_of_raw(&self, raw: u32) -> Option<usize> {
        self.index.get(&raw).copied()
    }

    /// Reorders the basis: position `p` of the result holds old position `perm[p]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Basis, LadderError> {
        check_permutation(perm, self.dim())?;
        let states: Vec<u32> = perm.iter().map(|&p| self.states[p]).collect();
        let labels = perm.iter().map(|&p| self.labels[p]).collect();
        let index = states.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        Ok(Basis {
            representation: self.representation,
            length: self.length,
            states,
            labels,
            index,
        })
    }

    /// Keeps the first `n` states.
    pub fn truncated(&self, n: usize) -> Basis {
        let n = n.min(self.dim());
        let states = self.states[..n].to_vec();
        let labels = self.labels[..n].to_vec();
        let index = states.iter().enumerate().map(|(p, &s)| (s, p)).collect();
        Basis {
            representation: self.representation,
            length: self.length,
            states,
            labels,
            index,
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], dim: usize) -> Result<(), LadderError> {
    if perm.len() != dim {
        return Err(LadderError::DimensionMismatch {
            expected: dim,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; dim];
    for &p in perm {
        if p >= dim || seen[p] {
            return Err(LadderError::InvalidArgument(
                "ordering is not a permutation".into(),
            ));
        }
        seen[p] = true;
    }
    Ok(())
}

fn check_length(length: usize) -> Result<(), LadderError> {
    if length == 0 || length > MAX_LENGTH {
        return Err(LadderError::DimensionOverflow {
            length,
            max: MAX_LENGTH,
        });
    }
    Ok(())
}

/// Binomial coefficient, exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// All product states with `L` up spins, ascending.
pub fn enumerate_su2(length: usize) -> Result<Basis, LadderError> {
    check_length(length)?;
    let sites = 2 * length;
    let mut states = Vec::with_capacity(binomial(sites as u64, length as u64) as usize);
    // Gosper's hack: next integer with the same popcount.
    let mut v: u64 = (1u64 << length) - 1;
    let limit = 1u64 << sites;
    while v < limit {
        states.push(v as u32);
        let c = v & v.wrapping_neg();
        let r = v + c;
        v = (((r ^ v) >> 2) / c) | r;
    }
    Ok(Basis::from_states(Representation::Su2, length, states))
}

/// All rung configurations with `Σ M_i = 0`, lexicographic in `(S_i, M_i)`.
pub fn enumerate_so4(length: usize) -> Result<Basis, LadderError> {
    check_length(length)?;
    let mut states = Vec::with_capacity(binomial(2 * length as u64, length as u64) as usize);
    let mut prefix = Vec::with_capacity(length);
    extend_rungs(length, 0, &mut prefix, &mut states);
    Ok(Basis::from_states(Representation::So4, length, states))
}

fn extend_rungs(length: usize, proj: i32, prefix: &mut Vec<u32>, out: &mut Vec<u32>) {
    let remaining = (length - prefix.len()) as i32;
    if remaining == 0 {
        if proj == 0 {
            out.push(prefix.iter().fold(0u32, |acc, c| acc << 2 | c));
        }
        return;
    }
    for code in 0..4 {
        let m = RungState::from_code(code).proj as i32;
        // the remaining rungs can shift the total by at most one each
        if (proj + m).abs() > remaining - 1 {
            continue;
        }
        prefix.push(code);
        extend_rungs(length, proj + m, prefix, out);
        prefix.pop();
    }
}

/// Rung-local Clebsch-Gordan components, keyed by the two-bit SU(2) rung
/// value (bit 0 = leg 0 up, bit 1 = leg 1 up). Condon-Shortley phases.
pub(crate) fn rung_components(code: u32) -> &'static [(u32, f64)] {
    const UD: u32 = 0b01; // leg 0 up, leg 1 down
    const DU: u32 = 0b10;
    match code {
        0 => &[(UD, FRAC_1_SQRT_2), (DU, -FRAC_1_SQRT_2)],
        1 => &[(0b00, 1.0)],
        2 => &[(UD, FRAC_1_SQRT_2), (DU, FRAC_1_SQRT_2)],
        3 => &[(0b11, 1.0)],
        _ => unreachable!(),
    }
}

/// Inverse of [`rung_components`]: SO(4) rung codes overlapping a product rung.
pub(crate) fn rung_overlaps(pair: u32) -> &'static [(u32, f64)] {
    match pair {
        0b00 => &[(1, 1.0)],
        0b01 => &[(0, FRAC_1_SQRT_2), (2, FRAC_1_SQRT_2)],
        0b10 => &[(0, -FRAC_1_SQRT_2), (2, FRAC_1_SQRT_2)],
        0b11 => &[(3, 1.0)],
        _ => unreachable!(),
    }
}

/// Expands an SO(4) state into SU(2) product components `(bits, coefficient)`.
pub fn so4_components(config: RungConfig) -> Vec<(u32, f64)> {
    let mut out = vec![(0u32, 1.0)];
    for i in 0..config.length {
        let comps = rung_components(config.rung(i).code());
        let mut next = Vec::with_capacity(out.len() * comps.len());
        for &(bits, c) in &out {
            for &(pair, u) in comps {
                next.push((bits | pair << (2 * i), c * u));
            }
        }
        out = next;
    }
    out
}

/// Overlaps `⟨S M…|s⟩` of a product state with SO(4) states, as `(codes, value)`.
pub fn su2_overlaps(config: SpinConfig) -> Vec<(u32, f64)> {
    let length = config.length();
    let mut out = vec![(0u32, 1.0)];
    for i in 0..length {
        let pair = config.bits() >> (2 * i) & 3;
        let overlaps = rung_overlaps(pair);
        let shift = 2 * (length - 1 - i);
        let mut next = Vec::with_capacity(out.len() * overlaps.len());
        for &(codes, c) in &out {
            for &(code, u) in overlaps {
                next.push((codes | code << shift, c * u));
            }
        }
        out = next;
    }
    out
}

/// Orthogonal change of basis with `U[(p, q)] = ⟨su2_p | so4_q⟩`, so that
/// `H_so4 = Uᵀ H_su2 U`. Rows follow `enumerate_su2`, columns `enumerate_so4`.
pub fn su2_to_so4_matrix(length: usize) -> Result<nalgebra::DMatrix<f64>, LadderError> {
    let su2 = enumerate_su2(length)?;
    let so4 = enumerate_so4(length)?;
    let n = su2.dim();
    let mut u = nalgebra::DMatrix::zeros(n, n);
    for q in 0..n {
        for (bits, c) in so4_components(RungConfig::new(so4.raw(q), length)) {
            let p = su2
                .index_of_raw(bits)
                .expect("SO(4) state leaves the M_tot = 0 sector");
            u[(p, q)] = c;
        }
    }
    Ok(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrderingStrategy {
    /// Ascending diagonal energy `ε_i = ⟨Φ_i|H₀ + gH₁|Φ_i⟩`.
    #[default]
    DiagonalAscending,
    /// Descending ground-state amplitude magnitude `|a_1i|`.
    AmplitudeDescending,
}

/// Stable sort permutation for the requested strategy. `perm[p]` is the old
/// position now placed at `p`.
pub fn ordering_permutation(
    ham: &HamiltonianPair,
    g: f64,
    strategy: OrderingStrategy,
    amplitudes: Option<&[f64]>,
) -> Result<Vec<usize>, LadderError> {
    let dim = ham.dim();
    let mut perm: Vec<usize> = (0..dim).collect();
    match strategy {
        OrderingStrategy::DiagonalAscending => {
            let eps = ham.diagonal(g);
            perm.sort_by(|&a, &b| eps[a].total_cmp(&eps[b]));
        }
        OrderingStrategy::AmplitudeDescending => {
            let amps = amplitudes.ok_or(LadderError::MissingAmplitudes)?;
            if amps.len() != dim {
                return Err(LadderError::DimensionMismatch {
                    expected: dim,
                    found: amps.len(),
                });
            }
            perm.sort_by(|&a, &b| amps[b].abs().total_cmp(&amps[a].abs()));
        }
    }
    Ok(perm)
}

/// Orders `basis` by `strategy`. Returns the reordered basis together with
/// the permutation, which must also be applied to the Hamiltonian.
pub fn order_basis(
    basis: &Basis,
    ham: &HamiltonianPair,
    g: f64,
    strategy: OrderingStrategy,
    amplitudes: Option<&[f64]>,
) -> Result<(Basis, Vec<usize>), LadderError> {
    if basis.dim() != ham.dim() {
        return Err(LadderError::DimensionMismatch {
            expected: basis.dim(),
            found: ham.dim(),
        });
    }
    let perm = ordering_permutation(ham, g, strategy, amplitudes)?;
    Ok((basis.permuted(&perm)?, perm))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_small_cases() {
        let b = enumerate_su2(1).unwrap();
        assert_eq!(b.raw_states(), &[0b01, 0b10]);
        assert_eq!(enumerate_su2(2).unwrap().dim(), 6);
        assert_eq!(enumerate_su2(6).unwrap().dim(), 924);
    }

    #[test]
    fn su2_states_ascending_with_half_filling() {
        let b = enumerate_su2(4).unwrap();
        assert!(b.raw_states().windows(2).all(|w| w[0] < w[1]));
        for p in 0..b.dim() {
            match b.state(p) {
                BasisState::Su2(c) => assert_eq!(c.two_m_total(), 0),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn so4_small_cases() {
        let b = enumerate_so4(1).unwrap();
        let rungs: Vec<_> = (0..b.dim())
            .map(|p| RungConfig::new(b.raw(p), 1).rung(0))
            .collect();
        assert_eq!(rungs, vec![RungState::SINGLET, RungState::TRIPLET_ZERO]);

        let b = enumerate_so4(2).unwrap();
        let mut got: Vec<Vec<(u8, i8)>> = (0..b.dim())
            .map(|p| {
                RungConfig::new(b.raw(p), 2)
                    .rungs()
                    .iter()
                    .map(|r| (r.spin, r.proj))
                    .collect()
            })
            .collect();
        let mut expected = vec![
            vec![(0, 0), (0, 0)],
            vec![(0, 0), (1, 0)],
            vec![(1, 0), (0, 0)],
            vec![(1, 0), (1, 0)],
            vec![(1, 1), (1, -1)],
            vec![(1, -1), (1, 1)],
        ];
        // enumeration is lexicographic
        assert!(got.windows(2).all(|w| w[0] < w[1]));
        got.sort();
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn so4_count_matches_dynamic_programming() {
        // number of rung sequences by running total of M
        for length in 1..=8usize {
            let mut counts = vec![0u64; 2 * length + 1];
            counts[length] = 1;
            for _ in 0..length {
                let mut next = vec![0u64; counts.len()];
                for (m, &c) in counts.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    next[m] += 2 * c; // singlet and triplet zero
                    if m > 0 {
                        next[m - 1] += c;
                    }
                    if m + 1 < counts.len() {
                        next[m + 1] += c;
                    }
                }
                counts = next;
            }
            assert_eq!(counts[length], binomial(2 * length as u64, length as u64));
            assert_eq!(enumerate_so4(length).unwrap().dim() as u64, counts[length]);
        }
    }

    #[test]
    fn length_guard() {
        assert!(matches!(
            enumerate_su2(0),
            Err(LadderError::DimensionOverflow { .. })
        ));
        assert!(matches!(
            enumerate_so4(17),
            Err(LadderError::DimensionOverflow { .. })
        ));
    }

    #[test]
    fn lookup_is_identity() {
        for basis in [enumerate_su2(5).unwrap(), enumerate_so4(5).unwrap()] {
            for p in 0..basis.dim() {
                assert_eq!(basis.index_of(&basis.state(p)), Some(p));
            }
        }
        let su2 = enumerate_su2(2).unwrap();
        assert_eq!(
            su2.index_of(&BasisState::Su2(SpinConfig::new(0b1111, 2))),
            None
        );
        assert_eq!(su2.index_of(&BasisState::So4(RungConfig::new(0, 2))), None);
    }

    #[test]
    fn single_rung_transform() {
        let u = su2_to_so4_matrix(1).unwrap();
        let s = FRAC_1_SQRT_2;
        // rows ↑↓, ↓↑; columns singlet, triplet
        let expected = nalgebra::DMatrix::from_row_slice(2, 2, &[s, s, -s, s]);
        assert!((u - expected).abs().max() < 1e-15);
    }

    #[test]
    fn transform_is_orthogonal() {
        for length in 1..=5 {
            let u = su2_to_so4_matrix(length).unwrap();
            let n = u.nrows();
            let err = (u.transpose() * &u - nalgebra::DMatrix::identity(n, n))
                .abs()
                .max();
            assert!(err < 1e-12, "L={length}: {err}");
        }
    }

    #[test]
    fn overlaps_invert_components() {
        let length = 3;
        let so4 = enumerate_so4(length).unwrap();
        let u = su2_to_so4_matrix(length).unwrap();
        let su2 = enumerate_su2(length).unwrap();
        for p in 0..su2.dim() {
            for (codes, v) in su2_overlaps(SpinConfig::new(su2.raw(p), length)) {
                let q = so4.index_of_raw(codes).unwrap();
                assert_eq!(u[(p, q)], v);
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(4, 2), 6);
        assert_eq!(binomial(2, 1), 2);
        assert_eq!(binomial(32, 16), 601_080_390);
    }
}
