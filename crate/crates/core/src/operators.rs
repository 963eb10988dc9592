//! Dense Hamiltonians in occupation and qubit bases.
//!
//! Energies are in units of the chain coupling `J` with `ħ = 1`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{Basis, Occupation, Sector, Statistics, MAX_DIM};
use crate::error::{Error, Result};
use crate::numerics::{self, c, CMatrix, EigenSystem, UnitaryOperator};

/// Relative Hermiticity tolerance of [`HermitianOperator`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// The Hilbert space an operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Space {
    Sector(Sector),
    Qubits { count: usize },
    Dense { dim: usize },
}

impl Space {
    pub fn dim(&self) -> usize {
        match self {
            Space::Sector(s) => s.dim(),
            Space::Qubits { count } => 1 << count,
            Space::Dense { dim } => *dim,
        }
    }

    pub fn sector(&self) -> Option<&Sector> {
        match self {
            Space::Sector(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Sector(s) => write!(f, "{s}"),
            Space::Qubits { count } => write!(f, "{count} qubits"),
            Space::Dense { dim } => write!(f, "dim {dim}"),
        }
    }
}

/// Dense Hermitian matrix tagged with its space.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    space: Space,
    matrix: CMatrix,
}

impl HermitianOperator {
    pub fn new(space: Space, matrix: CMatrix) -> Result<Self> {
        let dim = space.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows().max(matrix.ncols()),
                context: "operator shape does not match its space",
            });
        }
        let deviation = numerics::hermitian_deviation(&matrix);
        if deviation > HERMITIAN_TOLERANCE * numerics::max_abs(&matrix).max(f64::MIN_POSITIVE) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { space, matrix })
    }

    /// Construction from a matrix Hermitian by construction; symmetrizes away roundoff.
    pub(crate) fn from_parts(space: Space, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), space.dim());
        Self {
            space,
            matrix: numerics::hermitian_part(&matrix),
        }
    }

    pub fn from_real(space: Space, matrix: &DMatrix<f64>) -> Result<Self> {
        Self::new(space, matrix.map(c))
    }

    pub fn zeros(space: Space) -> Self {
        let d = space.dim();
        Self {
            space,
            matrix: CMatrix::zeros(d, d),
        }
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Relabel onto another space of equal dimension.
    pub fn with_space(self, space: Space) -> Result<Self> {
        if space.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: space.dim(),
                context: "relabelled space",
            });
        }
        Ok(Self { space, ..self })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * c(factor),
        }
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: f64, other: &HermitianOperator, b: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
                context: "operator sum",
            });
        }
        Ok(Self {
            space: self.space,
            matrix: &self.matrix * c(a) + &other.matrix * c(b),
        })
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Remove the trace part, `H - tr(H)/D`.
    pub fn traceless(&self) -> Self {
        let shift = self.trace() / self.dim() as f64;
        let mut m = self.matrix.clone();
        for i in 0..self.dim() {
            m[(i, i)] -= c(shift);
        }
        Self {
            space: self.space,
            matrix: m,
        }
    }

    pub fn eigh(&self) -> Result<EigenSystem> {
        numerics::eigh(&self.matrix)
    }

    /// `exp(-i H t)`.
    pub fn propagator(&self, t: f64) -> Result<UnitaryOperator> {
        numerics::expm_i(&self.matrix, t)
    }

    /// `⟨ψ|H|ψ⟩` for a normalized state.
    pub fn expectation(&self, psi: &numerics::CVector) -> f64 {
        psi.dotc(&(&self.matrix * psi)).re
    }
}

/// How `g σ^z / 2` is represented in the hardcore occupation basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OnsiteConvention {
    /// `g n`, additive constants dropped.
    #[default]
    NumberOperator,
    /// `g (n - 1/2)`, the literal Pauli-z form including its constant.
    PauliZ,
}

impl OnsiteConvention {
    fn offset(self, statistics: Statistics) -> f64 {
        match (self, statistics) {
            (OnsiteConvention::PauliZ, Statistics::Hardcore) => -0.5,
            _ => 0.0,
        }
    }
}

/// Instantaneous chain parameters for one time step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDriveFrame {
    /// Onsite energies `g_l`, length L.
    pub onsite: Vec<f64>,
    /// Nearest-neighbour couplings `J_l`, length L-1.
    pub hopping: Vec<f64>,
    /// Anharmonicity `U`; infinite for hardcore bosons.
    pub interaction: f64,
    #[serde(default)]
    pub convention: OnsiteConvention,
}

impl ChainDriveFrame {
    pub fn uniform(sites: usize, onsite: f64, hopping: f64, interaction: f64) -> Self {
        Self {
            onsite: vec![onsite; sites],
            hopping: vec![hopping; sites.saturating_sub(1)],
            interaction,
            convention: OnsiteConvention::default(),
        }
    }
}

/// Effective onsite energies `G_l` and symmetric couplings `K_lm`.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingGraph {
    onsite: Vec<f64>,
    couplings: DMatrix<f64>,
}

impl CouplingGraph {
    pub fn new(onsite: Vec<f64>, couplings: DMatrix<f64>) -> Result<Self> {
        let l = onsite.len();
        if couplings.nrows() != l || couplings.ncols() != l {
            return Err(Error::DimensionMismatch {
                expected: l,
                found: couplings.nrows(),
                context: "coupling matrix size",
            });
        }
        for i in 0..l {
            if couplings[(i, i)] != 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "coupling matrix has nonzero diagonal at site {}",
                    i + 1
                )));
            }
            for j in 0..i {
                if couplings[(i, j)] != couplings[(j, i)] {
                    return Err(Error::InvalidParameter(format!(
                        "coupling matrix is not symmetric at ({}, {})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { onsite, couplings })
    }

    pub fn sites(&self) -> usize {
        self.onsite.len()
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn couplings(&self) -> &DMatrix<f64> {
        &self.couplings
    }

    pub fn coupling(&self, l: usize, m: usize) -> f64 {
        self.couplings[(l, m)]
    }

    /// `diag(G) + K`, the single-particle matrix.
    pub fn single_particle(&self) -> DMatrix<f64> {
        let mut m = self.couplings.clone();
        for (i, g) in self.onsite.iter().enumerate() {
            m[(i, i)] = *g;
        }
        m
    }

    /// Only nearest-neighbour couplings are nonzero.
    pub fn is_chain(&self) -> bool {
        let l = self.sites();
        (0..l).all(|i| (0..l).all(|j| i.abs_diff(j) <= 1 || self.couplings[(i, j)] == 0.0))
    }
}

fn check_sites(sector: &Sector, found: usize, context: &'static str) -> Result<()> {
    if sector.sites() != found {
        return Err(Error::DimensionMismatch {
            expected: sector.sites(),
            found,
            context,
        });
    }
    Ok(())
}

fn diagonal_energy(state: &Occupation, onsite: &[f64], interaction: f64, offset: f64) -> f64 {
    state
        .0
        .iter()
        .zip(onsite)
        .map(|(&n, &g)| {
            let n = n as f64;
            let pair = if n > 1.0 { 0.5 * interaction * n * (n - 1.0) } else { 0.0 };
            g * (n + offset) + pair
        })
        .sum()
}

/// Adds `amp · a†_to a_from` for every basis state; `sign` sees the source state.
fn add_hops(
    basis: &Basis,
    matrix: &mut CMatrix,
    from: usize,
    to: usize,
    amp: f64,
    sign: impl Fn(&Occupation) -> f64,
) {
    if amp == 0.0 {
        return;
    }
    for (col, state) in basis.iter().enumerate() {
        let n_from = state.0[from];
        if n_from == 0 {
            continue;
        }
        let mut next = state.clone();
        next.0[from] -= 1;
        next.0[to] += 1;
        if let Some(row) = basis.find(&next) {
            let bosonic = ((n_from as f64) * (next.0[to] as f64)).sqrt();
            matrix[(row, col)] += c(amp * bosonic * sign(state));
        }
    }
}

/// Instantaneous chain Hamiltonian for one drive frame.
pub fn build_chain(sector: &Sector, frame: &ChainDriveFrame) -> Result<HermitianOperator> {
    check_sites(sector, frame.onsite.len(), "onsite energies")?;
    check_sites(sector, frame.hopping.len() + 1, "chain couplings")?;
    if sector.statistics() == Statistics::Bosonic && !frame.interaction.is_finite() {
        return Err(Error::InfiniteInteraction);
    }
    let basis = Basis::new(*sector);
    let offset = frame.convention.offset(sector.statistics());
    let d = basis.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, s) in basis.iter().enumerate() {
        m[(i, i)] = c(diagonal_energy(s, &frame.onsite, frame.interaction, offset));
    }
    for (l, &j) in frame.hopping.iter().enumerate() {
        add_hops(&basis, &mut m, l + 1, l, j, |_| 1.0);
        add_hops(&basis, &mut m, l, l + 1, j, |_| 1.0);
    }
    Ok(HermitianOperator::from_parts(Space::Sector(*sector), m))
}

/// Bose-Hubbard target with arbitrary connectivity.
pub fn build_target_boson(
    sector: &Sector,
    graph: &CouplingGraph,
    interaction: f64,
) -> Result<HermitianOperator> {
    check_sites(sector, graph.sites(), "coupling graph")?;
    if sector.statistics() == Statistics::Bosonic && !interaction.is_finite() {
        return Err(Error::InfiniteInteraction);
    }
    let basis = Basis::new(*sector);
    let d = basis.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, s) in basis.iter().enumerate() {
        m[(i, i)] = c(diagonal_energy(s, graph.onsite(), interaction, 0.0));
    }
    let l = graph.sites();
    for a in 0..l {
        for b in 0..l {
            if a != b {
                add_hops(&basis, &mut m, b, a, graph.coupling(a, b), |_| 1.0);
            }
        }
    }
    Ok(HermitianOperator::from_parts(Space::Sector(*sector), m))
}

/// Free-fermion target in the hardcore basis with Jordan-Wigner string signs.
pub fn build_target_spin_jw(
    sites: usize,
    graph: &CouplingGraph,
    excitations: usize,
) -> Result<HermitianOperator> {
    build_target_spin_jw_with(sites, graph, excitations, OnsiteConvention::NumberOperator)
}

pub fn build_target_spin_jw_with(
    sites: usize,
    graph: &CouplingGraph,
    excitations: usize,
    convention: OnsiteConvention,
) -> Result<HermitianOperator> {
    let sector = Sector::hardcore(sites, excitations)?;
    check_sites(&sector, graph.sites(), "coupling graph")?;
    let basis = Basis::new(sector);
    let offset = convention.offset(Statistics::Hardcore);
    let d = basis.len();
    let mut m = CMatrix::zeros(d, d);
    for (i, s) in basis.iter().enumerate() {
        m[(i, i)] = c(diagonal_energy(s, graph.onsite(), f64::INFINITY, offset));
    }
    for a in 0..sites {
        for b in 0..sites {
            if a == b {
                continue;
            }
            let (lo, hi) = (a.min(b), a.max(b));
            add_hops(&basis, &mut m, b, a, graph.coupling(a, b), |s| {
                let between: u32 = s.0[lo + 1..hi].iter().sum();
                if between % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            });
        }
    }
    Ok(HermitianOperator::from_parts(Space::Sector(sector), m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(ch: char) -> Option<Self> {
        match ch {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Real-weighted sum of Pauli strings. Label position 0 is the most
/// significant bit of the basis index.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PauliTermList {
    pub terms: Vec<(f64, String)>,
}

impl PauliTermList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, coefficient: f64, labels: impl Into<String>) {
        self.terms.push((coefficient, labels.into()));
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl FromIterator<(f64, String)> for PauliTermList {
    fn from_iter<T: IntoIterator<Item = (f64, String)>>(iter: T) -> Self {
        Self {
            terms: iter.into_iter().collect(),
        }
    }
}

fn parse_labels(labels: &str, qubits: usize) -> Result<Vec<Pauli>> {
    let parsed = labels
        .chars()
        .enumerate()
        .map(|(i, ch)| {
            Pauli::from_char(ch).ok_or(Error::BadPauliLabel {
                label: ch,
                position: i + 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if parsed.len() != qubits {
        return Err(Error::DimensionMismatch {
            expected: qubits,
            found: parsed.len(),
            context: "Pauli label length",
        });
    }
    Ok(parsed)
}

/// `Σ_k c_k ⊗_i P_{k,i}` as a dense `2^n × 2^n` matrix.
pub fn pauli_to_matrix(terms: &PauliTermList, qubits: usize) -> Result<HermitianOperator> {
    if qubits > 16 || (1usize << qubits) > MAX_DIM {
        return Err(Error::SectorTooLarge {
            dim: 1u128 << qubits.min(127),
            limit: MAX_DIM,
        });
    }
    let d = 1usize << qubits;
    let mut m = CMatrix::zeros(d, d);
    for (coeff, labels) in &terms.terms {
        let ops = parse_labels(labels, qubits)?;
        let mut flip = 0usize;
        for (pos, op) in ops.iter().enumerate() {
            if matches!(op, Pauli::X | Pauli::Y) {
                flip |= 1 << (qubits - 1 - pos);
            }
        }
        for col in 0..d {
            let mut amp = Complex64::new(*coeff, 0.0);
            for (pos, op) in ops.iter().enumerate() {
                let bit = (col >> (qubits - 1 - pos)) & 1;
                match (op, bit) {
                    (Pauli::Z, 1) => amp = -amp,
                    (Pauli::Y, 0) => amp *= Complex64::i(),
                    (Pauli::Y, 1) => amp *= -Complex64::i(),
                    _ => {}
                }
            }
            m[(col ^ flip, col)] += amp;
        }
    }
    Ok(HermitianOperator::from_parts(Space::Qubits { count: qubits }, m))
}
