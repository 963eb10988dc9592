//! Dense Hermitian/unitary linear algebra.
//!
//! Exponentials and logarithms go exclusively through eigendecompositions:
//! `eigh` for Hermitian generators, a complex Schur factorization (diagonal up
//! to roundoff for normal matrices) for unitaries.

use std::f64::consts::PI;

use nalgebra::linalg::{Schur, SymmetricEigen};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;

use crate::basis::{Basis, Sector};
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const UNITARY_TOLERANCE: f64 = 1e-10;
/// Eigenphases this close to ±π are flagged as sitting on the branch cut.
pub const BRANCH_CUT_TOLERANCE: f64 = 1e-12;

#[inline]
pub(crate) fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `max |M - M†|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `max |U†U - I|`.
pub fn unitary_deviation(u: &CMatrix) -> f64 {
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - CMatrix::identity(n, n)))
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5)
}

/// `tr(A† B)` without forming the product.
pub fn overlap_trace(a: &CMatrix, b: &CMatrix) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Spectrum and eigenvectors of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl EigenSystem {
    /// `V f(Λ) V†` for a scalar function of the eigenvalues.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let scaled = scale_columns(&self.vectors, self.values.iter().map(|&l| f(l)));
        scaled * self.vectors.adjoint()
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(c)
    }
}

fn scale_columns(m: &CMatrix, factors: impl Iterator<Item = Complex64>) -> CMatrix {
    let mut out = m.clone();
    for (j, f) in factors.enumerate() {
        for z in out.column_mut(j).iter_mut() {
            *z *= f;
        }
    }
    out
}

/// Hermitian eigendecomposition with ascending eigenvalues.
pub fn eigh(h: &CMatrix) -> Result<EigenSystem> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: h.ncols(),
            context: "eigh expects a square matrix",
        });
    }
    if n == 0 {
        return Ok(EigenSystem {
            values: Vec::new(),
            vectors: CMatrix::zeros(0, 0),
        });
    }
    let max_iter = 1000 + 100 * n;
    let eig = SymmetricEigen::try_new(hermitian_part(h), f64::EPSILON, max_iter).ok_or(
        Error::NoConvergence {
            routine: "Hermitian eigensolver",
            iterations: max_iter,
            dim: n,
        },
    )?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    Ok(EigenSystem { values, vectors })
}

/// A matrix checked to be unitary within [`UNITARY_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: CMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
                context: "unitary must be square",
            });
        }
        let deviation = unitary_deviation(&matrix);
        if deviation > UNITARY_TOLERANCE {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    /// For products of already-unitary factors.
    pub(crate) fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: CMatrix::identity(dim, dim),
        }
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

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    /// `self · other`.
    pub fn compose(&self, other: &UnitaryOperator) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn deviation(&self) -> f64 {
        unitary_deviation(&self.matrix)
    }

    pub fn apply(&self, psi: &CVector) -> CVector {
        &self.matrix * psi
    }
}

/// `exp(-i H t)` through the eigendecomposition of `H`.
pub fn expm_i(h: &CMatrix, t: f64) -> Result<UnitaryOperator> {
    let eig = eigh(h)?;
    Ok(UnitaryOperator::new_unchecked(
        eig.apply(|l| Complex64::from_polar(1.0, -l * t)),
    ))
}

/// Principal effective Hamiltonian of a unitary.
#[derive(Debug, Clone)]
pub struct UnitaryLog {
    /// `H` with `exp(-i H T) = F` and spectrum in `(-π/T, π/T]`.
    pub hamiltonian: CMatrix,
    /// Ascending quasienergies.
    pub quasienergies: Vec<f64>,
    /// Floquet states, column `k` belongs to `quasienergies[k]`.
    pub states: CMatrix,
    /// Some eigenphase lies within [`BRANCH_CUT_TOLERANCE`] of ±π.
    pub near_branch_cut: bool,
}

/// Eigenphases and eigenvectors of a unitary, phases as returned by `arg`.
pub fn unitary_eigen(f: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = f.nrows();
    let max_iter = 1000 + 100 * n;
    let schur = Schur::try_new(f.clone(), f64::EPSILON, max_iter).ok_or(Error::NoConvergence {
        routine: "complex Schur",
        iterations: max_iter,
        dim: n,
    })?;
    let (q, t) = schur.unpack();
    let eigenvalues = (0..n).map(|i| t[(i, i)]).collect();
    Ok((eigenvalues, q))
}

/// `H_eff = (i/T) log F` on the principal branch, quasienergies in `(-π/T, π/T]`.
pub fn logm_unitary(f: &UnitaryOperator, period: f64) -> Result<UnitaryLog> {
    if period <= 0.0 || !period.is_finite() {
        return Err(Error::InvalidParameter(format!("period must be positive, got {period}")));
    }
    let n = f.dim();
    let (eigenvalues, q) = unitary_eigen(f.matrix())?;
    let mut near_branch_cut = false;
    let mut quasi: Vec<(f64, usize)> = eigenvalues
        .iter()
        .enumerate()
        .map(|(i, z)| {
            let phase = z.arg();
            if PI - phase.abs() < BRANCH_CUT_TOLERANCE {
                near_branch_cut = true;
            }
            (wrap_quasienergy(-phase / period, period), i)
        })
        .collect();
    quasi.sort_by(|a, b| a.0.total_cmp(&b.0));
    let quasienergies: Vec<f64> = quasi.iter().map(|q| q.0).collect();
    let states = CMatrix::from_fn(n, n, |r, col| q[(r, quasi[col].1)]);
    let hamiltonian = hermitian_part(
        &(scale_columns(&states, quasienergies.iter().map(|&e| c(e))) * states.adjoint()),
    );
    Ok(UnitaryLog {
        hamiltonian,
        quasienergies,
        states,
        near_branch_cut,
    })
}

/// Fold an energy into the zone `(-π/T, π/T]`.
pub fn wrap_quasienergy(energy: f64, period: f64) -> f64 {
    let zone = 2.0 * PI / period;
    let half = PI / period;
    let mut e = energy - zone * (energy / zone).round();
    if e <= -half {
        e += zone;
    }
    if e > half {
        e -= zone;
    }
    e
}

/// `|tr(F_target† F_trial)| / D`.
pub fn fidelity_abs(target: &UnitaryOperator, trial: &UnitaryOperator) -> f64 {
    overlap_trace(target.matrix(), trial.matrix()).norm() / target.dim() as f64
}

/// `Re tr(F_target† F_trial) / D`.
pub fn fidelity_real(target: &UnitaryOperator, trial: &UnitaryOperator) -> f64 {
    overlap_trace(target.matrix(), trial.matrix()).re / target.dim() as f64
}

/// M-th exterior power of a single-particle matrix on the hardcore `(L, M)` basis.
///
/// Element `(S', S)` is the minor of `u1` with rows at the sites occupied in
/// `S'` and columns at the sites occupied in `S`; for a single-particle
/// propagator this is the exact M-fermion propagator.
pub fn compound_matrix(u1: &CMatrix, excitations: usize) -> Result<CMatrix> {
    let sites = u1.nrows();
    if u1.ncols() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: u1.ncols(),
            context: "single-particle matrix must be square",
        });
    }
    let basis = Basis::new(Sector::hardcore(sites, excitations)?);
    let occupied: Vec<Vec<usize>> = basis.iter().map(|s| s.occupied_sites()).collect();
    let d = basis.len();
    let m = excitations;
    let mut out = CMatrix::zeros(d, d);
    if m == 0 {
        out[(0, 0)] = c(1.0);
        return Ok(out);
    }
    let mut minor = CMatrix::zeros(m, m);
    for (r, rows) in occupied.iter().enumerate() {
        for (col, cols) in occupied.iter().enumerate() {
            for (a, &i) in rows.iter().enumerate() {
                for (b, &j) in cols.iter().enumerate() {
                    minor[(a, b)] = u1[(i, j)];
                }
            }
            out[(r, col)] = minor.clone().determinant();
        }
    }
    Ok(out)
}

/// Uniformly distributed entries in `[-1, 1]` symmetrized to a Hermitian matrix.
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let a = CMatrix::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0))
    });
    hermitian_part(&a)
}

/// `exp(-i H)` for a random Hermitian `H` scaled to spread phases over the circle.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let h = random_hermitian(dim, rng);
    expm_i(&h, 3.0).expect("eigh of a random Hermitian matrix").into_matrix()
}
