use thiserror::Error;

use crate::floquet::AdiabaticTrajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sector: {excitations} hardcore excitations do not fit on {sites} sites")]
    EmptySector { sites: usize, excitations: usize },

    #[error("sector dimension {dim} exceeds the dense limit {limit}")]
    SectorTooLarge { dim: u128, limit: usize },

    #[error("occupation state {0:?} is not part of the sector")]
    NotInSector(Vec<u32>),

    #[error("dimension mismatch: expected {expected}, found {found} ({context})")]
    DimensionMismatch {
        expected: usize,
        found: usize,
        context: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bosonic statistics require a finite interaction strength")]
    InfiniteInteraction,

    #[error("bad Pauli label {label:?} at position {position}")]
    BadPauliLabel { label: char, position: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not unitary (max deviation {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("{routine} did not converge after {iterations} iterations (dim {dim})")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
        dim: usize,
    },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("ambiguous readout: correlators {correlators:?}, x-basis decoding {amplitude_bits:?}")]
    AmbiguousReadout {
        correlators: Vec<f64>,
        amplitude_bits: Option<Vec<u8>>,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("cycle {cycle}: optimized fidelity {fidelity} is below the floor {floor}")]
    BelowFidelityFloor {
        cycle: usize,
        fidelity: f64,
        floor: f64,
        partial: Box<AdiabaticTrajectory>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that originate in the numerics rather than in the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::NotUnitary { .. }
                | Error::AmbiguousReadout { .. }
                | Error::BelowFidelityFloor { .. }
        )
    }
}
