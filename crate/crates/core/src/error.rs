use thiserror::Error;

use crate::measurement::{Family, Party};
use crate::spin::StateVector;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |m - m^dagger| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("eigen-solver supports dimension <= {max}, got {dim}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("singlet nullspace has dimension {found}, expected 2")]
    DegenerateBasis { found: usize },

    #[error("setting for party {found:?} supplied where party {expected:?} was expected")]
    PartyMismatch { expected: Party, found: Party },

    #[error("outcome belongs to the {found:?} family, classifier expects {expected:?}")]
    WrongFamily { expected: Family, found: Family },

    #[error("classifier {classifier:?} applied to a table measured with the {setting:?} setting")]
    ClassifierSettingMismatch { classifier: Family, setting: Family },

    #[error("conditioning event has probability {0:e}")]
    ConditionHasZeroProbability(f64),

    #[error("constraint nullspace is empty (smallest eigenvalue {smallest:e}, threshold {threshold:e})")]
    NoSolution { smallest: f64, threshold: f64 },

    #[error("constraint nullspace has dimension {}", .0.len())]
    AmbiguousSolution(Vec<StateVector>),

    #[error("no conditioning events observed for {0}")]
    InsufficientConditioningEvents(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
