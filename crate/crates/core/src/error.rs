use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown Pauli token `{0}` (expected X, Y, Z or I followed by a qubit index)")]
    UnknownAxis(String),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },
    #[error("qubit index {0} appears more than once")]
    DuplicateIndex(usize),
    #[error("size mismatch: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("coefficient of `{word}` has imaginary part {imag:e}")]
    ComplexCoefficient { word: String, imag: f64 },
    #[error("duplicate Pauli word `{0}`")]
    DuplicateWord(String),
    #[error("empty input")]
    EmptyInput,
    #[error("Hamiltonian has no terms to partition")]
    EmptyHamiltonian,
    #[error("fragment is contextual")]
    ContextualInput,
    #[error("group element acquired a non-real phase: {0}")]
    PhaseInconsistency(String),
    #[error("input words do not pairwise commute: `{0}` and `{1}`")]
    NonCommutingInput(String, String),
    #[error("sector vector has length {got}, expected {expected}")]
    BadSectorLength { expected: usize, got: usize },
    #[error("{k} symmetry generators exceed the sector enumeration limit of {limit}")]
    SectorLimit { k: usize, limit: usize },
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NonSymmetricInput(f64),
    #[error("two-body supermatrix is not symmetric (max asymmetry {0:e})")]
    AsymmetricSupermatrix(f64),
    #[error("invalid K = {k} for {n} spin orbitals")]
    BadK { k: usize, n: usize },
    #[error("dense build of {size} exceeds the configured limit of {limit}")]
    DenseLimitExceeded { size: usize, limit: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("bad coefficient array lengths: {0}")]
    BadLengths(String),
    #[error("internal assertion failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
