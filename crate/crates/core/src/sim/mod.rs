//! Dense brute-force oracles, block-exponential identity checks and
//! statevector simulation of conditioned measurement circuits.

mod block_exp;
mod check;
mod circuit;
mod dense;
mod measure;

pub use block_exp::{check_block_identity, check_product_form, matrix_exp, random_construction};
pub use check::{check_nc_fragment, FragmentCheck};
pub use circuit::{
    apply_clifford, apply_diagonalizer, apply_gate, apply_pauli_rotation, apply_word,
    clifford_unitary, diagonalizer_unitary, off_diagonal_norm,
};
pub use dense::{
    fermion_to_dense, hermitian_eigenvalues, pauli_to_dense, word_to_dense, DenseLimits,
    DenseOperator,
};
pub use measure::{dynamic_measure, MeasureMode, MeasureOutcome, MeasurementRecord, StateVector};
