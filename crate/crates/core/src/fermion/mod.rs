//! Fermionic two-body tensors and their decompositions into solvable fragments.

mod lr;
mod mf;
mod optim;
pub mod rotation;
pub mod tensor;

pub use lr::{lr_decompose, LrFragment};
pub use mf::{
    default_split, gfro_decompose, gmf_decompose, gmf_decompose_split, gmf_fragment_tensor,
    gmf_spectrum, random_gmf_fragment, solve_gmf_sector, GfroFragment, GmfFragment,
    GmfSectorSolution, MfDecomposition, MfModel, MfOptions,
};
pub use rotation::{diagonalize_one_body, OrbitalRotation};
pub use tensor::TwoBodyTensor;

/// Fragment count in the convention of the method comparison tables: the
/// two-body fragments plus one for a nonzero one-body part.
pub fn table_count(two_body_fragments: usize, t: &TwoBodyTensor) -> usize {
    two_body_fragments + usize::from(t.h().iter().any(|&v| v != 0.0))
}
