//! Analytic solution of non-contextual Pauli fragments.
//!
//! A non-contextual fragment factors as `Σ_i p_i(C) A_i + p_0(C)` where the
//! `C_k` generate an abelian symmetry group and the representatives `A_i`
//! mutually anticommute. A Clifford maps each `C_k` to `Z_k`; in every
//! eigen-sector `v` of the symmetries the remaining anticommuting sum is
//! rotated onto a single Pauli word with norm `a(v)`.

mod clifford;
mod exponent;
mod group;
mod sector;
mod structure;

pub use clifford::{build_tapering_clifford, reduce_to_single_z, CliffordTableau, Gate};
pub use exponent::{Exponent, Poly};
pub use group::{group_reduce, GroupReduction};
pub use sector::{
    conditioned_diagonalizer, evaluate_sector, fragment_spectrum, fragment_spectrum_forced,
    ground_energy, rotate_coefficients, sector_vectors, ConditionedDiagonalizer, SectorRotation, SectorSolution,
    Spectrum, SECTOR_LIMIT,
};
pub use structure::{factor_noncontextual, NonContextualStructure};
