use serde::Serialize;

use crate::error::Result;
use crate::nc::{conditioned_diagonalizer, factor_noncontextual, fragment_spectrum, ground_energy};
use crate::pauli::PauliSum;

use super::circuit::off_diagonal_norm;
use super::dense::{pauli_to_dense, DenseLimits};

const SPECTRUM_TOL: f64 = 1e-10;
const OFF_DIAGONAL_TOL: f64 = 1e-10;

/// Analytic-versus-dense comparison for one non-contextual fragment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FragmentCheck {
    pub n_qubits: usize,
    pub terms: usize,
    pub k: usize,
    pub l: usize,
    pub ground_analytic: f64,
    pub ground_dense: f64,
    pub spectrum_max_error: f64,
    pub off_diagonal_norm: f64,
    pub passed: bool,
}

pub fn check_nc_fragment(frag: &PauliSum, limits: &DenseLimits) -> Result<FragmentCheck> {
    let s = factor_noncontextual(frag)?;
    let analytic = fragment_spectrum(&s)?.expanded();
    let dense = pauli_to_dense(frag, limits)?.eigenvalues();
    let spectrum_max_error = if analytic.len() == dense.len() {
        analytic
            .iter()
            .zip(&dense)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    let d = conditioned_diagonalizer(&s)?;
    let off = off_diagonal_norm(frag, &d, limits)?;
    Ok(FragmentCheck {
        n_qubits: frag.n_qubits(),
        terms: frag.len(),
        k: s.k(),
        l: s.l(),
        ground_analytic: ground_energy(&s)?,
        ground_dense: dense[0],
        spectrum_max_error,
        off_diagonal_norm: off,
        passed: spectrum_max_error < SPECTRUM_TOL && off < OFF_DIAGONAL_TOL,
    })
}
