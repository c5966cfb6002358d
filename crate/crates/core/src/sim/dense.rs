use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermion::TwoBodyTensor;
use crate::pauli::{PauliSum, PauliWord};

const HERMITIAN_TOL: f64 = 1e-12;

/// Size caps for dense builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct DenseLimits {
    pub max_qubits: usize,
    pub max_spin_orbitals: usize,
}

impl Default for DenseLimits {
    fn default() -> Self {
        DenseLimits {
            max_qubits: 12,
            max_spin_orbitals: 10,
        }
    }
}

/// A `2^n × 2^n` complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<Complex64>) -> Result<DenseOperator> {
        let dim = 1usize << n_qubits;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::SizeMismatch(matrix.nrows(), dim));
        }
        Ok(DenseOperator { n_qubits, matrix })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn hermiticity_error(&self) -> f64 {
        let m = &self.matrix;
        (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn expectation(&self, state: &[Complex64]) -> f64 {
        let v = nalgebra::DVector::from_column_slice(state);
        (v.adjoint() * &self.matrix * &v)[(0, 0)].re
    }

    /// Lowest eigenvalue and a normalized eigenvector.
    pub fn ground_state(&self) -> (f64, Vec<Complex64>) {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let (i, &e) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .expect("non-empty matrix");
        (e, eig.eigenvectors.column(i).iter().copied().collect())
    }

    fn checked(self) -> Result<DenseOperator> {
        let err = self.hermiticity_error();
        let scale = self.matrix.iter().map(|z| z.norm()).fold(1.0, f64::max);
        if err > HERMITIAN_TOL * scale {
            return Err(Error::InvariantViolation(format!(
                "dense operator not Hermitian (deviation {err:e})"
            )));
        }
        Ok(self)
    }
}

pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

fn check_qubits(n: usize, limits: &DenseLimits) -> Result<()> {
    if n > limits.max_qubits {
        return Err(Error::DenseLimitExceeded {
            size: n,
            limit: limits.max_qubits,
        });
    }
    Ok(())
}

pub fn word_to_dense(w: &PauliWord, limits: &DenseLimits) -> Result<DenseOperator> {
    check_qubits(w.n_qubits(), limits)?;
    let dim = 1usize << w.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let (row, ph) = w.matrix_entry_for_column(col as u64);
        m[(row as usize, col)] = ph;
    }
    Ok(DenseOperator {
        n_qubits: w.n_qubits(),
        matrix: m,
    })
}

pub fn pauli_to_dense(h: &PauliSum, limits: &DenseLimits) -> Result<DenseOperator> {
    check_qubits(h.n_qubits(), limits)?;
    let dim = 1usize << h.n_qubits();
    let mut m = DMatrix::zeros(dim, dim);
    for (w, c) in h.iter() {
        for col in 0..dim {
            let (row, ph) = w.matrix_entry_for_column(col as u64);
            m[(row as usize, col)] += ph * c;
        }
    }
    DenseOperator {
        n_qubits: h.n_qubits(),
        matrix: m,
    }
    .checked()
}

/// `a†_p a_q |b⟩` under Jordan–Wigner ordering (mode `p` is bit `p`).
fn hop(b: u64, p: usize, q: usize) -> Option<(u64, f64)> {
    if b >> q & 1 == 0 {
        return None;
    }
    let below = |x: u64, k: usize| (x & ((1u64 << k) - 1)).count_ones();
    let b1 = b ^ (1 << q);
    if b1 >> p & 1 == 1 {
        return None;
    }
    let parity = below(b, q) + below(b1, p);
    let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
    Some((b1 | 1 << p, sign))
}

/// `constant + Σ h_pq a†_p a_q + Σ g_pqrs a†_p a_q a†_r a_s`.
pub fn fermion_to_dense(
    t: &TwoBodyTensor,
    constant: f64,
    limits: &DenseLimits,
) -> Result<DenseOperator> {
    let n = t.n();
    if n > limits.max_spin_orbitals {
        return Err(Error::DenseLimitExceeded {
            size: n,
            limit: limits.max_spin_orbitals,
        });
    }
    let dim = 1usize << n;
    let h = t.h();
    let g = t.supermatrix();
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for col in 0..dim as u64 {
        m[(col as usize, col as usize)] += constant;
        for r in 0..n {
            for s in 0..n {
                let Some((b1, s1)) = hop(col, r, s) else {
                    continue;
                };
                let hv = h[(r, s)];
                if hv != 0.0 {
                    m[(b1 as usize, col as usize)] += hv * s1;
                }
                for p in 0..n {
                    for q in 0..n {
                        let gv = g[(p * n + q, r * n + s)];
                        if gv == 0.0 {
                            continue;
                        }
                        if let Some((b2, s2)) = hop(b1, p, q) {
                            m[(b2 as usize, col as usize)] += gv * s1 * s2;
                        }
                    }
                }
            }
        }
    }
    DenseOperator {
        n_qubits: n,
        matrix: m.map(|x| Complex64::new(x, 0.0)),
    }
    .checked()
}
