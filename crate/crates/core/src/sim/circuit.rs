use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nc::{sector_vectors, CliffordTableau, ConditionedDiagonalizer, Gate, SectorRotation};
use crate::pauli::{PauliSum, PauliWord};

use super::dense::{pauli_to_dense, DenseLimits};

const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn apply_gate(state: &mut [Complex64], gate: &Gate) {
    let dim = state.len();
    match *gate {
        Gate::H(a) => {
            let m = 1 << a;
            for i in (0..dim).filter(|i| i & m == 0) {
                let (u, w) = (state[i], state[i | m]);
                state[i] = (u + w) * FRAC_1_SQRT_2;
                state[i | m] = (u - w) * FRAC_1_SQRT_2;
            }
        }
        Gate::S(a) | Gate::Sdg(a) | Gate::Z(a) => {
            let f = match gate {
                Gate::S(_) => I,
                Gate::Sdg(_) => -I,
                _ => Complex64::new(-1.0, 0.0),
            };
            let m = 1 << a;
            for i in (0..dim).filter(|i| i & m != 0) {
                state[i] *= f;
            }
        }
        Gate::X(a) => {
            let m = 1 << a;
            for i in (0..dim).filter(|i| i & m == 0) {
                state.swap(i, i | m);
            }
        }
        Gate::Cnot(c, t) => {
            let (mc, mt) = (1 << c, 1 << t);
            for i in (0..dim).filter(|i| i & mc != 0 && i & mt == 0) {
                state.swap(i, i | mt);
            }
        }
        Gate::Swap(a, b) => {
            let (ma, mb) = (1 << a, 1 << b);
            for i in (0..dim).filter(|i| i & ma != 0 && i & mb == 0) {
                state.swap(i, i ^ ma ^ mb);
            }
        }
    }
}

pub fn apply_clifford(state: &mut [Complex64], gates: &[Gate]) {
    for g in gates {
        apply_gate(state, g);
    }
}

pub fn apply_word(state: &[Complex64], w: &PauliWord) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (col, &amp) in state.iter().enumerate() {
        let (row, ph) = w.matrix_entry_for_column(col as u64);
        out[row as usize] += ph * amp;
    }
    out
}

/// Applies `exp(θ/2 · A B)` for anticommuting words `A`, `B`.
pub fn apply_pauli_rotation(
    state: &mut [Complex64],
    a: &PauliWord,
    b: &PauliWord,
    theta: f64,
) -> Result<()> {
    let (ph, q) = a.multiply(b)?;
    if ph.is_real() {
        return Err(Error::PreconditionViolated(format!(
            "rotation words `{a}` and `{b}` commute"
        )));
    }
    let qpsi = apply_word(state, &q);
    let (s, c) = (theta / 2.0).sin_cos();
    let f = ph.to_complex() * s;
    for (x, y) in state.iter_mut().zip(qpsi) {
        *x = *x * c + f * y;
    }
    Ok(())
}

fn columns_to_matrix(dim: usize, mut f: impl FnMut(&mut Vec<Complex64>)) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut e = vec![Complex64::new(0.0, 0.0); dim];
        e[col] = Complex64::new(1.0, 0.0);
        f(&mut e);
        m.set_column(col, &nalgebra::DVector::from_vec(e));
    }
    m
}

/// Dense `U` with `U P U† = tableau(P)`.
pub fn clifford_unitary(t: &CliffordTableau, limits: &DenseLimits) -> Result<DMatrix<Complex64>> {
    check(t.n_qubits(), limits)?;
    Ok(columns_to_matrix(1 << t.n_qubits(), |e| apply_clifford(e, t.gates())))
}

fn check(n: usize, limits: &DenseLimits) -> Result<()> {
    if n > limits.max_qubits {
        return Err(Error::DenseLimitExceeded {
            size: n,
            limit: limits.max_qubits,
        });
    }
    Ok(())
}

fn apply_sector(
    d: &ConditionedDiagonalizer,
    rot: &SectorRotation,
    state: &mut [Complex64],
) -> Result<()> {
    if let Some((rl, rest)) = d.reduced_reps.split_last() {
        for (rj, &t) in rest.iter().zip(&rot.thetas) {
            apply_pauli_rotation(state, rl, rj, t)?;
        }
    }
    Ok(())
}

/// Applies `R̂ V̂ Û_T`; `sectors` must be indexed like [`sector_vectors`].
pub fn apply_diagonalizer(
    d: &ConditionedDiagonalizer,
    sectors: &[SectorRotation],
    state: &mut [Complex64],
) -> Result<()> {
    apply_clifford(state, d.tableau.gates());
    let kmask = (1usize << d.k) - 1;
    let mut out = vec![Complex64::new(0.0, 0.0); state.len()];
    for (idx, rot) in sectors.iter().enumerate() {
        let mut part: Vec<Complex64> = state
            .iter()
            .enumerate()
            .map(|(i, &z)| if i & kmask == idx { z } else { Complex64::new(0.0, 0.0) })
            .collect();
        apply_sector(d, rot, &mut part)?;
        for (o, p) in out.iter_mut().zip(part) {
            *o += p;
        }
    }
    state.copy_from_slice(&out);
    apply_clifford(state, &d.final_gates);
    Ok(())
}

/// Dense `R̂ V̂ Û_T`.
pub fn diagonalizer_unitary(
    d: &ConditionedDiagonalizer,
    limits: &DenseLimits,
) -> Result<DMatrix<Complex64>> {
    check(d.n_qubits, limits)?;
    let sectors = d.sectors()?;
    debug_assert!(sector_vectors(d.k).zip(&sectors).all(|(v, s)| v == s.v));
    let mut err = None;
    let m = columns_to_matrix(1 << d.n_qubits, |e| {
        if let Err(x) = apply_diagonalizer(d, &sectors, e) {
            err.get_or_insert(x);
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(m),
    }
}

/// Frobenius norm of the off-diagonal part of `W H W†`.
pub fn off_diagonal_norm(
    frag: &PauliSum,
    d: &ConditionedDiagonalizer,
    limits: &DenseLimits,
) -> Result<f64> {
    let h = pauli_to_dense(frag, limits)?;
    let w = diagonalizer_unitary(d, limits)?;
    let r = &w * h.matrix() * w.adjoint();
    let mut s = 0.0;
    for ((i, j), z) in r.iter().enumerate().map(|(k, z)| ((k % r.nrows(), k / r.nrows()), z)) {
        if i != j {
            s += z.norm_sqr();
        }
    }
    Ok(s.sqrt())
}
