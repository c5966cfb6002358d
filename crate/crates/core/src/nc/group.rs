use crate::error::{Error, Result};
use crate::pauli::{PauliWord, Phase};

use super::exponent::Exponent;

/// Independent generators of the group spanned by a commuting word list,
/// with each input expressed over them.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupReduction {
    /// Generators, taken from the inputs in first-seen order.
    pub basis: Vec<PauliWord>,
    /// `words[i] = signs[i] · Π_{k ∈ exponents[i]} basis[k]` (ordered product).
    pub exponents: Vec<Exponent>,
    pub signs: Vec<f64>,
}

fn packed(w: &PauliWord) -> Vec<u64> {
    w.x_limbs().iter().chain(w.z_limbs()).copied().collect()
}

fn lowest_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &l)| l != 0)
        .map(|(i, &l)| 64 * i + l.trailing_zeros() as usize)
}

/// Ordered operator product `Π_{k ∈ e} basis[k]`.
pub(crate) fn product(basis: &[PauliWord], e: &Exponent, n: usize) -> (Phase, PauliWord) {
    let mut phase = Phase::ONE;
    let mut word = PauliWord::identity(n);
    for k in e.ones() {
        let (p, w) = word.mul_unchecked(&basis[k]);
        phase = phase * p;
        word = w;
    }
    (phase, word)
}

/// GF(2) row reduction of pairwise commuting words.
pub fn group_reduce(words: &[PauliWord]) -> Result<GroupReduction> {
    let Some(first) = words.first() else {
        return Ok(GroupReduction {
            basis: Vec::new(),
            exponents: Vec::new(),
            signs: Vec::new(),
        });
    };
    let n = first.n_qubits();
    for (i, a) in words.iter().enumerate() {
        if a.n_qubits() != n {
            return Err(Error::SizeMismatch(n, a.n_qubits()));
        }
        for b in &words[i + 1..] {
            if !a.commutes_unchecked(b) {
                return Err(Error::NonCommutingInput(a.to_string(), b.to_string()));
            }
        }
    }

    // Echelon rows: (reduced vector, pivot bit, combination of basis elements).
    let mut rows: Vec<(Vec<u64>, usize, Exponent)> = Vec::new();
    let mut basis = Vec::new();
    let mut exponents = Vec::with_capacity(words.len());
    let mut signs = Vec::with_capacity(words.len());
    for w in words {
        let mut v = packed(w);
        let mut combo = Exponent::zero();
        for (row, pivot, rc) in &rows {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (a, b) in v.iter_mut().zip(row) {
                    *a ^= b;
                }
                combo = combo.xor(rc);
            }
        }
        match lowest_bit(&v) {
            Some(pivot) => {
                let k = basis.len();
                basis.push(w.clone());
                combo.flip(k);
                rows.push((v, pivot, combo));
                exponents.push(Exponent::unit(k));
                signs.push(1.0);
            }
            None => {
                let (phase, word) = product(&basis, &combo, n);
                if word != *w {
                    return Err(Error::Internal(format!("group reduction failed for {w}")));
                }
                // w = conj(phase) · Π basis^combo
                let s = phase.conj().as_real().ok_or_else(|| {
                    Error::PhaseInconsistency(format!("{w} from generators carries phase {phase}"))
                })?;
                exponents.push(combo);
                signs.push(s);
            }
        }
    }
    Ok(GroupReduction {
        basis,
        exponents,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ws(t: &[&str], n: usize) -> Vec<PauliWord> {
        t.iter().map(|s| PauliWord::parse(s, n).unwrap()).collect()
    }

    #[test]
    fn dependent_word() {
        let r = group_reduce(&ws(&["Z0", "Z1", "Z0 Z1"], 2)).unwrap();
        assert_eq!(r.basis.len(), 2);
        assert_eq!(r.exponents[2], Exponent::from_bits(&[true, true]));
        assert_eq!(r.signs[2], 1.0);
    }

    #[test]
    fn negative_sign() {
        // X0 X1 · Z0 Z1 = (XZ)⊗(XZ) = (-iY)⊗(-iY) = -Y0 Y1
        let r = group_reduce(&ws(&["X0 X1", "Z0 Z1", "Y0 Y1"], 2)).unwrap();
        assert_eq!(r.basis.len(), 2);
        assert_eq!(r.signs[2], -1.0);
    }

    #[test]
    fn independent_set() {
        let input = ws(&["X0", "Z1", "Y2 Y3"], 4);
        let r = group_reduce(&input).unwrap();
        assert_eq!(r.basis, input);
        for (k, e) in r.exponents.iter().enumerate() {
            assert_eq!(*e, Exponent::unit(k));
        }
    }

    #[test]
    fn rejects_anticommuting() {
        assert!(matches!(
            group_reduce(&ws(&["X0", "Z0"], 1)),
            Err(Error::NonCommutingInput(..))
        ));
    }
}
