use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Axis, PauliSum, PauliWord};

/// Coefficients of the open-chain model on `2n` qubits
/// `Σ_i (a_i X_i X_{i+1} + b_i Y_i Y_{i+1} + c_i Z_i Z_{i+1}) + Σ_j d_j Z_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergSpec {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl HeisenbergSpec {
    /// Coefficients drawn with random sign and magnitude in `[0.1, 1)`.
    pub fn random(n: usize, seed: u64) -> HeisenbergSpec {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |len: usize| -> Vec<f64> {
            (0..len)
                .map(|_| {
                    let m: f64 = rng.random_range(0.1..1.0);
                    if rng.random::<bool>() {
                        m
                    } else {
                        -m
                    }
                })
                .collect()
        };
        let bonds = (2 * n).saturating_sub(1);
        HeisenbergSpec {
            n,
            a: draw(bonds),
            b: draw(bonds),
            c: draw(bonds),
            d: draw(2 * n),
        }
    }

    pub fn n_qubits(&self) -> usize {
        2 * self.n
    }
}

pub fn heisenberg_model(spec: &HeisenbergSpec) -> Result<PauliSum> {
    let q = 2 * spec.n;
    if spec.n == 0 {
        return Err(Error::BadLengths("n must be positive".into()));
    }
    for (name, v, want) in [
        ("a", &spec.a, q - 1),
        ("b", &spec.b, q - 1),
        ("c", &spec.c, q - 1),
        ("d", &spec.d, q),
    ] {
        if v.len() != want {
            return Err(Error::BadLengths(format!(
                "{name} has {} entries, expected {want}",
                v.len()
            )));
        }
    }
    let pair = |i: usize, axis: Axis| {
        let mut w = PauliWord::identity(q);
        w.set(i, Some(axis));
        w.set(i + 1, Some(axis));
        w
    };
    let mut terms = Vec::with_capacity(4 * q);
    for i in 0..q - 1 {
        terms.push((pair(i, Axis::X), spec.a[i]));
        terms.push((pair(i, Axis::Y), spec.b[i]));
        terms.push((pair(i, Axis::Z), spec.c[i]));
    }
    for j in 0..q {
        terms.push((PauliWord::single(q, j, Axis::Z), spec.d[j]));
    }
    PauliSum::from_terms(q, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_counts() {
        for n in 1..5 {
            let h = heisenberg_model(&HeisenbergSpec::random(n, 3)).unwrap();
            assert_eq!(h.len(), 3 * (2 * n - 1) + 2 * n);
        }
    }

    #[test]
    fn bad_lengths() {
        let mut s = HeisenbergSpec::random(2, 1);
        s.d.pop();
        assert!(matches!(heisenberg_model(&s), Err(Error::BadLengths(_))));
    }
}
