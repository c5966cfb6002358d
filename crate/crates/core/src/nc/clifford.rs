use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{PauliWord, Phase};

use super::structure::NonContextualStructure;

/// Clifford gates used to build tapering and final-rotation circuits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Swap(usize, usize),
}

/// Pauli word with a sign, `(-1)^neg · word`.
type Signed = (bool, PauliWord);

fn bits(w: &PauliWord, q: usize) -> (bool, bool) {
    (w.x_bit(q), w.z_bit(q))
}

impl Gate {
    /// Conjugates `P ↦ G P G†` in place.
    pub(crate) fn conjugate(&self, p: &mut Signed) {
        let (neg, w) = p;
        match *self {
            Gate::H(a) => {
                let (x, z) = bits(w, a);
                *neg ^= x && z;
                w.set_bits(a, z, x);
            }
            Gate::S(a) => {
                let (x, z) = bits(w, a);
                *neg ^= x && z;
                w.set_bits(a, x, z ^ x);
            }
            Gate::Sdg(a) => {
                Gate::S(a).conjugate(p);
                Gate::Z(a).conjugate(p);
            }
            Gate::X(a) => *neg ^= w.z_bit(a),
            Gate::Z(a) => *neg ^= w.x_bit(a),
            Gate::Cnot(c, t) => {
                let (xc, zc) = bits(w, c);
                let (xt, zt) = bits(w, t);
                *neg ^= xc && zt && !(xt ^ zc);
                w.set_bits(t, xt ^ xc, zt);
                w.set_bits(c, xc, zc ^ zt);
            }
            Gate::Swap(a, b) => {
                let (xa, za) = bits(w, a);
                let (xb, zb) = bits(w, b);
                w.set_bits(a, xb, zb);
                w.set_bits(b, xa, za);
            }
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(a) | Gate::S(a) | Gate::Sdg(a) | Gate::X(a) | Gate::Z(a) => vec![a],
            Gate::Cnot(a, b) | Gate::Swap(a, b) => vec![a, b],
        }
    }
}

fn conjugate_all(gates: &[Gate], w: &PauliWord) -> Signed {
    let mut p = (false, w.clone());
    for g in gates {
        g.conjugate(&mut p);
    }
    p
}

/// A Clifford map `P ↦ U P U†` stored as the signed images of the single-qubit
/// generators `X_q` and `Z_q`, together with the gate list realizing it.
#[derive(Clone, Debug, PartialEq)]
pub struct CliffordTableau {
    n: usize,
    gates: Vec<Gate>,
    x_images: Vec<Signed>,
    z_images: Vec<Signed>,
}

impl CliffordTableau {
    pub fn identity(n: usize) -> CliffordTableau {
        CliffordTableau::from_gates(n, Vec::new())
    }

    pub fn from_gates(n: usize, gates: Vec<Gate>) -> CliffordTableau {
        let single = |q: usize, x: bool, z: bool| {
            let mut w = PauliWord::identity(n);
            w.set_bits(q, x, z);
            conjugate_all(&gates, &w)
        };
        let x_images = (0..n).map(|q| single(q, true, false)).collect();
        let z_images = (0..n).map(|q| single(q, false, true)).collect();
        CliffordTableau {
            n,
            gates,
            x_images,
            z_images,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Gates in application order: `U = g_m ⋯ g_1`.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Image `U W U† = sign · word`.
    pub fn apply(&self, w: &PauliWord) -> Result<(f64, PauliWord)> {
        if w.n_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, w.n_qubits()));
        }
        let mut phase = Phase::from_exponent(w.y_count() as i64);
        let mut acc = PauliWord::identity(self.n);
        let factors = (0..self.n)
            .filter(|&q| w.x_bit(q))
            .map(|q| &self.x_images[q])
            .chain((0..self.n).filter(|&q| w.z_bit(q)).map(|q| &self.z_images[q]));
        for (neg, img) in factors {
            let (p, next) = acc.mul_unchecked(img);
            phase = phase * p;
            if *neg {
                phase = phase * Phase::MINUS_ONE;
            }
            acc = next;
        }
        let s = phase
            .as_real()
            .ok_or_else(|| Error::Internal(format!("Clifford image of {w} has phase {phase}")))?;
        Ok((s, acc))
    }

    /// The `2n × 2n` GF(2) matrix; column `q` is the image of `X_q`, column
    /// `n + q` that of `Z_q`, each as `[x | z]`.
    pub fn symplectic_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.n;
        let mut m = vec![vec![false; 2 * n]; 2 * n];
        for (col, (_, img)) in self.x_images.iter().chain(&self.z_images).enumerate() {
            for q in 0..n {
                m[q][col] = img.x_bit(q);
                m[n + q][col] = img.z_bit(q);
            }
        }
        m
    }

    /// Sign bits of the generator images, `X_q` first.
    pub fn sign_bits(&self) -> Vec<bool> {
        self.x_images.iter().chain(&self.z_images).map(|(s, _)| *s).collect()
    }

    /// Checks that generator images obey the canonical commutation relations.
    pub fn is_symplectic(&self) -> bool {
        let n = self.n;
        for a in 0..n {
            for b in 0..n {
                let xx = self.x_images[a].1.commutes_unchecked(&self.x_images[b].1);
                let zz = self.z_images[a].1.commutes_unchecked(&self.z_images[b].1);
                let xz = self.x_images[a].1.commutes_unchecked(&self.z_images[b].1);
                if !xx || !zz || xz != (a != b) {
                    return false;
                }
            }
        }
        true
    }
}

fn to_z_gates(w: &PauliWord, from: usize, gates: &mut Vec<Gate>) {
    for q in from..w.n_qubits() {
        match (w.x_bit(q), w.z_bit(q)) {
            (true, false) => gates.push(Gate::H(q)),
            (true, true) => {
                gates.push(Gate::Sdg(q));
                gates.push(Gate::H(q));
            }
            _ => {}
        }
    }
}

/// Gates sending the word `w` (sign `+`) to `+Z_q` with `q` the lowest qubit
/// of its support. Only qubits in the support are touched.
pub fn reduce_to_single_z(w: &PauliWord) -> Result<(Vec<Gate>, usize)> {
    let support: Vec<usize> = w.support().collect();
    let Some(&q0) = support.first() else {
        return Err(Error::PreconditionViolated("cannot reduce the identity to Z".into()));
    };
    let mut gates = Vec::new();
    to_z_gates(w, q0, &mut gates);
    for &q in &support[1..] {
        gates.push(Gate::Cnot(q, q0));
    }
    let (neg, img) = conjugate_all(&gates, w);
    if neg || img != PauliWord::single(w.n_qubits(), q0, crate::pauli::Axis::Z) {
        return Err(Error::Internal(format!("reduction of {w} gave {img}")));
    }
    Ok((gates, q0))
}

/// Clifford sending each generator `C_k` to `+Z_k` (qubit `k`, 0-based).
/// Representatives then carry no `X` component on qubits `0..K`.
pub fn build_tapering_clifford(s: &NonContextualStructure) -> Result<CliffordTableau> {
    let n = s.n_qubits;
    let mut gates: Vec<Gate> = Vec::new();
    for (k, c) in s.group_basis.iter().enumerate() {
        let (_, p) = conjugate_all(&gates, c);
        to_z_gates(&p, k, &mut gates);
        let (_, p) = conjugate_all(&gates, c);
        let high: Vec<usize> = p.support().filter(|&q| q >= k).collect();
        let Some(&q0) = high.first() else {
            return Err(Error::Internal(format!("generator {c} is dependent")));
        };
        for &q in &high[1..] {
            gates.push(Gate::Cnot(q, q0));
        }
        if q0 != k {
            gates.push(Gate::Swap(q0, k));
        }
        let (_, p) = conjugate_all(&gates, c);
        for j in (0..k).filter(|&j| p.z_bit(j)) {
            gates.push(Gate::Cnot(j, k));
        }
        if conjugate_all(&gates, c).0 {
            gates.push(Gate::X(k));
        }
    }
    let t = CliffordTableau::from_gates(n, gates);
    for (k, c) in s.group_basis.iter().enumerate() {
        let (sign, img) = t.apply(c)?;
        if sign != 1.0 || img != PauliWord::single(n, k, crate::pauli::Axis::Z) {
            return Err(Error::Internal(format!("tapering sends {c} to {sign} {img}")));
        }
    }
    for r in &s.reps {
        let (_, img) = t.apply(r)?;
        if (0..s.k()).any(|q| img.x_bit(q)) {
            return Err(Error::Internal(format!("rep image {img} acts on a symmetry qubit")));
        }
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Axis;

    fn w(t: &str, n: usize) -> PauliWord {
        PauliWord::parse(t, n).unwrap()
    }

    #[test]
    fn single_gate_rules() {
        let cases = [
            (Gate::H(0), "X0", false, "Z0"),
            (Gate::H(0), "Y0", true, "Y0"),
            (Gate::S(0), "X0", false, "Y0"),
            (Gate::S(0), "Y0", true, "X0"),
            (Gate::Sdg(0), "X0", true, "Y0"),
            (Gate::Sdg(0), "Y0", false, "X0"),
            (Gate::X(0), "Z0", true, "Z0"),
            (Gate::Cnot(0, 1), "X0", false, "X0 X1"),
            (Gate::Cnot(0, 1), "Z1", false, "Z0 Z1"),
            (Gate::Cnot(0, 1), "Y0", false, "Y0 X1"),
            (Gate::Cnot(0, 1), "Y1", false, "Z0 Y1"),
            (Gate::Cnot(0, 1), "X0 Z1", true, "Y0 Y1"),
            (Gate::Swap(0, 1), "X0 Z1", false, "Z0 X1"),
        ];
        for (g, from, neg, to) in cases {
            let mut p = (false, w(from, 2));
            g.conjugate(&mut p);
            assert_eq!(p, (neg, w(to, 2)), "{g:?} on {from}");
        }
    }

    #[test]
    fn tableau_apply_matches_direct_conjugation() {
        let gates = vec![Gate::H(0), Gate::Cnot(0, 2), Gate::S(1), Gate::Swap(1, 2), Gate::Sdg(0)];
        let t = CliffordTableau::from_gates(3, gates.clone());
        assert!(t.is_symplectic());
        for text in ["X0 Y1 Z2", "Y0 Y1", "Z0 X2", "Y2", ""] {
            let word = w(text, 3);
            let (neg, img) = conjugate_all(&gates, &word);
            let (s, img2) = t.apply(&word).unwrap();
            assert_eq!(img, img2);
            assert_eq!(s, if neg { -1.0 } else { 1.0 }, "{text}");
        }
    }

    #[test]
    fn reduce_word_to_z() {
        for text in ["X1 Y3 Z4", "Y2", "Z0 Z5", "X0"] {
            let word = w(text, 6);
            let (gates, q) = reduce_to_single_z(&word).unwrap();
            assert_eq!(q, word.support().next().unwrap());
            assert_eq!(conjugate_all(&gates, &word), (false, PauliWord::single(6, q, Axis::Z)));
        }
    }
}
