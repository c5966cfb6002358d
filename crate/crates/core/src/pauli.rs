//! Pauli words in symplectic bit form and real-weighted sums of them.
//!
//! A word on `n` qubits is stored as two packed bit strings, `x` and `z`,
//! 64 qubits per limb, qubit `q` at bit `q % 64` of limb `q / 64`. A qubit
//! with both bits set carries `Y`, with the fixed convention `Y = iXZ`, so
//! the word with bits `(x, z)` is the operator `i^{|x & z|} X^x Z^z`.
//! Phases are never stored in a word; they are returned by [`PauliWord::multiply`]
//! and folded into coefficients by callers.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Coefficients with magnitude at or below this are pruned from sums.
pub const TAU_ZERO: f64 = 1e-12;

pub(crate) type Limbs = SmallVec<[u64; 2]>;

fn limb_count(n: usize) -> usize {
    n.div_ceil(64).max(1)
}

/// Single-qubit Pauli axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A power of `i`: one of `+1, +i, -1, -i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct Phase(u8);

impl std::ops::Mul for Phase {
    type Output = Phase;
    fn mul(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }
}

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_exponent(k: i64) -> Phase {
        Phase(k.rem_euclid(4) as u8)
    }

    pub fn exponent(self) -> u8 {
        self.0
    }

    pub fn conj(self) -> Phase {
        Phase((4 - self.0) % 4)
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `Some(±1.0)` for a real phase.
    pub fn as_real(self) -> Option<f64> {
        match self.0 {
            0 => Some(1.0),
            2 => Some(-1.0),
            _ => None,
        }
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+1", "+i", "-1", "-i"][self.0 as usize])
    }
}

/// Tensor product of single-qubit Paulis on a fixed number of qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliWord {
    n: usize,
    x: Limbs,
    z: Limbs,
}

impl PauliWord {
    pub fn identity(n_qubits: usize) -> PauliWord {
        let l = limb_count(n_qubits);
        PauliWord {
            n: n_qubits,
            x: SmallVec::from_elem(0, l),
            z: SmallVec::from_elem(0, l),
        }
    }

    /// One non-identity factor `axis` on `qubit`.
    pub fn single(n_qubits: usize, qubit: usize, axis: Axis) -> PauliWord {
        let mut w = PauliWord::identity(n_qubits);
        w.set(qubit, Some(axis));
        w
    }

    /// Builds a word from explicit per-qubit bits.
    pub fn from_bools(x: &[bool], z: &[bool]) -> Result<PauliWord> {
        if x.len() != z.len() {
            return Err(Error::SizeMismatch(x.len(), z.len()));
        }
        let mut w = PauliWord::identity(x.len());
        for q in 0..x.len() {
            w.set_bits(q, x[q], z[q]);
        }
        Ok(w)
    }

    /// Builds a word from packed limbs; bits above `n_qubits` must be clear.
    pub fn from_limbs(n_qubits: usize, x: &[u64], z: &[u64]) -> PauliWord {
        let l = limb_count(n_qubits);
        assert!(x.len() == l && z.len() == l, "limb count mismatch");
        let w = PauliWord {
            n: n_qubits,
            x: SmallVec::from_slice(x),
            z: SmallVec::from_slice(z),
        };
        debug_assert!(w.high_bits_clear());
        w
    }

    fn high_bits_clear(&self) -> bool {
        let used = self.n % 64;
        if used == 0 {
            return true;
        }
        let mask = !((1u64 << used) - 1);
        let last = self.x.len() - 1;
        self.x[last] & mask == 0 && self.z[last] & mask == 0
    }

    /// Parses whitespace-separated tokens such as `"X0 Z3 Y5"`. `I` tokens are
    /// ignored; the empty string is the identity.
    pub fn parse(text: &str, n_qubits: usize) -> Result<PauliWord> {
        let mut w = PauliWord::identity(n_qubits);
        let mut seen = vec![false; n_qubits];
        for token in text.split_whitespace() {
            let mut chars = token.chars();
            let letter = chars.next().unwrap_or(' ');
            let axis = match letter.to_ascii_uppercase() {
                'X' => Some(Axis::X),
                'Y' => Some(Axis::Y),
                'Z' => Some(Axis::Z),
                'I' => None,
                _ => return Err(Error::UnknownAxis(token.to_string())),
            };
            let index: usize = chars
                .as_str()
                .parse()
                .map_err(|_| Error::UnknownAxis(token.to_string()))?;
            if index >= n_qubits {
                return Err(Error::IndexOutOfRange { index, n_qubits });
            }
            if seen[index] {
                return Err(Error::DuplicateIndex(index));
            }
            seen[index] = true;
            w.set(index, axis);
        }
        Ok(w)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_limbs(&self) -> &[u64] {
        &self.x
    }

    pub fn z_limbs(&self) -> &[u64] {
        &self.z
    }

    pub fn x_bit(&self, q: usize) -> bool {
        self.x[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        self.z[q / 64] >> (q % 64) & 1 == 1
    }

    pub fn axis(&self, q: usize) -> Option<Axis> {
        match (self.x_bit(q), self.z_bit(q)) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        }
    }

    pub(crate) fn set_bits(&mut self, q: usize, x: bool, z: bool) {
        let (limb, bit) = (q / 64, 1u64 << (q % 64));
        if x {
            self.x[limb] |= bit;
        } else {
            self.x[limb] &= !bit;
        }
        if z {
            self.z[limb] |= bit;
        } else {
            self.z[limb] &= !bit;
        }
    }

    pub fn set(&mut self, q: usize, axis: Option<Axis>) {
        assert!(q < self.n, "qubit {q} out of range for {} qubits", self.n);
        let (x, z) = match axis {
            None => (false, false),
            Some(Axis::X) => (true, false),
            Some(Axis::Y) => (true, true),
            Some(Axis::Z) => (false, true),
        };
        self.set_bits(q, x, z);
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().all(|&l| l == 0) && self.z.iter().all(|&l| l == 0)
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    /// Qubits carrying a non-identity factor, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&q| self.x_bit(q) || self.z_bit(q))
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        self.x.iter().zip(&self.z).map(|(x, z)| (x & z).count_ones()).sum()
    }

    fn check_size(&self, other: &PauliWord) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    /// Operator product `self · other = phase · word`.
    pub fn multiply(&self, other: &PauliWord) -> Result<(Phase, PauliWord)> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &PauliWord) -> (Phase, PauliWord) {
        // X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
        let mut k: i64 = 0;
        let mut x = Limbs::with_capacity(self.x.len());
        let mut z = Limbs::with_capacity(self.z.len());
        for i in 0..self.x.len() {
            let (x1, z1, x2, z2) = (self.x[i], self.z[i], other.x[i], other.z[i]);
            let (xo, zo) = (x1 ^ x2, z1 ^ z2);
            k += (x1 & z1).count_ones() as i64 + (x2 & z2).count_ones() as i64
                + 2 * (z1 & x2).count_ones() as i64
                - (xo & zo).count_ones() as i64;
            x.push(xo);
            z.push(zo);
        }
        (Phase::from_exponent(k), PauliWord { n: self.n, x, z })
    }

    /// True iff the two words commute (even symplectic product).
    pub fn commutes(&self, other: &PauliWord) -> Result<bool> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    #[inline]
    pub(crate) fn commutes_unchecked(&self, other: &PauliWord) -> bool {
        let mut parity = 0u32;
        for i in 0..self.x.len() {
            parity ^= ((self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i])).count_ones();
        }
        parity & 1 == 0
    }

    /// Matrix element `<row| W |col>` in the computational basis, qubit `q`
    /// being bit `q` of the basis index. Only valid for `n <= 64`.
    pub fn matrix_entry_for_column(&self, col: u64) -> (u64, Complex64) {
        let (x, z) = (self.x[0], self.z[0]);
        let row = col ^ x;
        let mut phase = Phase::from_exponent((x & z).count_ones() as i64);
        if (z & col).count_ones() % 2 == 1 {
            phase = phase * Phase::MINUS_ONE;
        }
        (row, phase.to_complex())
    }
}

fn cmp_limbs_be(a: &[u64], b: &[u64]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

impl Ord for PauliWord {
    /// Canonical order: `z` bits as a big-endian integer, then `x` bits.
    fn cmp(&self, other: &Self) -> Ordering {
        self.n
            .cmp(&other.n)
            .then_with(|| cmp_limbs_be(&self.z, &other.z))
            .then_with(|| cmp_limbs_be(&self.x, &other.x))
    }
}

impl PartialOrd for PauliWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for q in 0..self.n {
            if let Some(axis) = self.axis(q) {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                let c = match axis {
                    Axis::X => 'X',
                    Axis::Y => 'Y',
                    Axis::Z => 'Z',
                };
                write!(f, "{c}{q}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            write!(f, "PauliWord(I; n={})", self.n)
        } else {
            write!(f, "PauliWord({self}; n={})", self.n)
        }
    }
}

/// Real linear combination of Pauli words, iterated in canonical word order.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n: usize,
    terms: BTreeMap<PauliWord, f64>,
}

impl PauliSum {
    pub fn new(n_qubits: usize) -> PauliSum {
        PauliSum {
            n: n_qubits,
            terms: BTreeMap::new(),
        }
    }

    /// Accumulates the given terms (duplicates add) and prunes zeros.
    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<PauliSum>
    where
        I: IntoIterator<Item = (PauliWord, f64)>,
    {
        let mut sum = PauliSum::new(n_qubits);
        for (w, c) in terms {
            sum.add_term(w, c)?;
        }
        sum.prune();
        Ok(sum)
    }

    /// Like [`PauliSum::from_terms`] but rejects any coefficient with an
    /// imaginary part above [`TAU_ZERO`] after accumulation.
    pub fn from_complex_terms<I>(n_qubits: usize, terms: I) -> Result<PauliSum>
    where
        I: IntoIterator<Item = (PauliWord, Complex64)>,
    {
        let mut acc: BTreeMap<PauliWord, Complex64> = BTreeMap::new();
        for (w, c) in terms {
            if w.n_qubits() != n_qubits {
                return Err(Error::SizeMismatch(n_qubits, w.n_qubits()));
            }
            *acc.entry(w).or_default() += c;
        }
        let mut sum = PauliSum::new(n_qubits);
        for (w, c) in acc {
            if c.im.abs() > TAU_ZERO {
                return Err(Error::ComplexCoefficient {
                    word: w.to_string(),
                    imag: c.im,
                });
            }
            if c.re.abs() > TAU_ZERO {
                sum.terms.insert(w, c.re);
            }
        }
        Ok(sum)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, word: PauliWord, coeff: f64) -> Result<()> {
        if word.n_qubits() != self.n {
            return Err(Error::SizeMismatch(self.n, word.n_qubits()));
        }
        if !coeff.is_finite() {
            return Err(Error::InvariantViolation(format!(
                "non-finite coefficient on {word}"
            )));
        }
        *self.terms.entry(word).or_insert(0.0) += coeff;
        Ok(())
    }

    pub fn coefficient(&self, word: &PauliWord) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, word: &PauliWord) -> bool {
        self.terms.contains_key(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, f64)> + '_ {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> + '_ {
        self.terms.keys()
    }

    /// Coefficient of the identity word.
    pub fn constant(&self) -> f64 {
        self.coefficient(&PauliWord::identity(self.n))
    }

    /// Copy with the identity term removed.
    pub fn without_identity(&self) -> PauliSum {
        let mut out = self.clone();
        out.terms.remove(&PauliWord::identity(self.n));
        out
    }

    pub fn remove(&mut self, word: &PauliWord) -> Option<f64> {
        self.terms.remove(word)
    }

    pub fn prune(&mut self) {
        self.terms.retain(|_, c| c.abs() > TAU_ZERO);
    }

    fn check_size(&self, other: &PauliSum) -> Result<()> {
        if self.n != other.n {
            Err(Error::SizeMismatch(self.n, other.n))
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        self.check_size(other)?;
        let mut out = self.clone();
        for (w, c) in other.iter() {
            *out.terms.entry(w.clone()).or_insert(0.0) += c;
        }
        out.prune();
        Ok(out)
    }

    pub fn subtract(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, factor: f64) -> PauliSum {
        let mut out = PauliSum {
            n: self.n,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c * factor)).collect(),
        };
        out.prune();
        out
    }

    /// Sum of absolute coefficients.
    pub fn one_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Largest coefficient-wise difference and the word where it occurs.
    pub fn max_difference(&self, other: &PauliSum) -> Result<(f64, Option<PauliWord>)> {
        self.check_size(other)?;
        let mut worst = (0.0, None);
        for w in self.terms.keys().chain(other.terms.keys()) {
            let d = (self.coefficient(w) - other.coefficient(w)).abs();
            if d > worst.0 {
                worst = (d, Some(w.clone()));
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str, n: usize) -> PauliWord {
        PauliWord::parse(text, n).unwrap()
    }

    #[test]
    fn parse_identity_and_simple() {
        assert!(w("", 2).is_identity());
        let p = w("X0 Z1", 2);
        assert!(p.x_bit(0) && !p.z_bit(0));
        assert!(!p.x_bit(1) && p.z_bit(1));
        assert_eq!(p.to_string(), "X0 Z1");
        assert!(w("I0 I1", 2).is_identity());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(PauliWord::parse("X0 Y0", 2), Err(Error::DuplicateIndex(0))));
        assert!(matches!(PauliWord::parse("Q0", 2), Err(Error::UnknownAxis(_))));
        assert!(matches!(
            PauliWord::parse("X2", 2),
            Err(Error::IndexOutOfRange { index: 2, .. })
        ));
    }

    #[test]
    fn single_qubit_products() {
        let (ph, p) = w("X0", 1).multiply(&w("X0", 1)).unwrap();
        assert_eq!(ph, Phase::ONE);
        assert!(p.is_identity());
        let (ph, p) = w("X0", 1).multiply(&w("Z0", 1)).unwrap();
        assert_eq!(ph, Phase::MINUS_I);
        assert_eq!(p, w("Y0", 1));
        let (ph, p) = w("Z0", 1).multiply(&w("X0", 1)).unwrap();
        assert_eq!(ph, Phase::I);
        assert_eq!(p, w("Y0", 1));
        let (ph, _) = w("X0", 1).multiply(&w("Y0", 1)).unwrap();
        assert_eq!(ph, Phase::I);
    }

    #[test]
    fn commutation_examples() {
        assert!(!w("X0", 1).commutes(&w("Z0", 1)).unwrap());
        assert!(w("X0 Z1", 2).commutes(&w("Z0 X1", 2)).unwrap());
        assert!(w("X0", 2).commutes(&w("Z1", 2)).unwrap());
    }

    #[test]
    fn size_mismatch_is_reported() {
        assert!(matches!(
            w("X0", 1).multiply(&w("X0", 2)),
            Err(Error::SizeMismatch(1, 2))
        ));
        assert!(w("X0", 1).commutes(&w("X0", 2)).is_err());
    }

    #[test]
    fn canonical_order_is_z_then_x_big_endian() {
        let mut v = [w("Z1", 2), w("X1", 2), w("Z0", 2), w("X0", 2), w("", 2)];
        v.sort();
        let s: Vec<String> = v.iter().map(|p| p.to_string()).collect();
        assert_eq!(s, vec!["", "X0", "X1", "Z0", "Z1"]);
    }

    #[test]
    fn wide_words_span_limbs() {
        let a = w("X3 Z70 Y100", 128);
        let b = w("Z3 X70", 128);
        assert!(a.commutes(&b).unwrap());
        let (ph, p) = a.multiply(&a).unwrap();
        assert_eq!(ph, Phase::ONE);
        assert!(p.is_identity());
        assert_eq!(a.weight(), 3);
        assert_eq!(a.support().collect::<Vec<_>>(), vec![3, 70, 100]);
    }

    #[test]
    fn sum_arithmetic() {
        let a = PauliSum::from_terms(2, [(w("X0", 2), 0.5), (w("Z0 Z1", 2), -1.25)]).unwrap();
        assert!(a.add(&a.scale(-1.0)).unwrap().is_empty());
        let d = a.scale(2.0);
        assert_eq!(d.coefficient(&w("X0", 2)), 1.0);
        assert_eq!(d.coefficient(&w("Z0 Z1", 2)), -2.5);
        assert_eq!(a.subtract(&a).unwrap().len(), 0);
        assert!(a.add(&PauliSum::new(3)).is_err());
    }

    #[test]
    fn complex_coefficients_rejected() {
        let r = PauliSum::from_complex_terms(1, [(w("X0", 1), Complex64::new(1.0, 0.5))]);
        assert!(matches!(r, Err(Error::ComplexCoefficient { .. })));
        let ok = PauliSum::from_complex_terms(
            1,
            [
                (w("X0", 1), Complex64::new(1.0, 0.5)),
                (w("X0", 1), Complex64::new(0.0, -0.5)),
            ],
        )
        .unwrap();
        assert_eq!(ok.coefficient(&w("X0", 1)), 1.0);
    }

    #[test]
    fn pruning_drops_tiny_terms() {
        let s = PauliSum::from_terms(1, [(w("X0", 1), 1e-13), (w("Z0", 1), 1.0)]).unwrap();
        assert_eq!(s.len(), 1);
    }
}
