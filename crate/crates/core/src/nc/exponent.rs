use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

/// Bitset over symmetry generators: bit `k` set means `C_k` appears in a
/// product. Also used for sector labels, where bit `k` set means `v_k = -1`.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(SmallVec<[u64; 1]>);

impl Exponent {
    pub fn zero() -> Exponent {
        Exponent::default()
    }

    pub fn unit(k: usize) -> Exponent {
        let mut e = Exponent::zero();
        e.flip(k);
        e
    }

    pub fn from_bits(bits: &[bool]) -> Exponent {
        let mut e = Exponent::zero();
        for (k, &b) in bits.iter().enumerate() {
            if b {
                e.flip(k);
            }
        }
        e
    }

    /// Sector index `i` read as a bitset (bit `k` of `i` is entry `k`).
    pub fn from_index(i: u64) -> Exponent {
        let mut e = Exponent(SmallVec::from_elem(i, 1));
        e.trim();
        e
    }

    fn trim(&mut self) {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
    }

    pub fn get(&self, k: usize) -> bool {
        self.0.get(k / 64).is_some_and(|l| l >> (k % 64) & 1 == 1)
    }

    pub fn flip(&mut self, k: usize) {
        let limb = k / 64;
        if self.0.len() <= limb {
            self.0.resize(limb + 1, 0);
        }
        self.0[limb] ^= 1 << (k % 64);
        self.trim();
    }

    pub fn xor(&self, other: &Exponent) -> Exponent {
        let len = self.0.len().max(other.0.len());
        let mut out = Exponent(SmallVec::from_elem(0, len));
        for i in 0..len {
            out.0[i] = self.0.get(i).copied().unwrap_or(0) ^ other.0.get(i).copied().unwrap_or(0);
        }
        out.trim();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(i, &l)| {
            (0..64).filter(move |b| l >> b & 1 == 1).map(move |b| 64 * i + b)
        })
    }

    /// Parity of the overlap with `other`.
    pub fn odd_overlap(&self, other: &Exponent) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ks: Vec<usize> = self.ones().collect();
        write!(f, "{ks:?}")
    }
}

/// Polynomial in the commuting involutions `C_k`: each monomial is a set of
/// generators (their operator product), mapped to a real coefficient.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Poly(pub BTreeMap<Exponent, f64>);

impl Poly {
    pub fn add(&mut self, e: Exponent, c: f64) {
        *self.0.entry(e).or_insert(0.0) += c;
    }

    /// Value at the sector whose negative entries are `neg`.
    pub fn eval(&self, neg: &Exponent) -> f64 {
        self.0
            .iter()
            .map(|(e, &c)| if e.odd_overlap(neg) { -c } else { c })
            .sum()
    }

    /// Product with the monomial `C^b`.
    pub fn shifted(&self, b: &Exponent) -> Poly {
        Poly(self.0.iter().map(|(e, &c)| (e.xor(b), c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ops() {
        let mut e = Exponent::unit(3);
        e.flip(70);
        assert!(e.get(3) && e.get(70) && !e.get(4));
        assert_eq!(e.ones().collect::<Vec<_>>(), vec![3, 70]);
        e.flip(70);
        assert_eq!(e, Exponent::unit(3));
        assert_eq!(Exponent::from_index(0b1010), Exponent::from_bits(&[false, true, false, true]));
        assert!(e.xor(&Exponent::unit(3)).is_zero());
    }

    #[test]
    fn poly_eval() {
        let mut p = Poly::default();
        p.add(Exponent::zero(), 1.0);
        p.add(Exponent::from_bits(&[true, true]), 2.0);
        assert_eq!(p.eval(&Exponent::zero()), 3.0);
        assert_eq!(p.eval(&Exponent::unit(0)), -1.0);
        assert_eq!(p.eval(&Exponent::from_index(3)), 3.0);
    }
}
