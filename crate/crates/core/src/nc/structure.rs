use std::collections::HashMap;

use serde::Serialize;

use crate::contextuality::decompose;
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliWord};

use super::exponent::{Exponent, Poly};
use super::group::{group_reduce, product};

/// Factored form `Σ_{i=1..L} p_i(C) A_i + p_0(C)` of a non-contextual fragment.
#[derive(Clone, Debug, PartialEq)]
pub struct NonContextualStructure {
    pub n_qubits: usize,
    /// Independent commuting generators `C_1..C_K`.
    pub group_basis: Vec<PauliWord>,
    /// Mutually anticommuting representatives `A_1..A_L`.
    pub reps: Vec<PauliWord>,
    /// `polys[0] = p_0`, `polys[i] = p_i` for `i = 1..L`.
    pub polys: Vec<Poly>,
}

#[derive(Serialize)]
pub struct StructureSummary {
    pub n_qubits: usize,
    pub k: usize,
    pub l: usize,
    pub generators: Vec<String>,
    pub reps: Vec<String>,
}

impl NonContextualStructure {
    pub fn k(&self) -> usize {
        self.group_basis.len()
    }

    pub fn l(&self) -> usize {
        self.reps.len()
    }

    /// Multiplies the polynomials out into a Pauli sum.
    pub fn expand(&self) -> Result<PauliSum> {
        let n = self.n_qubits;
        let mut terms = Vec::new();
        for (i, poly) in self.polys.iter().enumerate() {
            for (e, &c) in &poly.0 {
                let (mut phase, mut word) = product(&self.group_basis, e, n);
                if i > 0 {
                    let (p, w) = word.mul_unchecked(&self.reps[i - 1]);
                    phase = phase * p;
                    word = w;
                }
                let s = phase.as_real().ok_or_else(|| {
                    Error::PhaseInconsistency(format!("expanded term {word} has phase {phase}"))
                })?;
                terms.push((word, s * c));
            }
        }
        PauliSum::from_terms(n, terms)
    }

    /// Checks the stated invariants of the structure.
    pub fn check_invariants(&self) -> Result<()> {
        let g = &self.group_basis;
        for (i, a) in g.iter().enumerate() {
            if g[i + 1..].iter().any(|b| !a.commutes_unchecked(b)) {
                return Err(Error::Internal("generators do not commute".into()));
            }
            if self.reps.iter().any(|r| !a.commutes_unchecked(r)) {
                return Err(Error::Internal("generator anticommutes with a rep".into()));
            }
        }
        if group_reduce(g)?.basis.len() != g.len() {
            return Err(Error::Internal("generators are not independent".into()));
        }
        for (i, a) in self.reps.iter().enumerate() {
            if self.reps[i + 1..].iter().any(|b| a.commutes_unchecked(b)) {
                return Err(Error::Internal("representatives do not anticommute".into()));
            }
        }
        if self.polys.len() != self.reps.len() + 1 {
            return Err(Error::Internal("polynomial count differs from L + 1".into()));
        }
        Ok(())
    }

    pub fn summary(&self) -> StructureSummary {
        StructureSummary {
            n_qubits: self.n_qubits,
            k: self.k(),
            l: self.l(),
            generators: self.group_basis.iter().map(ToString::to_string).collect(),
            reps: self.reps.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Factors a non-contextual fragment. Representatives are the canonically
/// first word of each commutation class; the group is generated by the
/// universally commuting words and the products `A_ij · A_i`.
pub fn factor_noncontextual(frag: &PauliSum) -> Result<NonContextualStructure> {
    let n = frag.n_qubits();
    let words: Vec<PauliWord> = frag.words().filter(|w| !w.is_identity()).cloned().collect();
    let constant = frag.constant();
    if words.is_empty() {
        let mut p0 = Poly::default();
        if constant != 0.0 {
            p0.add(Exponent::zero(), constant);
        }
        return Ok(NonContextualStructure {
            n_qubits: n,
            group_basis: Vec::new(),
            reps: Vec::new(),
            polys: vec![p0],
        });
    }
    let mut dec = decompose(&words)?;
    if !dec.is_noncontextual {
        return Err(Error::ContextualInput);
    }
    dec.canonicalize();
    let reps: Vec<PauliWord> = dec.classes.iter().map(|c| c[0].clone()).collect();

    // Group elements with the phase linking each term to them.
    // Z term:     w = C                       (C = w)
    // class term: w = φ · C · A_i             (w · A_i = φ · C)
    let mut elements: Vec<PauliWord> = Vec::new();
    let mut index: HashMap<PauliWord, usize> = HashMap::new();
    let mut intern = |w: PauliWord, elements: &mut Vec<PauliWord>| -> usize {
        *index.entry(w.clone()).or_insert_with(|| {
            elements.push(w);
            elements.len() - 1
        })
    };
    // (poly index, element index or none for identity, real factor, coefficient)
    let mut pending: Vec<(usize, Option<usize>, f64, f64)> = Vec::new();
    for z in &dec.z_set {
        let e = intern(z.clone(), &mut elements);
        pending.push((0, Some(e), 1.0, frag.coefficient(z)));
    }
    for (i, class) in dec.classes.iter().enumerate() {
        for w in class {
            let (phi, c) = w.mul_unchecked(&reps[i]);
            let phi = phi.as_real().ok_or_else(|| {
                Error::PhaseInconsistency(format!("{w} · {} has phase {phi}", reps[i]))
            })?;
            let e = if c.is_identity() {
                None
            } else {
                Some(intern(c, &mut elements))
            };
            pending.push((i + 1, e, phi, frag.coefficient(w)));
        }
    }

    let red = group_reduce(&elements)?;
    let mut polys = vec![Poly::default(); reps.len() + 1];
    if constant != 0.0 {
        polys[0].add(Exponent::zero(), constant);
    }
    for (pi, e, phi, c) in pending {
        match e {
            None => polys[pi].add(Exponent::zero(), phi * c),
            Some(e) => polys[pi].add(red.exponents[e].clone(), phi * red.signs[e] * c),
        }
    }
    let s = NonContextualStructure {
        n_qubits: n,
        group_basis: red.basis,
        reps,
        polys,
    };
    s.check_invariants()?;
    let (diff, at) = s.expand()?.max_difference(frag)?;
    if diff > 1e-12 {
        return Err(Error::Internal(format!(
            "factored form differs from fragment by {diff:e} at {}",
            at.map(|w| w.to_string()).unwrap_or_default()
        )));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum(terms: &[(&str, f64)], n: usize) -> PauliSum {
        PauliSum::from_terms(n, terms.iter().map(|(t, c)| (PauliWord::parse(t, n).unwrap(), *c)))
            .unwrap()
    }

    #[test]
    fn pure_ac() {
        let f = sum(&[("X0", 0.6), ("Z0", 0.8)], 1);
        let s = factor_noncontextual(&f).unwrap();
        assert_eq!(s.k(), 0);
        assert_eq!(s.l(), 2);
        assert!(s.polys[1..].iter().all(|p| p.len() == 1));
        assert_eq!(s.expand().unwrap(), f);
    }

    #[test]
    fn pure_fc() {
        let f = sum(&[("", 0.1), ("Z0", 0.6), ("Z1", 0.8), ("Z0 Z1", 0.3)], 2);
        let s = factor_noncontextual(&f).unwrap();
        assert_eq!(s.l(), 0);
        assert_eq!(s.k(), 2);
        assert_eq!(s.polys[0].len(), 4);
        assert_eq!(s.expand().unwrap(), f);
    }

    #[test]
    fn classes_with_group_parts() {
        // Z2 in Z; classes {X0, X0 Z1} and {Z0}.
        let f = sum(&[("X0", 1.0), ("X0 Z1", 0.5), ("Z0", -0.25), ("Z2", 0.125), ("Y0 Z1", 0.3)], 3);
        let s = factor_noncontextual(&f);
        // Y0 Z1 anticommutes with X0 and Z0 and commutes with nothing else in T,
        // so it is a third class.
        let s = s.unwrap();
        assert_eq!(s.l(), 3);
        assert!((s.expand().unwrap().max_difference(&f).unwrap().0) < 1e-15);
    }

    #[test]
    fn contextual_rejected() {
        let f = sum(&[("X0", 1.0), ("Z0", 1.0), ("X0 X1", 1.0), ("Z0 Z1", 1.0)], 2);
        assert!(matches!(factor_noncontextual(&f), Err(Error::ContextualInput)));
    }
}
