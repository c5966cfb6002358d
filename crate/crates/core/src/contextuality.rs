//! Non-contextuality test for sets of Pauli words.
//!
//! A set `S` is non-contextual when it splits as `Z ∪ T`, with `Z` the words
//! commuting with all of `S`, and commutation restricted to `T` is an
//! equivalence relation. The classes of that relation mutually anticommute.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::pauli::PauliWord;

#[derive(Clone, Debug, PartialEq)]
pub struct NcDecomposition {
    n_qubits: usize,
    /// Words commuting with every word in the set.
    pub z_set: Vec<PauliWord>,
    /// Commutation classes of the remaining words.
    pub classes: Vec<Vec<PauliWord>>,
    pub is_noncontextual: bool,
}

/// Splits `set` into its universally commuting part and commutation classes.
pub fn decompose(set: &[PauliWord]) -> Result<NcDecomposition> {
    let first = set.first().ok_or(Error::EmptyInput)?;
    let n = first.n_qubits();
    let mut seen = HashSet::with_capacity(set.len());
    for w in set {
        if w.n_qubits() != n {
            return Err(Error::SizeMismatch(n, w.n_qubits()));
        }
        if !seen.insert(w) {
            return Err(Error::DuplicateWord(w.to_string()));
        }
    }
    let mut words: Vec<&PauliWord> = set.iter().collect();
    words.sort();

    let mut z_set = Vec::new();
    let mut rest = Vec::new();
    for w in &words {
        if words.iter().all(|o| w.commutes_unchecked(o)) {
            z_set.push((*w).clone());
        } else {
            rest.push(*w);
        }
    }

    let mut classes: Vec<Vec<PauliWord>> = Vec::new();
    for w in rest {
        match classes.iter_mut().find(|c| c[0].commutes_unchecked(w)) {
            Some(c) => c.push(w.clone()),
            None => classes.push(vec![w.clone()]),
        }
    }

    let is_noncontextual = classes_consistent(&classes);
    Ok(NcDecomposition {
        n_qubits: n,
        z_set,
        classes,
        is_noncontextual,
    })
}

fn classes_consistent(classes: &[Vec<PauliWord>]) -> bool {
    for (i, ci) in classes.iter().enumerate() {
        for (a, wa) in ci.iter().enumerate() {
            if ci[a + 1..].iter().any(|wb| !wa.commutes_unchecked(wb)) {
                return false;
            }
            for cj in &classes[i + 1..] {
                if cj.iter().any(|wb| wa.commutes_unchecked(wb)) {
                    return false;
                }
            }
        }
    }
    true
}

impl NcDecomposition {
    /// Decomposition of the empty set.
    pub fn empty(n_qubits: usize) -> NcDecomposition {
        NcDecomposition {
            n_qubits,
            z_set: Vec::new(),
            classes: Vec::new(),
            is_noncontextual: true,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.z_set.len() + self.classes.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn words(&self) -> impl Iterator<Item = &PauliWord> + '_ {
        self.z_set.iter().chain(self.classes.iter().flatten())
    }

    /// Checks whether `w` can join the set without breaking non-contextuality.
    /// Returns the verdict and, when admitted, the updated decomposition.
    pub fn admits_insertion(&self, w: &PauliWord) -> Result<(bool, NcDecomposition)> {
        let mut next = self.clone();
        let ok = next.try_insert(w)?;
        if ok {
            Ok((true, next))
        } else {
            Ok((false, self.clone()))
        }
    }

    /// In-place form of [`admits_insertion`](Self::admits_insertion). Leaves
    /// `self` untouched and returns `false` when `w` would make the set
    /// contextual.
    pub fn try_insert(&mut self, w: &PauliWord) -> Result<bool> {
        if w.n_qubits() != self.n_qubits {
            return Err(Error::SizeMismatch(self.n_qubits, w.n_qubits()));
        }
        if !self.is_noncontextual {
            return Err(Error::PreconditionViolated(
                "insertion into a contextual decomposition".into(),
            ));
        }
        let mut anti_z = Vec::new();
        for (i, z) in self.z_set.iter().enumerate() {
            if z == w {
                return Err(Error::DuplicateWord(w.to_string()));
            }
            if !z.commutes_unchecked(w) {
                anti_z.push(i);
            }
        }

        if !anti_z.is_empty() {
            // Z words anticommuting with w move into T next to the existing class.
            match self.classes.len() {
                0 => {}
                1 => {
                    for m in &self.classes[0] {
                        if m == w {
                            return Err(Error::DuplicateWord(w.to_string()));
                        }
                        if m.commutes_unchecked(w) {
                            return Ok(false);
                        }
                    }
                }
                _ => return Ok(false),
            }
            let mut moved = Vec::with_capacity(anti_z.len());
            for &i in anti_z.iter().rev() {
                moved.push(self.z_set.remove(i));
            }
            moved.reverse();
            if self.classes.is_empty() {
                self.classes.push(moved);
            } else {
                self.classes[0].extend(moved);
            }
            self.classes.push(vec![w.clone()]);
            return Ok(true);
        }

        // w commutes with all of Z; it must commute with exactly one whole
        // class (or none) and anticommute with every member of the others.
        let mut home = None;
        let mut all_commute = true;
        for (ci, class) in self.classes.iter().enumerate() {
            let mut n_comm = 0usize;
            for m in class {
                if m == w {
                    return Err(Error::DuplicateWord(w.to_string()));
                }
                if m.commutes_unchecked(w) {
                    n_comm += 1;
                }
            }
            if n_comm == class.len() {
                if home.is_some() {
                    // Two classes commute with w; that is only fine if w
                    // commutes with everything, settled below.
                    home = Some(usize::MAX);
                } else {
                    home = Some(ci);
                }
            } else if n_comm != 0 {
                return Ok(false);
            } else {
                all_commute = false;
            }
        }
        if all_commute {
            self.z_set.push(w.clone());
            return Ok(true);
        }
        match home {
            None => self.classes.push(vec![w.clone()]),
            Some(usize::MAX) => return Ok(false),
            Some(ci) => self.classes[ci].push(w.clone()),
        }
        Ok(true)
    }

    /// Sorts the z set, each class, and the class list into canonical order.
    pub fn canonicalize(&mut self) {
        self.z_set.sort();
        for c in &mut self.classes {
            c.sort();
        }
        self.classes.sort();
    }

    /// Exhaustive check of all stated invariants of a non-contextual verdict.
    pub fn verify(&self) -> bool {
        let all: Vec<&PauliWord> = self.words().collect();
        let z_ok = self
            .z_set
            .iter()
            .all(|z| all.iter().all(|o| z.commutes_unchecked(o)));
        let t_ok = self
            .classes
            .iter()
            .flatten()
            .all(|t| all.iter().any(|o| !t.commutes_unchecked(o)));
        z_ok && t_ok && (!self.is_noncontextual || classes_consistent(&self.classes))
    }
}
