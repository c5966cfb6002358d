#![allow(dead_code)]

use std::path::PathBuf;

use solvfrag::fermion::TwoBodyTensor;
use solvfrag::io::{load_fermion_tensor, load_qubit_hamiltonian};
use solvfrag::{PauliSum, PauliWord};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn qubit_fixture(stem: &str) -> PauliSum {
    load_qubit_hamiltonian(&fixture_path(&format!("{stem}_qubit.json")))
        .unwrap()
        .hamiltonian
}

pub fn tensor_fixture(stem: &str) -> TwoBodyTensor {
    load_fermion_tensor(&fixture_path(&format!("{stem}_tensor.json")))
        .unwrap()
        .tensor
}

/// Commutation from the per-qubit letters: count sites where both words act
/// with different non-identity letters.
pub fn commute(a: &PauliWord, b: &PauliWord) -> bool {
    let clashes = (0..a.n_qubits())
        .filter(|&q| matches!((a.axis(q), b.axis(q)), (Some(x), Some(y)) if x != y))
        .count();
    clashes % 2 == 0
}

/// Row `i` has bit `j` set when words `i` and `j` commute.
pub fn commutation_masks(words: &[PauliWord]) -> Vec<u64> {
    assert!(words.len() <= 64);
    words
        .iter()
        .map(|a| {
            words
                .iter()
                .enumerate()
                .filter(|(_, b)| commute(a, b))
                .fold(0u64, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

/// Brute-force non-contextuality of the subset `set` (bitmask): drop the words
/// commuting with the whole subset, then commutation must be an equivalence
/// relation on the rest.
pub fn nc_subset(comm: &[u64], set: u64) -> bool {
    let members = || (0..comm.len()).filter(move |&i| set >> i & 1 == 1);
    let z = members().filter(|&i| comm[i] & set == set).fold(0u64, |m, i| m | 1 << i);
    let t = set & !z;
    members().filter(|&i| t >> i & 1 == 1).all(|i| {
        let class = comm[i] & t;
        (0..comm.len())
            .filter(|&j| class >> j & 1 == 1)
            .all(|j| comm[j] & t == class)
    })
}

/// Same test as [`nc_subset`] on a full word list of any length.
pub fn is_noncontextual(words: &[PauliWord]) -> bool {
    let m = words.len();
    let c: Vec<Vec<bool>> = words
        .iter()
        .map(|a| words.iter().map(|b| commute(a, b)).collect())
        .collect();
    let t: Vec<usize> = (0..m).filter(|&i| !c[i].iter().all(|&x| x)).collect();
    t.iter().all(|&i| {
        t.iter()
            .filter(|&&j| c[i][j])
            .all(|&j| t.iter().all(|&k| c[i][k] == c[j][k]))
    })
}

pub fn pairwise(words: &[PauliWord], commuting: bool) -> bool {
    words
        .iter()
        .enumerate()
        .all(|(i, a)| words[i + 1..].iter().all(|b| commute(a, b) == commuting))
}

/// Depth-first assignment of each term to fragment A or B, pruning as soon
/// as either side is contextual. Returns a witness split and the node count.
pub fn two_fragment_split(comm: &[u64]) -> (Option<(u64, u64)>, usize) {
    fn go(comm: &[u64], i: usize, a: u64, b: u64, nodes: &mut usize) -> Option<(u64, u64)> {
        *nodes += 1;
        if i == comm.len() {
            return Some((a, b));
        }
        let bit = 1u64 << i;
        if nc_subset(comm, a | bit) {
            if let Some(s) = go(comm, i + 1, a | bit, b, nodes) {
                return Some(s);
            }
        }
        // term 0 goes to A without loss of generality
        if i > 0 && nc_subset(comm, b | bit) {
            return go(comm, i + 1, a, b | bit, nodes);
        }
        None
    }
    let mut nodes = 0;
    let split = go(comm, 0, 0, 0, &mut nodes);
    (split, nodes)
}
