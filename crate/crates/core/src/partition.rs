//! Greedy partitioning of a Pauli Hamiltonian into solvable fragments.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contextuality::{decompose, NcDecomposition};
use crate::error::{Error, Result};
use crate::io::digest_pauli_sum;
use crate::pauli::{PauliSum, PauliWord, TAU_ZERO};

/// Fixed seed for the shuffled refinement passes, so results stay deterministic.
const SWEEP_SEED: u64 = 0x5eed;

/// Membership rule for a single greedy fragment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    /// Pairwise anticommuting.
    Ac,
    /// Pairwise commuting.
    Fc,
    /// Non-contextual.
    Nc,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Ac,
    Fc,
    Nc,
    /// Greedy FC followed by non-contextual merging of small fragments.
    Fnc,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Ac => "ac",
            Method::Fc => "fc",
            Method::Nc => "nc",
            Method::Fnc => "fnc",
        })
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Method> {
        match s.to_ascii_lowercase().as_str() {
            "ac" => Ok(Method::Ac),
            "fc" => Ok(Method::Fc),
            "nc" => Ok(Method::Nc),
            "fnc" => Ok(Method::Fnc),
            other => Err(Error::InvariantViolation(format!("unknown method `{other}`"))),
        }
    }
}

impl From<Criterion> for Method {
    fn from(c: Criterion) -> Method {
        match c {
            Criterion::Ac => Method::Ac,
            Criterion::Fc => Method::Fc,
            Criterion::Nc => Method::Nc,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition {
    pub method: Method,
    /// Fragments; the identity term, if any, sits in the first one.
    pub fragments: Vec<PauliSum>,
    /// SHA-256 of the canonical serialization of the input.
    pub source_hash: String,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// Sum of all fragments.
    pub fn reassemble(&self) -> Result<PauliSum> {
        let n = self.fragments.first().map_or(0, PauliSum::n_qubits);
        self.fragments
            .iter()
            .try_fold(PauliSum::new(n), |acc, f| acc.add(f))
    }
}

/// Incrementally maintained fragment under one criterion.
enum Group {
    Ac(Vec<PauliWord>),
    Fc(Vec<PauliWord>),
    Nc(NcDecomposition),
}

impl Group {
    fn new(criterion: Criterion, n: usize) -> Group {
        match criterion {
            Criterion::Ac => Group::Ac(Vec::new()),
            Criterion::Fc => Group::Fc(Vec::new()),
            Criterion::Nc => Group::Nc(NcDecomposition::empty(n)),
        }
    }

    fn try_insert(&mut self, w: &PauliWord) -> bool {
        match self {
            Group::Ac(ws) => {
                if ws.iter().all(|o| !o.commutes_unchecked(w)) {
                    ws.push(w.clone());
                    true
                } else {
                    false
                }
            }
            Group::Fc(ws) => {
                if ws.iter().all(|o| o.commutes_unchecked(w)) {
                    ws.push(w.clone());
                    true
                } else {
                    false
                }
            }
            // Terms are distinct and sizes uniform, so the only error paths
            // of try_insert cannot trigger here.
            Group::Nc(d) => d.try_insert(w).unwrap_or(false),
        }
    }
}

/// Terms without the identity, sorted by |coefficient| descending with the
/// canonical word order breaking ties.
fn sorted_terms(h: &PauliSum) -> Vec<(PauliWord, f64)> {
    let mut terms: Vec<(PauliWord, f64)> = h
        .iter()
        .filter(|(w, _)| !w.is_identity())
        .map(|(w, c)| (w.clone(), c))
        .collect();
    terms.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
    terms
}

fn assemble(
    h: &PauliSum,
    terms: &[(PauliWord, f64)],
    groups: &[Vec<usize>],
    method: Method,
) -> Result<Partition> {
    let n = h.n_qubits();
    let mut fragments = Vec::with_capacity(groups.len().max(1));
    for g in groups {
        fragments.push(PauliSum::from_terms(n, g.iter().map(|&i| terms[i].clone()))?);
    }
    let constant = h.constant();
    if constant != 0.0 {
        if fragments.is_empty() {
            fragments.push(PauliSum::new(n));
        }
        fragments[0].add_term(PauliWord::identity(n), constant)?;
    }
    Ok(Partition {
        method,
        fragments,
        source_hash: digest_pauli_sum(h),
    })
}

fn greedy_groups(
    n: usize,
    terms: &[(PauliWord, f64)],
    criterion: Criterion,
) -> Vec<Vec<usize>> {
    let mut assigned = vec![false; terms.len()];
    let mut groups = Vec::new();
    let mut start = 0;
    while start < terms.len() {
        if assigned[start] {
            start += 1;
            continue;
        }
        let mut group = Group::new(criterion, n);
        let mut members = Vec::new();
        for j in start..terms.len() {
            if !assigned[j] && group.try_insert(&terms[j].0) {
                assigned[j] = true;
                members.push(j);
            }
        }
        groups.push(members);
    }
    groups
}

/// Greedy partition with one sweep per fragment.
pub fn greedy_partition(h: &PauliSum, criterion: Criterion) -> Result<Partition> {
    greedy_partition_with_sweeps(h, criterion, 1)
}

/// Greedy partition refined by `sweeps - 1` extra passes. Each pass re-runs
/// the greedy sweep with the terms listed fragment by fragment from the
/// previous result (fragment order cycling through largest-first, reversed,
/// and a seeded shuffle). Because every criterion is hereditary, a pass never increases
/// the fragment count.
pub fn greedy_partition_with_sweeps(
    h: &PauliSum,
    criterion: Criterion,
    sweeps: usize,
) -> Result<Partition> {
    if h.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let n = h.n_qubits();
    let terms = sorted_terms(h);
    let mut groups = greedy_groups(n, &terms, criterion);
    let mut rng = ChaCha8Rng::seed_from_u64(SWEEP_SEED);

    for pass in 1..sweeps.max(1) {
        let mut order: Vec<&Vec<usize>> = groups.iter().collect();
        match pass % 3 {
            1 => order.sort_by_key(|g| std::cmp::Reverse(g.len())),
            2 => order.reverse(),
            _ => order.shuffle(&mut rng),
        }
        let perm: Vec<usize> = order.into_iter().flatten().copied().collect();
        let reordered: Vec<(PauliWord, f64)> = perm.iter().map(|&i| terms[i].clone()).collect();
        let next: Vec<Vec<usize>> = greedy_groups(n, &reordered, criterion)
            .into_iter()
            .map(|g| g.into_iter().map(|j| perm[j]).collect())
            .collect();
        debug_assert!(next.len() <= groups.len());
        groups = next;
    }
    for g in &mut groups {
        g.sort_unstable();
    }
    groups.sort_by_key(|g| g[0]);
    assemble(h, &terms, &groups, criterion.into())
}

/// Fully-commuting partition improved by moving words of smaller fragments
/// into larger ones whenever the receiver stays non-contextual.
pub fn fnc_partition(h: &PauliSum) -> Result<Partition> {
    if h.is_empty() {
        return Err(Error::EmptyHamiltonian);
    }
    let n = h.n_qubits();
    let terms = sorted_terms(h);
    let mut groups = greedy_groups(n, &terms, Criterion::Fc);
    // Ascending by term count; stable, so ties keep greedy order.
    groups.sort_by_key(Vec::len);

    let mut states: Vec<NcDecomposition> = groups
        .iter()
        .map(|g| {
            let mut d = NcDecomposition::empty(n);
            for &i in g {
                d.try_insert(&terms[i].0).expect("distinct words");
            }
            d
        })
        .collect();

    let m = groups.len();
    for donor in 0..m {
        let words = std::mem::take(&mut groups[donor]);
        let mut keep = Vec::new();
        for i in words {
            let target = (donor + 1..m)
                .rev()
                .find(|&r| states[r].try_insert(&terms[i].0).unwrap_or(false));
            match target {
                Some(r) => groups[r].push(i),
                None => keep.push(i),
            }
        }
        groups[donor] = keep;
    }
    groups.retain(|g| !g.is_empty());
    groups.reverse();
    assemble(h, &terms, &groups, Method::Fnc)
}

/// Runs the method named by `method`.
pub fn partition(h: &PauliSum, method: Method, sweeps: usize) -> Result<Partition> {
    match method {
        Method::Ac => greedy_partition_with_sweeps(h, Criterion::Ac, sweeps),
        Method::Fc => greedy_partition_with_sweeps(h, Criterion::Fc, sweeps),
        Method::Nc => greedy_partition_with_sweeps(h, Criterion::Nc, sweeps),
        Method::Fnc => fnc_partition(h),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FragmentCertificate {
    pub index: usize,
    pub terms: usize,
    pub one_norm: f64,
    pub criterion_ok: bool,
    pub certificate: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionReport {
    pub method: Method,
    pub fragments: Vec<FragmentCertificate>,
    pub sum_ok: bool,
    pub max_discrepancy: f64,
    /// Word with the largest reassembly discrepancy, when the sum check fails.
    pub discrepancy_at: Option<String>,
    pub disjoint: bool,
    pub passed: bool,
}

fn certify(words: &[PauliWord], method: Method) -> (bool, String) {
    match method {
        Method::Ac => {
            let ok = words
                .iter()
                .enumerate()
                .all(|(i, a)| words[i + 1..].iter().all(|b| !a.commutes_unchecked(b)));
            (ok, format!("{} words pairwise anticommuting: {ok}", words.len()))
        }
        Method::Fc => {
            let ok = words
                .iter()
                .enumerate()
                .all(|(i, a)| words[i + 1..].iter().all(|b| a.commutes_unchecked(b)));
            (ok, format!("{} words pairwise commuting: {ok}", words.len()))
        }
        Method::Nc | Method::Fnc => {
            if words.is_empty() {
                return (true, "empty".into());
            }
            match decompose(words) {
                Ok(d) => {
                    let ok = d.is_noncontextual && d.verify();
                    (
                        ok,
                        format!(
                            "|Z| = {}, {} classes, non-contextual: {ok}",
                            d.z_set.len(),
                            d.classes.len()
                        ),
                    )
                }
                Err(e) => (false, e.to_string()),
            }
        }
    }
}

/// Checks reassembly, term-disjointness, and the per-fragment criterion.
pub fn verify_partition(p: &Partition, h: &PauliSum) -> PartitionReport {
    let mut fragments = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut disjoint = true;
    for (index, f) in p.fragments.iter().enumerate() {
        let words: Vec<PauliWord> = f.words().filter(|w| !w.is_identity()).cloned().collect();
        for w in &words {
            disjoint &= seen.insert(w.clone());
        }
        let (criterion_ok, certificate) = certify(&words, p.method);
        fragments.push(FragmentCertificate {
            index,
            terms: f.len(),
            one_norm: f.one_norm(),
            criterion_ok,
            certificate,
        });
    }
    let (sum_ok, max_discrepancy, discrepancy_at) = match p.reassemble() {
        Ok(total) => match total.max_difference(h) {
            Ok((d, w)) => (d <= TAU_ZERO, d, w.filter(|_| d > TAU_ZERO).map(|w| w.to_string())),
            Err(e) => (false, f64::INFINITY, Some(e.to_string())),
        },
        Err(e) => (false, f64::INFINITY, Some(e.to_string())),
    };
    let passed = sum_ok && disjoint && fragments.iter().all(|f| f.criterion_ok);
    PartitionReport {
        method: p.method,
        fragments,
        sum_ok,
        max_discrepancy,
        discrepancy_at,
        disjoint,
        passed,
    }
}
