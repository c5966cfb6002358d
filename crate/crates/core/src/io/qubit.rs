use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use super::{check_format, json_metadata, parse_error, read_text, write_terms, Metadata};
use crate::error::{Error, Result};
use crate::pauli::{PauliSum, PauliWord};

pub const FORMAT: &str = "qubit-hamiltonian";

#[derive(Clone, Debug, PartialEq)]
pub struct QubitHamiltonianFile {
    pub metadata: Metadata,
    pub hamiltonian: PauliSum,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawTerm {
    pub coefficient: f64,
    pub pauli: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    format: String,
    version: u32,
    n_qubits: usize,
    #[serde(default)]
    metadata: Metadata,
    terms: Vec<RawTerm>,
}

pub(crate) fn terms_to_sum(n: usize, terms: &[RawTerm], field: &str) -> Result<PauliSum> {
    if n == 0 {
        return Err(Error::InvariantViolation("n_qubits must be positive".into()));
    }
    let mut seen = HashSet::with_capacity(terms.len());
    let mut out = Vec::with_capacity(terms.len());
    for (i, t) in terms.iter().enumerate() {
        let w = PauliWord::parse(&t.pauli, n)
            .map_err(|e| Error::InvariantViolation(format!("{field}[{i}].pauli: {e}")))?;
        if !seen.insert(w.clone()) {
            return Err(Error::InvariantViolation(format!(
                "{field}[{i}]: duplicate word `{w}`"
            )));
        }
        out.push((w, t.coefficient));
    }
    PauliSum::from_terms(n, out)
}

pub fn parse_qubit_hamiltonian(text: &str) -> Result<QubitHamiltonianFile> {
    let raw: Raw = serde_json::from_str(text).map_err(parse_error)?;
    check_format(&raw.format, FORMAT)?;
    if raw.version != 1 {
        return Err(Error::InvariantViolation(format!(
            "version: unsupported {}",
            raw.version
        )));
    }
    Ok(QubitHamiltonianFile {
        hamiltonian: terms_to_sum(raw.n_qubits, &raw.terms, "terms")?,
        metadata: raw.metadata,
    })
}

pub fn write_qubit_hamiltonian(f: &QubitHamiltonianFile) -> String {
    let mut out = String::new();
    out.push_str("{\n  \"format\": \"qubit-hamiltonian\",\n  \"version\": 1,\n");
    out.push_str(&format!("  \"n_qubits\": {},\n", f.hamiltonian.n_qubits()));
    out.push_str(&format!("  \"metadata\": {},\n", json_metadata(&f.metadata)));
    out.push_str("  \"terms\": ");
    write_terms(&mut out, &f.hamiltonian, "  ");
    out.push_str("\n}\n");
    out
}

pub fn load_qubit_hamiltonian(path: &Path) -> Result<QubitHamiltonianFile> {
    parse_qubit_hamiltonian(&read_text(path)?)
}
