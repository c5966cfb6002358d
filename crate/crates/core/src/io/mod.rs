//! File formats, canonical serialization, and model generators.
//!
//! All documents are JSON objects tagged with a `format` string and a
//! version. Writers are canonical: keys in fixed order, terms in canonical
//! word order, reals with 17 significant digits, so equal inputs give
//! byte-identical files and stable digests.

pub mod fermion_fragments;
pub mod fragments;
pub mod heisenberg;
pub mod qubit;
pub mod tensor;

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

pub use fermion_fragments::{
    digest_tensor, parse_fermion_fragments, write_fermion_fragments, FermionFragmentFile,
    FermionFragmentRecord, FERMION_FRAGMENT_SCHEMA_VERSION,
};
pub use fragments::{
    parse_fragment_set, write_fragment_set, FragmentSetFile, FRAGMENT_SCHEMA_VERSION,
};
pub use heisenberg::{heisenberg_model, HeisenbergSpec};
pub use qubit::{
    load_qubit_hamiltonian, parse_qubit_hamiltonian, write_qubit_hamiltonian, QubitHamiltonianFile,
};
pub use tensor::{load_fermion_tensor, parse_fermion_tensor, write_fermion_tensor, FermionTensorFile};

pub type Metadata = BTreeMap<String, Value>;

/// Real number with 17 significant digits, valid as a JSON number.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

pub(crate) fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

pub(crate) fn json_metadata(m: &Metadata) -> String {
    serde_json::to_string(m).expect("metadata serialization")
}

pub(crate) fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub(crate) fn check_format(found: &str, want: &str) -> Result<()> {
    if found == want {
        Ok(())
    } else {
        Err(Error::InvariantViolation(format!(
            "format: expected `{want}`, found `{found}`"
        )))
    }
}

/// Canonical `[{"coefficient": c, "pauli": "..."}]` lines for a sum.
pub(crate) fn write_terms(out: &mut String, h: &PauliSum, indent: &str) {
    if h.is_empty() {
        out.push_str("[]");
        return;
    }
    out.push_str("[\n");
    let last = h.len() - 1;
    for (i, (w, c)) in h.iter().enumerate() {
        out.push_str(indent);
        out.push_str("  {\"coefficient\": ");
        out.push_str(&fmt_real(c));
        out.push_str(", \"pauli\": ");
        out.push_str(&json_string(&w.to_string()));
        out.push('}');
        if i != last {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

/// Hex SHA-256 of bytes.
pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Digest of a Pauli sum: SHA-256 of its canonical file form without metadata.
pub fn digest_pauli_sum(h: &PauliSum) -> String {
    let file = QubitHamiltonianFile {
        metadata: Metadata::new(),
        hamiltonian: h.clone(),
    };
    sha256_hex(write_qubit_hamiltonian(&file).as_bytes())
}

pub fn read_text(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

/// Peeks at the `format` tag of a document.
pub fn document_format(text: &str) -> Result<String> {
    #[derive(serde::Deserialize)]
    struct Tag {
        format: String,
    }
    let tag: Tag = serde_json::from_str(text).map_err(parse_error)?;
    Ok(tag.format)
}
