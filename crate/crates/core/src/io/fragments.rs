use serde::Deserialize;

use super::qubit::{terms_to_sum, RawTerm};
use super::{check_format, json_string, parse_error, write_terms};
use crate::error::{Error, Result};
use crate::partition::{Method, Partition};
use crate::pauli::PauliSum;

pub const FRAGMENT_SCHEMA_VERSION: u32 = 1;
pub const FORMAT: &str = "fragment-set";

/// A qubit Hamiltonian split into fragments, as read back from disk.
#[derive(Clone, Debug, PartialEq)]
pub struct FragmentSetFile {
    pub method: Method,
    pub source_hash: String,
    pub fragments: Vec<PauliSum>,
}

impl From<&Partition> for FragmentSetFile {
    fn from(p: &Partition) -> FragmentSetFile {
        FragmentSetFile {
            method: p.method,
            source_hash: p.source_hash.clone(),
            fragments: p.fragments.clone(),
        }
    }
}

impl FragmentSetFile {
    pub fn into_partition(self) -> Partition {
        Partition {
            method: self.method,
            fragments: self.fragments,
            source_hash: self.source_hash,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFragment {
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    format: String,
    schema_version: u32,
    method: Method,
    source_hash: String,
    n_qubits: usize,
    fragments: Vec<RawFragment>,
}

pub fn parse_fragment_set(text: &str) -> Result<FragmentSetFile> {
    let raw: Raw = serde_json::from_str(text).map_err(parse_error)?;
    check_format(&raw.format, FORMAT)?;
    if raw.schema_version != FRAGMENT_SCHEMA_VERSION {
        return Err(Error::InvariantViolation(format!(
            "schema_version: unsupported {}",
            raw.schema_version
        )));
    }
    let fragments = raw
        .fragments
        .iter()
        .enumerate()
        .map(|(i, f)| terms_to_sum(raw.n_qubits, &f.terms, &format!("fragments[{i}].terms")))
        .collect::<Result<Vec<_>>>()?;
    Ok(FragmentSetFile {
        method: raw.method,
        source_hash: raw.source_hash,
        fragments,
    })
}

pub fn write_fragment_set(f: &FragmentSetFile) -> String {
    let n = f.fragments.first().map_or(0, PauliSum::n_qubits);
    let mut out = String::new();
    out.push_str("{\n  \"format\": \"fragment-set\",\n");
    out.push_str(&format!("  \"schema_version\": {FRAGMENT_SCHEMA_VERSION},\n"));
    out.push_str(&format!("  \"method\": \"{}\",\n", f.method));
    out.push_str(&format!("  \"source_hash\": {},\n", json_string(&f.source_hash)));
    out.push_str(&format!("  \"n_qubits\": {n},\n"));
    out.push_str("  \"fragments\": [");
    for (i, frag) in f.fragments.iter().enumerate() {
        out.push_str(if i == 0 { "\n    " } else { ",\n    " });
        out.push_str("{\"terms\": ");
        write_terms(&mut out, frag, "    ");
        out.push('}');
    }
    out.push_str(if f.fragments.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{greedy_partition, Criterion};
    use crate::pauli::PauliWord;

    #[test]
    fn roundtrip() {
        let h = PauliSum::from_terms(
            2,
            [("", 1.0), ("X0", 0.5), ("Z0", 0.25), ("Z1", 0.125)]
                .iter()
                .map(|(t, c)| (PauliWord::parse(t, 2).unwrap(), *c)),
        )
        .unwrap();
        let p = greedy_partition(&h, Criterion::Fc).unwrap();
        let text = write_fragment_set(&FragmentSetFile::from(&p));
        let back = parse_fragment_set(&text).unwrap();
        assert_eq!(back.into_partition(), p);
    }
}
