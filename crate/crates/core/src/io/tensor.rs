use std::path::Path;

use nalgebra::DMatrix;
use serde::Deserialize;

use super::{check_format, fmt_real, json_metadata, parse_error, read_text, Metadata};
use crate::error::{Error, Result};
use crate::fermion::TwoBodyTensor;

pub const FORMAT: &str = "fermion-tensor";

#[derive(Clone, Debug, PartialEq)]
pub struct FermionTensorFile {
    /// Scalar added to the operator (nuclear repulsion for molecules).
    pub constant: f64,
    pub metadata: Metadata,
    pub tensor: TwoBodyTensor,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Raw {
    format: String,
    version: u32,
    n_spin_orbitals: usize,
    #[serde(default)]
    constant: f64,
    #[serde(default)]
    metadata: Metadata,
    h: Vec<Vec<f64>>,
    g: Vec<Vec<Vec<Vec<f64>>>>,
}

fn shape_error(field: &str, n: usize) -> Error {
    Error::InvariantViolation(format!("{field}: every axis must have length {n}"))
}

pub fn parse_fermion_tensor(text: &str) -> Result<FermionTensorFile> {
    let raw: Raw = serde_json::from_str(text).map_err(parse_error)?;
    check_format(&raw.format, FORMAT)?;
    if raw.version != 1 {
        return Err(Error::InvariantViolation(format!(
            "version: unsupported {}",
            raw.version
        )));
    }
    let n = raw.n_spin_orbitals;
    if raw.h.len() != n || raw.h.iter().any(|r| r.len() != n) {
        return Err(shape_error("h", n));
    }
    let mut flat = Vec::with_capacity(n.pow(4));
    if raw.g.len() != n {
        return Err(shape_error("g", n));
    }
    for a in &raw.g {
        if a.len() != n {
            return Err(shape_error("g", n));
        }
        for b in a {
            if b.len() != n {
                return Err(shape_error("g", n));
            }
            for c in b {
                if c.len() != n {
                    return Err(shape_error("g", n));
                }
                flat.extend_from_slice(c);
            }
        }
    }
    let h = DMatrix::from_fn(n, n, |i, j| raw.h[i][j]);
    let tensor = TwoBodyTensor::new(n, h, &flat).map_err(|e| match e {
        Error::AsymmetricSupermatrix(a) => {
            Error::InvariantViolation(format!("g_pqrs = g_rspq violated by {a:e}"))
        }
        Error::NonSymmetricInput(a) => {
            Error::InvariantViolation(format!("h_pq = h_qp violated by {a:e}"))
        }
        other => other,
    })?;
    Ok(FermionTensorFile {
        constant: raw.constant,
        metadata: raw.metadata,
        tensor,
    })
}

fn push_row(out: &mut String, row: impl Iterator<Item = f64>) {
    out.push('[');
    for (i, v) in row.enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&fmt_real(v));
    }
    out.push(']');
}

pub fn write_fermion_tensor(f: &FermionTensorFile) -> String {
    let t = &f.tensor;
    let n = t.n();
    let mut out = String::new();
    out.push_str("{\n  \"format\": \"fermion-tensor\",\n  \"version\": 1,\n");
    out.push_str(&format!("  \"n_spin_orbitals\": {n},\n"));
    out.push_str(&format!("  \"constant\": {},\n", fmt_real(f.constant)));
    out.push_str(&format!("  \"metadata\": {},\n", json_metadata(&f.metadata)));
    out.push_str("  \"h\": [");
    for p in 0..n {
        out.push_str(if p == 0 { "\n    " } else { ",\n    " });
        push_row(&mut out, (0..n).map(|q| t.h()[(p, q)]));
    }
    out.push_str("\n  ],\n  \"g\": [");
    for p in 0..n {
        out.push_str(if p == 0 { "\n    [" } else { ",\n    [" });
        for q in 0..n {
            out.push_str(if q == 0 { "\n      [" } else { ",\n      [" });
            for r in 0..n {
                out.push_str(if r == 0 { "\n        " } else { ",\n        " });
                push_row(&mut out, (0..n).map(|s| t.g(p, q, r, s)));
            }
            out.push_str("\n      ]");
        }
        out.push_str("\n    ]");
    }
    out.push_str("\n  ]\n}\n");
    out
}

pub fn load_fermion_tensor(path: &Path) -> Result<FermionTensorFile> {
    parse_fermion_tensor(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(g0110: f64, g1001: f64) -> String {
        let mut g = vec![vec![vec![vec![0.0; 2]; 2]; 2]; 2];
        g[0][1][1][0] = g0110;
        g[1][0][0][1] = g1001;
        g[0][0][1][1] = 0.25;
        g[1][1][0][0] = 0.25;
        serde_json::json!({
            "format": "fermion-tensor", "version": 1, "n_spin_orbitals": 2,
            "constant": 0.7, "metadata": {"molecule": "toy"},
            "h": [[-1.0, 0.1], [0.1, -0.5]], "g": g
        })
        .to_string()
    }

    #[test]
    fn roundtrip() {
        let f = parse_fermion_tensor(&doc(0.3, 0.3)).unwrap();
        assert_eq!(f.tensor.g(0, 0, 1, 1), 0.25);
        let once = write_fermion_tensor(&f);
        let back = parse_fermion_tensor(&once).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_fermion_tensor(&back), once);
    }

    #[test]
    fn asymmetry_is_rejected() {
        assert!(matches!(
            parse_fermion_tensor(&doc(0.3, 0.3 + 1e-6)),
            Err(Error::InvariantViolation(m)) if m.contains("g_pqrs")
        ));
        assert!(parse_fermion_tensor(&doc(0.3, 0.3 + 1e-10)).is_ok());
    }

    #[test]
    fn shape_is_checked() {
        let bad = doc(0.0, 0.0).replace("\"n_spin_orbitals\":2", "\"n_spin_orbitals\":3");
        assert!(matches!(parse_fermion_tensor(&bad), Err(Error::InvariantViolation(_))));
    }
}
