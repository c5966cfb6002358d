use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{check_format, parse_error, sha256_hex, write_fermion_tensor, FermionTensorFile, Metadata};
use crate::error::{Error, Result};
use crate::fermion::{
    gmf_fragment_tensor, GfroFragment, GmfFragment, LrFragment, OrbitalRotation, TwoBodyTensor,
};

pub const FORMAT: &str = "fermion-fragment-set";
pub const FERMION_FRAGMENT_SCHEMA_VERSION: u32 = 1;

/// One fragment with matrices stored as nested row arrays.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FermionFragmentRecord {
    Lr {
        eps: f64,
        l_matrix: Vec<Vec<f64>>,
    },
    Gfro {
        angles: Vec<f64>,
        lam: Vec<Vec<f64>>,
    },
    Gmf {
        s1: Vec<usize>,
        s2: Vec<usize>,
        angles: Vec<f64>,
        h_k: Vec<Vec<Vec<f64>>>,
        lam: Vec<Vec<f64>>,
    },
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn matrix(rows: &[Vec<f64>], n: usize, field: &str) -> Result<DMatrix<f64>> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvariantViolation(format!("{field}: expected {n}×{n}")));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

fn symmetric(m: DMatrix<f64>, field: &str) -> Result<DMatrix<f64>> {
    let asym = (&m - m.transpose()).amax();
    if asym > 1e-12 {
        return Err(Error::InvariantViolation(format!("{field}: not symmetric")));
    }
    Ok(m)
}

impl From<&LrFragment> for FermionFragmentRecord {
    fn from(f: &LrFragment) -> Self {
        FermionFragmentRecord::Lr {
            eps: f.eps,
            l_matrix: rows(&f.l_matrix),
        }
    }
}

impl From<&GfroFragment> for FermionFragmentRecord {
    fn from(f: &GfroFragment) -> Self {
        FermionFragmentRecord::Gfro {
            angles: f.u.angles().to_vec(),
            lam: rows(&f.lam),
        }
    }
}

impl From<&GmfFragment> for FermionFragmentRecord {
    fn from(f: &GmfFragment) -> Self {
        FermionFragmentRecord::Gmf {
            s1: f.s1.clone(),
            s2: f.s2.clone(),
            angles: f.u_t.angles().to_vec(),
            h_k: f.h_k.iter().map(rows).collect(),
            lam: rows(&f.lam),
        }
    }
}

impl FermionFragmentRecord {
    /// Two-body tensor of the fragment on `n` spin orbitals.
    pub fn tensor(&self, n: usize) -> Result<TwoBodyTensor> {
        Ok(match self {
            FermionFragmentRecord::Lr { eps, l_matrix } => LrFragment {
                n,
                eps: *eps,
                l_matrix: matrix(l_matrix, n, "l_matrix")?,
            }
            .tensor(),
            FermionFragmentRecord::Gfro { .. } => self.gfro(n)?.tensor(),
            FermionFragmentRecord::Gmf { .. } => gmf_fragment_tensor(&self.gmf(n)?),
        })
    }

    pub fn gfro(&self, n: usize) -> Result<GfroFragment> {
        match self {
            FermionFragmentRecord::Gfro { angles, lam } => Ok(GfroFragment {
                n,
                u: OrbitalRotation::from_angles(n, angles.clone())?,
                lam: symmetric(matrix(lam, n, "lam")?, "lam")?,
            }),
            _ => Err(Error::InvariantViolation("kind: expected gfro".into())),
        }
    }

    pub fn gmf(&self, n: usize) -> Result<GmfFragment> {
        match self {
            FermionFragmentRecord::Gmf {
                s1,
                s2,
                angles,
                h_k,
                lam,
            } => {
                crate::fermion::MfModel::new(n, s1.clone(), s2.clone())?;
                if h_k.len() != s2.len() {
                    return Err(Error::InvariantViolation(format!(
                        "h_k: expected {} matrices",
                        s2.len()
                    )));
                }
                Ok(GmfFragment {
                    n,
                    s1: s1.clone(),
                    s2: s2.clone(),
                    u_t: OrbitalRotation::from_angles(n, angles.clone())?,
                    h_k: h_k
                        .iter()
                        .map(|h| symmetric(matrix(h, s1.len(), "h_k")?, "h_k"))
                        .collect::<Result<_>>()?,
                    lam: symmetric(matrix(lam, s2.len(), "lam")?, "lam")?,
                })
            }
            FermionFragmentRecord::Gfro { .. } => Ok(self.gfro(n)?.into()),
            _ => Err(Error::InvariantViolation("kind: expected gmf".into())),
        }
    }
}

/// A decomposed fermionic tensor with its run settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionFragmentFile {
    pub format: String,
    pub schema_version: u32,
    pub method: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub source_hash: String,
    pub n_spin_orbitals: usize,
    /// Two-body fragments plus one for a nonzero one-body part.
    pub table_count: usize,
    pub converged: bool,
    pub residual_trace: Vec<f64>,
    pub fragments: Vec<FermionFragmentRecord>,
}

impl FermionFragmentFile {
    /// Sum of all fragment tensors.
    pub fn reassembled(&self) -> Result<TwoBodyTensor> {
        let n = self.n_spin_orbitals;
        self.fragments
            .iter()
            .try_fold(TwoBodyTensor::zeros(n), |acc, f| acc.add(&f.tensor(n)?))
    }
}

pub fn parse_fermion_fragments(text: &str) -> Result<FermionFragmentFile> {
    let f: FermionFragmentFile = serde_json::from_str(text).map_err(parse_error)?;
    check_format(&f.format, FORMAT)?;
    if f.schema_version != FERMION_FRAGMENT_SCHEMA_VERSION {
        return Err(Error::InvariantViolation(format!(
            "schema_version: unsupported {}",
            f.schema_version
        )));
    }
    for rec in &f.fragments {
        rec.tensor(f.n_spin_orbitals)?;
    }
    Ok(f)
}

pub fn write_fermion_fragments(f: &FermionFragmentFile) -> String {
    let mut s = serde_json::to_string_pretty(f).expect("fragment serialization");
    s.push('\n');
    s
}

/// Digest of a tensor: SHA-256 of its canonical file form without metadata.
pub fn digest_tensor(t: &TwoBodyTensor, constant: f64) -> String {
    let file = FermionTensorFile {
        constant,
        metadata: Metadata::new(),
        tensor: t.clone(),
    };
    sha256_hex(write_fermion_tensor(&file).as_bytes())
}
