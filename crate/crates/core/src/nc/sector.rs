use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::PauliWord;

use super::clifford::{build_tapering_clifford, reduce_to_single_z, CliffordTableau, Gate};
use super::exponent::Exponent;
use super::structure::NonContextualStructure;

/// Largest `K` for which full sector enumeration runs without forcing.
pub const SECTOR_LIMIT: usize = 20;

/// Analytic data of one symmetry sector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorSolution {
    /// Eigenvalues `±1` of the generators.
    pub v: Vec<i8>,
    /// `p_0(v), p_1(v), ..., p_L(v)`.
    pub p_values: Vec<f64>,
    /// `sqrt(Σ_{i≥1} p_i(v)²)`.
    pub a: f64,
    /// `θ_1..θ_{L-1}` for the representatives as given.
    pub thetas: Vec<f64>,
    pub energies: (f64, f64),
}

fn neg_mask(v: &[i8]) -> Result<Exponent> {
    let mut neg = Exponent::zero();
    for (k, &x) in v.iter().enumerate() {
        match x {
            1 => {}
            -1 => neg.flip(k),
            other => {
                return Err(Error::PreconditionViolated(format!(
                    "sector entry {other} is not ±1"
                )))
            }
        }
    }
    Ok(neg)
}

/// Angles reducing `Σ q_i R_i` to `a · R_L`: `θ_1 = atan2(q_1, q_L)`, then
/// `θ_j = atan2(q_j, r_{j-1})` with `r_j = hypot(r_{j-1}, q_j)`.
pub(crate) fn rotation_angles(q: &[f64]) -> (f64, Vec<f64>) {
    let a = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let Some((&last, rest)) = q.split_last() else {
        return (0.0, Vec::new());
    };
    let mut r = last;
    let mut thetas = Vec::with_capacity(rest.len());
    for &qj in rest {
        let t = if qj == 0.0 && r == 0.0 { 0.0 } else { qj.atan2(r) };
        thetas.push(t);
        r = qj.hypot(r);
    }
    (a, thetas)
}

/// Applies the rotations to a coefficient vector: step `j` maps
/// `(q_j, q_L) ↦ (q_j cos θ_j − q_L sin θ_j, q_j sin θ_j + q_L cos θ_j)`.
pub fn rotate_coefficients(q: &[f64], thetas: &[f64]) -> Vec<f64> {
    let mut out = q.to_vec();
    let l = out.len();
    for (j, &t) in thetas.iter().enumerate() {
        let (s, c) = t.sin_cos();
        let (qj, ql) = (out[j], out[l - 1]);
        out[j] = qj * c - ql * s;
        out[l - 1] = qj * s + ql * c;
    }
    out
}

pub fn evaluate_sector(s: &NonContextualStructure, v: &[i8]) -> Result<SectorSolution> {
    if v.len() != s.k() {
        return Err(Error::BadSectorLength {
            expected: s.k(),
            got: v.len(),
        });
    }
    let neg = neg_mask(v)?;
    let p_values: Vec<f64> = s.polys.iter().map(|p| p.eval(&neg)).collect();
    let (a, thetas) = rotation_angles(&p_values[1..]);
    let p0 = p_values[0];
    Ok(SectorSolution {
        v: v.to_vec(),
        p_values,
        a,
        thetas,
        energies: (p0 - a, p0 + a),
    })
}

/// Sector labels in index order; bit `k` of the index set means `v_k = -1`.
pub fn sector_vectors(k: usize) -> impl Iterator<Item = Vec<i8>> {
    let count: u64 = if k >= 64 { u64::MAX } else { 1u64 << k };
    (0..count).map(move |i| {
        (0..k)
            .map(|b| if b < 64 && i >> b & 1 == 1 { -1 } else { 1 })
            .collect()
    })
}

/// Eigenvalues with multiplicities, ascending, equal values merged.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub levels: Vec<(f64, u128)>,
}

impl Spectrum {
    pub fn ground(&self) -> f64 {
        self.levels.first().map_or(f64::NAN, |l| l.0)
    }

    pub fn dimension(&self) -> u128 {
        self.levels.iter().map(|l| l.1).sum()
    }

    /// Every eigenvalue repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.levels
            .iter()
            .flat_map(|&(e, m)| std::iter::repeat_n(e, m as usize))
            .collect()
    }

    fn from_raw(mut raw: Vec<(f64, u128)>) -> Spectrum {
        raw.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut levels: Vec<(f64, u128)> = Vec::new();
        for (e, m) in raw {
            match levels.last_mut() {
                Some(last) if (e - last.0).abs() <= 1e-12 * last.0.abs().max(1.0) => last.1 += m,
                _ => levels.push((e, m)),
            }
        }
        Spectrum { levels }
    }
}

pub fn fragment_spectrum(s: &NonContextualStructure) -> Result<Spectrum> {
    if s.k() > SECTOR_LIMIT {
        return Err(Error::SectorLimit {
            k: s.k(),
            limit: SECTOR_LIMIT,
        });
    }
    fragment_spectrum_forced(s)
}

/// Full spectrum without the sector-count guard.
pub fn fragment_spectrum_forced(s: &NonContextualStructure) -> Result<Spectrum> {
    let free = s.n_qubits - s.k();
    if free >= 127 {
        return Err(Error::PreconditionViolated("sector dimension exceeds 2^126".into()));
    }
    let dim = 1u128 << free;
    let mut raw = Vec::new();
    for v in sector_vectors(s.k()) {
        let sol = evaluate_sector(s, &v)?;
        let p0 = sol.p_values[0];
        if s.l() == 0 || sol.a == 0.0 {
            raw.push((p0, dim));
        } else {
            raw.push((p0 - sol.a, dim / 2));
            raw.push((p0 + sol.a, dim / 2));
        }
    }
    Ok(Spectrum::from_raw(raw))
}

/// Lowest analytic eigenvalue, `min_v (p_0(v) − a(v))`, scanning sectors lazily.
pub fn ground_energy(s: &NonContextualStructure) -> Result<f64> {
    let mut best = f64::INFINITY;
    for v in sector_vectors(s.k()) {
        best = best.min(evaluate_sector(s, &v)?.energies.0);
    }
    Ok(best)
}

/// Per-sector rotation data of the conditioned diagonalizer.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectorRotation {
    pub v: Vec<i8>,
    pub p0: f64,
    pub a: f64,
    /// Coefficients of the reduced representatives in this sector.
    pub coefficients: Vec<f64>,
    /// `θ_j` for the rotations `exp(θ_j/2 · R_L R_j)`, applied `j = 1` first.
    pub thetas: Vec<f64>,
}

/// Description of `R̂ V̂ Û_T` with `V̂ = Σ_v |v⟩⟨v| ⊗ Û_v`.
#[derive(Clone, Debug)]
pub struct ConditionedDiagonalizer {
    pub n_qubits: usize,
    pub k: usize,
    pub tableau: CliffordTableau,
    /// Images of the representatives with the symmetry-qubit factors removed.
    pub reduced_reps: Vec<PauliWord>,
    /// Symmetry qubits carrying a `Z` in each representative image.
    pub rep_masks: Vec<Exponent>,
    /// Sign of each representative image.
    pub rep_signs: Vec<f64>,
    /// Gates of `R̂`, sending `R_L` to `Z` on `z_qubit`.
    pub final_gates: Vec<Gate>,
    pub z_qubit: Option<usize>,
    structure: NonContextualStructure,
}

impl ConditionedDiagonalizer {
    pub fn structure(&self) -> &NonContextualStructure {
        &self.structure
    }

    /// Rotation data for sector `v`.
    pub fn sector(&self, v: &[i8]) -> Result<SectorRotation> {
        let sol = evaluate_sector(&self.structure, v)?;
        let neg = neg_mask(v)?;
        let coefficients: Vec<f64> = (0..self.reduced_reps.len())
            .map(|i| {
                let sign = if self.rep_masks[i].odd_overlap(&neg) { -1.0 } else { 1.0 };
                sol.p_values[i + 1] * self.rep_signs[i] * sign
            })
            .collect();
        let (a, thetas) = rotation_angles(&coefficients);
        Ok(SectorRotation {
            v: v.to_vec(),
            p0: sol.p_values[0],
            a,
            coefficients,
            thetas,
        })
    }

    /// All sectors, refused above [`SECTOR_LIMIT`] generators.
    pub fn sectors(&self) -> Result<Vec<SectorRotation>> {
        if self.k > SECTOR_LIMIT {
            return Err(Error::SectorLimit {
                k: self.k,
                limit: SECTOR_LIMIT,
            });
        }
        sector_vectors(self.k).map(|v| self.sector(&v)).collect()
    }
}

pub fn conditioned_diagonalizer(s: &NonContextualStructure) -> Result<ConditionedDiagonalizer> {
    let tableau = build_tapering_clifford(s)?;
    let k = s.k();
    let mut reduced_reps = Vec::with_capacity(s.l());
    let mut rep_masks = Vec::with_capacity(s.l());
    let mut rep_signs = Vec::with_capacity(s.l());
    for r in &s.reps {
        let (sign, mut img) = tableau.apply(r)?;
        let mut mask = Exponent::zero();
        for q in 0..k {
            if img.z_bit(q) {
                mask.flip(q);
                img.set_bits(q, false, false);
            }
        }
        reduced_reps.push(img);
        rep_masks.push(mask);
        rep_signs.push(sign);
    }
    let (final_gates, z_qubit) = match reduced_reps.last() {
        Some(rl) => {
            let (g, q) = reduce_to_single_z(rl)?;
            (g, Some(q))
        }
        None => (Vec::new(), None),
    };
    Ok(ConditionedDiagonalizer {
        n_qubits: s.n_qubits,
        k,
        tableau,
        reduced_reps,
        rep_masks,
        rep_signs,
        final_gates,
        z_qubit,
        structure: s.clone(),
    })
}
