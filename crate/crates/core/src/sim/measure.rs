use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nc::ConditionedDiagonalizer;

use super::circuit::{apply_clifford, apply_pauli_rotation};
use super::dense::{DenseLimits, DenseOperator};

const NORM_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<StateVector> {
        if amps.len() != 1usize << n_qubits {
            return Err(Error::SizeMismatch(amps.len(), 1 << n_qubits));
        }
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::PreconditionViolated(format!("state norm {norm} ≠ 1")));
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub fn basis(n_qubits: usize, index: usize) -> StateVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    /// Gaussian random state from `seed`.
    pub fn random(n_qubits: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps: Vec<Complex64> = (0..1usize << n_qubits)
            .map(|_| Complex64::new(gauss(&mut rng), gauss(&mut rng)))
            .collect();
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|z| *z /= norm);
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn expectation(&self, op: &DenseOperator) -> f64 {
        op.expectation(&self.amps)
    }
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    Exact,
    Sampled,
}

/// One measurement outcome. In exact mode `weight` is its probability; in
/// sampled mode every shot has weight 1.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasurementRecord {
    pub v: Vec<i8>,
    pub thetas: Vec<f64>,
    pub m: i8,
    pub contribution: f64,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureOutcome {
    pub estimate: f64,
    /// Sample standard error (zero in exact mode).
    pub std_error: f64,
    /// Born probability of each sector, in sector-index order.
    pub sector_probabilities: Vec<f64>,
    pub records: Vec<MeasurementRecord>,
}

struct SectorBranch {
    v: Vec<i8>,
    thetas: Vec<f64>,
    p0: f64,
    a: f64,
    prob: f64,
    /// Probability of `m = +1` given the sector.
    p_plus: f64,
}

fn branches(d: &ConditionedDiagonalizer, state: &StateVector) -> Result<Vec<SectorBranch>> {
    let mut psi = state.amps.clone();
    apply_clifford(&mut psi, d.tableau.gates());
    let kmask = (1usize << d.k) - 1;
    let mut out = Vec::new();
    for (idx, rot) in d.sectors()?.into_iter().enumerate() {
        let mut part: Vec<Complex64> = psi
            .iter()
            .enumerate()
            .map(|(i, &z)| if i & kmask == idx { z } else { Complex64::new(0.0, 0.0) })
            .collect();
        let prob: f64 = part.iter().map(|z| z.norm_sqr()).sum();
        let mut p_plus = 1.0;
        if let (Some((rl, rest)), Some(zq)) = (d.reduced_reps.split_last(), d.z_qubit) {
            for (rj, &t) in rest.iter().zip(&rot.thetas) {
                apply_pauli_rotation(&mut part, rl, rj, t)?;
            }
            apply_clifford(&mut part, &d.final_gates);
            if prob > 0.0 {
                let plus: f64 = part
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| i >> zq & 1 == 0)
                    .map(|(_, z)| z.norm_sqr())
                    .sum();
                p_plus = (plus / prob).clamp(0.0, 1.0);
            }
        }
        out.push(SectorBranch {
            v: rot.v,
            thetas: rot.thetas,
            p0: rot.p0,
            a: rot.a,
            prob,
            p_plus,
        });
    }
    Ok(out)
}

/// Measures a non-contextual fragment on `state` by tapering, mid-circuit
/// measurement of the symmetry qubits, a classically conditioned rotation
/// and a final single-qubit `Z` measurement.
pub fn dynamic_measure(
    d: &ConditionedDiagonalizer,
    state: &StateVector,
    shots: usize,
    seed: u64,
    mode: MeasureMode,
    limits: &DenseLimits,
) -> Result<MeasureOutcome> {
    if d.n_qubits > limits.max_qubits {
        return Err(Error::DenseLimitExceeded {
            size: d.n_qubits,
            limit: limits.max_qubits,
        });
    }
    if state.n_qubits != d.n_qubits {
        return Err(Error::SizeMismatch(state.n_qubits, d.n_qubits));
    }
    let br = branches(d, state)?;
    let sector_probabilities = br.iter().map(|b| b.prob).collect();
    let record = |b: &SectorBranch, m: i8, weight: f64| MeasurementRecord {
        v: b.v.clone(),
        thetas: b.thetas.clone(),
        m,
        contribution: b.a * f64::from(m) + b.p0,
        weight,
    };
    match mode {
        MeasureMode::Exact => {
            let mut records = Vec::new();
            for b in &br {
                for (m, p) in [(1i8, b.p_plus), (-1, 1.0 - b.p_plus)] {
                    let w = b.prob * p;
                    if w > 0.0 {
                        records.push(record(b, m, w));
                    }
                }
            }
            let estimate = records.iter().map(|r| r.weight * r.contribution).sum();
            Ok(MeasureOutcome {
                estimate,
                std_error: 0.0,
                sector_probabilities,
                records,
            })
        }
        MeasureMode::Sampled => {
            if shots == 0 {
                return Err(Error::PreconditionViolated("shots must be positive".into()));
            }
            let mut records = Vec::with_capacity(shots);
            for shot in 0..shots {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(shot as u64);
                let u: f64 = rng.random();
                let mut acc = 0.0;
                let mut pick = br.len() - 1;
                for (i, b) in br.iter().enumerate() {
                    acc += b.prob;
                    if u < acc {
                        pick = i;
                        break;
                    }
                }
                let b = &br[pick];
                let m = if rng.random::<f64>() < b.p_plus { 1 } else { -1 };
                records.push(record(b, m, 1.0));
            }
            let n = shots as f64;
            let mean = records.iter().map(|r| r.contribution).sum::<f64>() / n;
            let var = if shots > 1 {
                records
                    .iter()
                    .map(|r| (r.contribution - mean).powi(2))
                    .sum::<f64>()
                    / (n - 1.0)
            } else {
                0.0
            };
            Ok(MeasureOutcome {
                estimate: mean,
                std_error: (var / n).sqrt(),
                sector_probabilities,
                records,
            })
        }
    }
}
