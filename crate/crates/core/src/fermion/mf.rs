use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::optim::{minimize, LbfgsOptions};
use super::rotation::{angle_gradient, diagonalize_one_body, generator_from, OrbitalRotation};
use super::tensor::TwoBodyTensor;

/// Mean-field solvable fragment
/// `Û†[Σ_ij (Σ_k h^(k)_ij n_k) a†_i a_j + Σ_kl λ_kl n_k n_l]Û`
/// with `i, j ∈ S_1` and `k, l ∈ S_2`.
#[derive(Clone, Debug, PartialEq)]
pub struct GmfFragment {
    pub n: usize,
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
    pub u_t: OrbitalRotation,
    /// `h_k[k]` is `h^(k)` over `S_1 × S_1`, one per element of `S_2`.
    pub h_k: Vec<DMatrix<f64>>,
    /// `λ` over `S_2 × S_2`.
    pub lam: DMatrix<f64>,
}

/// `Û†(Σ_pq λ_pq n_p n_q)Û`.
#[derive(Clone, Debug, PartialEq)]
pub struct GfroFragment {
    pub n: usize,
    pub u: OrbitalRotation,
    pub lam: DMatrix<f64>,
}

impl From<GfroFragment> for GmfFragment {
    fn from(f: GfroFragment) -> GmfFragment {
        GmfFragment {
            n: f.n,
            s1: Vec::new(),
            s2: (0..f.n).collect(),
            u_t: f.u,
            h_k: vec![DMatrix::zeros(0, 0); f.n],
            lam: f.lam,
        }
    }
}

impl GfroFragment {
    pub fn tensor(&self) -> TwoBodyTensor {
        gmf_fragment_tensor(&GmfFragment::from(self.clone()))
    }
}

/// Default split `S_1 = {0..n-K}`, `S_2 = {n-K..n}`.
pub fn default_split(n: usize, k: usize) -> (Vec<usize>, Vec<usize>) {
    ((0..n - k).collect(), (n - k..n).collect())
}

fn vec_index(n: usize, p: usize, q: usize) -> usize {
    p * n + q
}

/// Columns `vec(A_k)` and `vec(B_k)` with `A_k = Uᵀ H_k U`, `B_k = u_k u_kᵀ`.
fn y_matrix(u: &DMatrix<f64>, s1: &[usize], s2: &[usize], h_k: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n = u.nrows();
    let kk = s2.len();
    let us1 = u.select_rows(s1);
    let mut y = DMatrix::zeros(n * n, 2 * kk);
    for (k, &row) in s2.iter().enumerate() {
        if !s1.is_empty() {
            let a = us1.transpose() * &h_k[k] * &us1;
            for p in 0..n {
                for q in 0..n {
                    y[(vec_index(n, p, q), k)] = a[(p, q)];
                }
            }
        }
        for p in 0..n {
            for q in 0..n {
                y[(vec_index(n, p, q), kk + k)] = u[(row, p)] * u[(row, q)];
            }
        }
    }
    y
}

fn omega(lam: &DMatrix<f64>) -> DMatrix<f64> {
    let kk = lam.nrows();
    let mut w = DMatrix::zeros(2 * kk, 2 * kk);
    for k in 0..kk {
        w[(k, kk + k)] = 0.5;
        w[(kk + k, k)] = 0.5;
    }
    w.view_mut((kk, kk), (kk, kk)).copy_from(lam);
    w
}

/// Two-body tensor of a GMF fragment (no one-body part).
pub fn gmf_fragment_tensor(f: &GmfFragment) -> TwoBodyTensor {
    let u = f.u_t.matrix();
    let y = y_matrix(&u, &f.s1, &f.s2, &f.h_k);
    let g = &y * omega(&f.lam) * y.transpose();
    let g = (&g + g.transpose()) * 0.5;
    TwoBodyTensor::from_parts(DMatrix::zeros(f.n, f.n), g)
}

/// Energies of the fragment in the sector with occupations `v` on `S_2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GmfSectorSolution {
    /// Orbital energies `γ_i(v)` over `S_1`.
    pub gamma: Vec<f64>,
    /// `Σ_kl λ_kl v_k v_l`.
    pub constant: f64,
    /// Rotation of `S_1` diagonalizing `γ(v)`.
    pub rotation: OrbitalRotation,
}

impl GmfSectorSolution {
    /// `Σ_i γ_i m_i + constant` for every occupation `m` of `S_1`.
    pub fn energies(&self) -> Vec<f64> {
        let m = self.gamma.len();
        (0..1usize << m)
            .map(|occ| {
                self.constant
                    + (0..m)
                        .filter(|i| occ >> i & 1 == 1)
                        .map(|i| self.gamma[i])
                        .sum::<f64>()
            })
            .collect()
    }
}

pub fn solve_gmf_sector(f: &GmfFragment, v: &[u8]) -> Result<GmfSectorSolution> {
    if v.len() != f.s2.len() {
        return Err(Error::BadSectorLength {
            expected: f.s2.len(),
            got: v.len(),
        });
    }
    if let Some(&bad) = v.iter().find(|&&x| x > 1) {
        return Err(Error::PreconditionViolated(format!("occupation {bad} is not 0 or 1")));
    }
    let m = f.s1.len();
    let mut gamma = DMatrix::zeros(m, m);
    for (k, &vk) in v.iter().enumerate() {
        if vk == 1 {
            gamma += &f.h_k[k];
        }
    }
    let mut constant = 0.0;
    for (k, &vk) in v.iter().enumerate() {
        for (l, &vl) in v.iter().enumerate() {
            constant += f.lam[(k, l)] * f64::from(vk * vl);
        }
    }
    let (rotation, gamma) = diagonalize_one_body(&gamma)?;
    Ok(GmfSectorSolution {
        gamma,
        constant,
        rotation,
    })
}

/// All analytic eigenvalues of a fragment, ascending.
pub fn gmf_spectrum(f: &GmfFragment) -> Result<Vec<f64>> {
    let kk = f.s2.len();
    let mut out = Vec::with_capacity(1 << f.n);
    for occ in 0..1usize << kk {
        let v: Vec<u8> = (0..kk).map(|k| (occ >> k & 1) as u8).collect();
        out.extend(solve_gmf_sector(f, &v)?.energies());
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Parameter layout `[angles | upper(h^(k)) for k ∈ S_2 | upper(λ)]`.
#[derive(Clone, Debug)]
pub struct MfModel {
    n: usize,
    s1: Vec<usize>,
    s2: Vec<usize>,
}

fn tri(m: usize) -> usize {
    m * (m + 1) / 2
}

fn unpack_sym(p: &[f64], m: usize) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(m, m);
    let mut idx = 0;
    for i in 0..m {
        for j in i..m {
            out[(i, j)] = p[idx];
            out[(j, i)] = p[idx];
            idx += 1;
        }
    }
    out
}

fn pack_sym_grad(g: &DMatrix<f64>, out: &mut [f64]) {
    let m = g.nrows();
    let mut idx = 0;
    for i in 0..m {
        for j in i..m {
            out[idx] = if i == j { g[(i, i)] } else { g[(i, j)] + g[(j, i)] };
            idx += 1;
        }
    }
}

fn pack_sym(m: &DMatrix<f64>, out: &mut Vec<f64>) {
    for i in 0..m.nrows() {
        for j in i..m.nrows() {
            out.push(m[(i, j)]);
        }
    }
}

impl MfModel {
    pub fn new(n: usize, s1: Vec<usize>, s2: Vec<usize>) -> Result<MfModel> {
        let mut seen = vec![false; n];
        for &i in s1.iter().chain(&s2) {
            if i >= n || seen[i] {
                return Err(Error::PreconditionViolated(
                    "S_1 and S_2 must partition the orbitals".into(),
                ));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::PreconditionViolated(
                "S_1 and S_2 must partition the orbitals".into(),
            ));
        }
        Ok(MfModel { n, s1, s2 })
    }

    pub fn n_params(&self) -> usize {
        OrbitalRotation::n_params(self.n) + self.s2.len() * tri(self.s1.len()) + tri(self.s2.len())
    }

    pub fn fragment(&self, p: &[f64]) -> GmfFragment {
        let na = OrbitalRotation::n_params(self.n);
        let (m, kk) = (self.s1.len(), self.s2.len());
        let h_k = (0..kk)
            .map(|k| unpack_sym(&p[na + k * tri(m)..], m))
            .collect();
        GmfFragment {
            n: self.n,
            s1: self.s1.clone(),
            s2: self.s2.clone(),
            u_t: OrbitalRotation::from_angles(self.n, p[..na].to_vec()).expect("angle count"),
            h_k,
            lam: unpack_sym(&p[na + kk * tri(m)..], kk),
        }
    }

    pub fn params(&self, f: &GmfFragment) -> Vec<f64> {
        let mut out = f.u_t.angles().to_vec();
        for h in &f.h_k {
            pack_sym(h, &mut out);
        }
        pack_sym(&f.lam, &mut out);
        out
    }

    /// `‖R − g(θ, h, λ)‖²` over the two-body supermatrix, with gradient.
    pub fn cost_grad(&self, r: &DMatrix<f64>, p: &[f64], grad: &mut [f64]) -> f64 {
        let n = self.n;
        let (m, kk) = (self.s1.len(), self.s2.len());
        let na = OrbitalRotation::n_params(n);
        let f = self.fragment(p);
        let x = generator_from(n, &p[..na]);
        let u = x.exp();
        let y = y_matrix(&u, &self.s1, &self.s2, &f.h_k);
        let om = omega(&f.lam);
        let yo = &y * &om;
        let d = r - &yo * y.transpose();
        let cost = d.norm_squared();

        let dy = &d * &y;
        let gy = &dy * &om * -4.0;
        let reshape = |col: usize| DMatrix::from_fn(n, n, |a, b| gy[(vec_index(n, a, b), col)]);
        let us1 = u.select_rows(&self.s1);
        let mut g_u = DMatrix::<f64>::zeros(n, n);
        for k in 0..kk {
            if m > 0 {
                let ga = reshape(k);
                let sym = &ga + ga.transpose();
                let contrib = &f.h_k[k] * &us1 * &sym;
                for (a, &row) in self.s1.iter().enumerate() {
                    let mut r = g_u.row_mut(row);
                    r += contrib.row(a);
                }
                let gh = &us1 * &ga * us1.transpose();
                pack_sym_grad(&gh, &mut grad[na + k * tri(m)..na + (k + 1) * tri(m)]);
            }
            let gb = reshape(kk + k);
            let uk = u.row(self.s2[k]).transpose();
            let v = (&gb + gb.transpose()) * uk;
            let mut r = g_u.row_mut(self.s2[k]);
            r += v.transpose();
        }
        let yb = y.columns(kk, kk);
        let gl = yb.transpose() * dy.columns(kk, kk) * -2.0;
        pack_sym_grad(&gl, &mut grad[na + kk * tri(m)..]);
        grad[..na].copy_from_slice(&angle_gradient(n, &p[..na], &g_u));
        cost
    }
}

/// Settings for the greedy mean-field decompositions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MfOptions {
    pub tol: f64,
    pub seed: u64,
    pub max_fragments: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub init_scale: f64,
}

impl Default for MfOptions {
    fn default() -> Self {
        MfOptions {
            tol: 1e-6,
            seed: 0,
            max_fragments: 300,
            restarts: 5,
            max_iters: 4000,
            init_scale: 0.01,
        }
    }
}

/// Output of a greedy decomposition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MfDecomposition<F> {
    pub fragments: Vec<F>,
    /// Squared two-body residual norm before the first and after each fragment.
    pub residual_trace: Vec<f64>,
    /// False when the fragment cap was hit or no fragment reduced the residual.
    pub converged: bool,
}

impl<F> MfDecomposition<F> {
    pub fn residual(&self) -> f64 {
        *self.residual_trace.last().expect("trace starts with the input norm")
    }
}

fn greedy(
    t: &TwoBodyTensor,
    model: &MfModel,
    opts: &MfOptions,
) -> Result<MfDecomposition<GmfFragment>> {
    let mut r = t.supermatrix().clone();
    let mut trace = vec![r.norm_squared()];
    let mut fragments = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let lopts = LbfgsOptions {
        max_iters: opts.max_iters,
        ..LbfgsOptions::default()
    };
    let np = model.n_params();
    let mut converged = true;
    while *trace.last().unwrap() >= opts.tol {
        if fragments.len() >= opts.max_fragments {
            converged = false;
            break;
        }
        let current = *trace.last().unwrap();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for _ in 0..=opts.restarts {
            let x0: Vec<f64> = (0..np)
                .map(|_| rng.random_range(-opts.init_scale..=opts.init_scale))
                .collect();
            let res = minimize(|x, g| model.cost_grad(&r, x, g), x0, &lopts);
            if best.as_ref().is_none_or(|b| res.f < b.0) {
                best = Some((res.f, res.x));
            }
            if best.as_ref().unwrap().0 < current * (1.0 - 1e-12) {
                break;
            }
        }
        let (_, x) = best.expect("at least one attempt");
        let frag = model.fragment(&x);
        let next = &r - gmf_fragment_tensor(&frag).supermatrix();
        let next_norm = next.norm_squared();
        if next_norm >= current {
            converged = false;
            break;
        }
        r = next;
        trace.push(next_norm);
        fragments.push(frag);
    }
    Ok(MfDecomposition {
        fragments,
        residual_trace: trace,
        converged,
    })
}

/// Greedy GMF(K) decomposition of the two-body part of `t` with the default split.
pub fn gmf_decompose(
    t: &TwoBodyTensor,
    k: usize,
    opts: &MfOptions,
) -> Result<MfDecomposition<GmfFragment>> {
    let n = t.n();
    if k == 0 || k > n {
        return Err(Error::BadK { k, n });
    }
    let (s1, s2) = default_split(n, k);
    gmf_decompose_split(t, s1, s2, opts)
}

/// Greedy GMF decomposition with an explicit `S_1`, `S_2` split.
pub fn gmf_decompose_split(
    t: &TwoBodyTensor,
    s1: Vec<usize>,
    s2: Vec<usize>,
    opts: &MfOptions,
) -> Result<MfDecomposition<GmfFragment>> {
    if s2.is_empty() {
        return Err(Error::BadK { k: 0, n: t.n() });
    }
    greedy(t, &MfModel::new(t.n(), s1, s2)?, opts)
}

/// Greedy full-rank decomposition, the `K = n` case of GMF.
pub fn gfro_decompose(t: &TwoBodyTensor, opts: &MfOptions) -> Result<MfDecomposition<GfroFragment>> {
    let d = gmf_decompose(t, t.n(), opts)?;
    Ok(MfDecomposition {
        fragments: d
            .fragments
            .into_iter()
            .map(|f| GfroFragment {
                n: f.n,
                u: f.u_t,
                lam: f.lam,
            })
            .collect(),
        residual_trace: d.residual_trace,
        converged: d.converged,
    })
}

/// Random fragment with parameters uniform in `[-scale, scale]`.
pub fn random_gmf_fragment(model: &MfModel, scale: f64, rng: &mut impl Rng) -> GmfFragment {
    let p: Vec<f64> = (0..model.n_params())
        .map(|_| rng.random_range(-scale..=scale))
        .collect();
    model.fragment(&p)
}
