use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real orbital rotation `U = exp(X)` with `X` antisymmetric,
/// `X_pq = θ_pq` for `p > q`. Acting on creation operators,
/// `Û a†_q Û† = Σ_p U_pq a†_p`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitalRotation {
    n: usize,
    /// `θ_pq` for `p > q`, ordered `(1,0), (2,0), (2,1), (3,0), ...`.
    angles: Vec<f64>,
}

/// Position of `θ_pq` (`p > q`) in the angle vector.
pub fn pair_index(p: usize, q: usize) -> usize {
    debug_assert!(p > q);
    p * (p - 1) / 2 + q
}

impl OrbitalRotation {
    pub fn identity(n: usize) -> OrbitalRotation {
        OrbitalRotation {
            n,
            angles: vec![0.0; n * n.saturating_sub(1) / 2],
        }
    }

    pub fn from_angles(n: usize, angles: Vec<f64>) -> Result<OrbitalRotation> {
        let want = n * n.saturating_sub(1) / 2;
        if angles.len() != want {
            return Err(Error::BadLengths(format!(
                "{} angles for {n} orbitals, expected {want}",
                angles.len()
            )));
        }
        Ok(OrbitalRotation { n, angles })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn n_params(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    /// The antisymmetric generator `X`.
    pub fn generator(&self) -> DMatrix<f64> {
        generator_from(self.n, &self.angles)
    }

    /// The orthogonal matrix `exp(X)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        self.generator().exp()
    }

    /// Recovers angles from a special orthogonal matrix through its real
    /// logarithm.
    pub fn from_matrix(u: &DMatrix<f64>) -> Result<OrbitalRotation> {
        let n = u.nrows();
        let x = real_log_orthogonal(u)?;
        let mut angles = vec![0.0; n * n.saturating_sub(1) / 2];
        for p in 1..n {
            for q in 0..p {
                angles[pair_index(p, q)] = x[(p, q)];
            }
        }
        Ok(OrbitalRotation { n, angles })
    }
}

pub(crate) fn generator_from(n: usize, angles: &[f64]) -> DMatrix<f64> {
    let mut x = DMatrix::zeros(n, n);
    for p in 1..n {
        for q in 0..p {
            let t = angles[pair_index(p, q)];
            x[(p, q)] = t;
            x[(q, p)] = -t;
        }
    }
    x
}

/// Adjoint of the Fréchet derivative of `exp` at `x`, applied to `g`:
/// if `U = exp(X)` and `G = ∂C/∂U`, the result is `∂C/∂X`.
pub(crate) fn exp_frechet_adjoint(x: &DMatrix<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let xt = x.transpose();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&xt);
    big.view_mut((n, n), (n, n)).copy_from(&xt);
    big.view_mut((0, n), (n, n)).copy_from(g);
    big.exp().view((0, n), (n, n)).into_owned()
}

/// Gradient with respect to the angles given `∂C/∂U`.
pub(crate) fn angle_gradient(n: usize, angles: &[f64], g_u: &DMatrix<f64>) -> Vec<f64> {
    let gx = exp_frechet_adjoint(&generator_from(n, angles), g_u);
    let mut out = vec![0.0; angles.len()];
    for p in 1..n {
        for q in 0..p {
            out[pair_index(p, q)] = gx[(p, q)] - gx[(q, p)];
        }
    }
    out
}

/// Antisymmetric `X` with `exp(X) = U` for `U` orthogonal with `det U = +1`.
pub fn real_log_orthogonal(u: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = u.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let orth = (u.transpose() * u - DMatrix::identity(n, n)).amax();
    if orth > 1e-9 {
        return Err(Error::PreconditionViolated(format!(
            "matrix is not orthogonal (deviation {orth:e})"
        )));
    }
    if u.determinant() < 0.0 {
        return Err(Error::PreconditionViolated("determinant is -1".into()));
    }
    let (q, t) = nalgebra::Schur::new(u.clone()).unpack();
    let mut l = DMatrix::zeros(n, n);
    let mut minus_ones = Vec::new();
    let mut i = 0;
    while i < n {
        let block = i + 1 < n && t[(i + 1, i)].abs() > 1e-12;
        if block {
            let c = 0.5 * (t[(i, i)] + t[(i + 1, i + 1)]);
            let s = 0.5 * (t[(i + 1, i)] - t[(i, i + 1)]);
            let phi = s.atan2(c);
            l[(i + 1, i)] = phi;
            l[(i, i + 1)] = -phi;
            i += 2;
        } else {
            if t[(i, i)] < 0.0 {
                minus_ones.push(i);
            }
            i += 1;
        }
    }
    // det = +1 forces an even number of -1 eigenvalues; pair them into
    // rotations by π.
    for pair in minus_ones.chunks(2) {
        if let [a, b] = *pair {
            l[(b, a)] = std::f64::consts::PI;
            l[(a, b)] = -std::f64::consts::PI;
        } else {
            return Err(Error::Internal("unpaired -1 eigenvalue in real logarithm".into()));
        }
    }
    let x = &q * l * q.transpose();
    let x = (&x - x.transpose()) * 0.5;
    let err = (x.exp() - u).amax();
    if err > 1e-10 {
        return Err(Error::Internal(format!("real logarithm residual {err:e}")));
    }
    Ok(x)
}

/// Diagonalizes a real symmetric `h`: returns the rotation `U` and the
/// eigenvalues `γ` with `U h Uᵀ = diag(γ)`. Eigenvectors are matched to the
/// basis orbital they overlap most, so an already diagonal `h` gives the
/// identity rotation.
pub fn diagonalize_one_body(h: &DMatrix<f64>) -> Result<(OrbitalRotation, Vec<f64>)> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(Error::SizeMismatch(n, h.ncols()));
    }
    let asym = (h - h.transpose()).amax();
    if asym > 1e-10 {
        return Err(Error::NonSymmetricInput(asym));
    }
    if n == 0 {
        return Ok((OrbitalRotation::identity(0), Vec::new()));
    }
    let eig = SymmetricEigen::new((h + h.transpose()) * 0.5);
    let v = &eig.eigenvectors;

    // Greedy matching of eigenvectors to basis indices, strongest overlap first.
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(n * n);
    for col in 0..n {
        for row in 0..n {
            candidates.push((v[(row, col)].abs(), row, col));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut slot_of_col = vec![usize::MAX; n];
    let mut row_used = vec![false; n];
    for (_, row, col) in candidates {
        if slot_of_col[col] == usize::MAX && !row_used[row] {
            slot_of_col[col] = row;
            row_used[row] = true;
        }
    }
    let mut w = DMatrix::zeros(n, n);
    let mut gamma = vec![0.0; n];
    for col in 0..n {
        let slot = slot_of_col[col];
        let sign = if v[(slot, col)] < 0.0 { -1.0 } else { 1.0 };
        w.set_column(slot, &(v.column(col) * sign));
        gamma[slot] = eig.eigenvalues[col];
    }
    if w.determinant() < 0.0 {
        // Flip the column with the weakest diagonal overlap.
        let weakest = (0..n)
            .min_by(|&a, &b| w[(a, a)].abs().total_cmp(&w[(b, b)].abs()))
            .unwrap_or(0);
        let flipped = -w.column(weakest);
        w.set_column(weakest, &flipped);
    }
    let u = w.transpose();
    Ok((OrbitalRotation::from_matrix(&u)?, gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        (&a + a.transpose()) * 0.5
    }

    #[test]
    fn diagonal_gives_identity() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 0.5]));
        let (u, g) = diagonalize_one_body(&h).unwrap();
        assert!(u.angles().iter().all(|t| t.abs() < 1e-14));
        assert_eq!(g, vec![3.0, -1.0, 0.5]);
    }

    #[test]
    fn pauli_x_eigensystem() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let (u, mut g) = diagonalize_one_body(&h).unwrap();
        g.sort_by(f64::total_cmp);
        assert!((g[0] + 1.0).abs() < 1e-12 && (g[1] - 1.0).abs() < 1e-12);
        assert!((u.angles()[0].abs() - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in [1, 2, 5, 6, 8] {
            let h = random_symmetric(n, &mut rng);
            let (rot, g) = diagonalize_one_body(&h).unwrap();
            let u = rot.matrix();
            let d = &u * &h * u.transpose();
            for i in 0..n {
                for j in 0..n {
                    let want = if i == j { g[i] } else { 0.0 };
                    assert!((d[(i, j)] - want).abs() < 1e-10, "n={n}");
                }
            }
        }
    }

    #[test]
    fn log_handles_half_turns() {
        // Rotation by π in the (0,1) plane.
        let u = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![-1.0, -1.0, 1.0]));
        let x = real_log_orthogonal(&u).unwrap();
        assert!((x.exp() - u).amax() < 1e-12);
    }

    #[test]
    fn angle_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let angles: Vec<f64> = (0..15).map(|_| rng.random_range(-0.8..0.8)).collect();
        let r = OrbitalRotation::from_angles(6, angles).unwrap();
        let back = OrbitalRotation::from_matrix(&r.matrix()).unwrap();
        assert!((back.matrix() - r.matrix()).amax() < 1e-10);
    }

    #[test]
    fn frechet_adjoint_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 4;
        let angles: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
        let target = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        // C(θ) = <target, exp(X(θ))>
        let cost = |a: &[f64]| generator_from(n, a).exp().dot(&target);
        let grad = angle_gradient(n, &angles, &target);
        for k in 0..angles.len() {
            let mut p = angles.clone();
            let mut m = angles.clone();
            p[k] += 1e-6;
            m[k] -= 1e-6;
            let fd = (cost(&p) - cost(&m)) / 2e-6;
            assert!((fd - grad[k]).abs() < 1e-7, "{k}: {fd} vs {}", grad[k]);
        }
    }
}
