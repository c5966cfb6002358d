use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Asymmetry above which loaded tensors are rejected instead of averaged.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// One- and two-body coefficients of a number-conserving fermionic operator
/// `Σ h_pq a†_p a_q + Σ g_pqrs a†_p a_q a†_r a_s`.
///
/// The two-body part is held as the `n² × n²` supermatrix `G[(pq), (rs)]`
/// with composite index `p·n + q`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoBodyTensor {
    n: usize,
    h: DMatrix<f64>,
    g: DMatrix<f64>,
}

fn max_asym(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

impl TwoBodyTensor {
    pub fn zeros(n: usize) -> TwoBodyTensor {
        TwoBodyTensor {
            n,
            h: DMatrix::zeros(n, n),
            g: DMatrix::zeros(n * n, n * n),
        }
    }

    /// Builds a tensor from `h` (`n × n`) and `g` in `p, q, r, s` row-major
    /// order. Asymmetries up to [`SYMMETRY_TOL`] are averaged away.
    pub fn new(n: usize, h: DMatrix<f64>, g: &[f64]) -> Result<TwoBodyTensor> {
        if h.nrows() != n || h.ncols() != n {
            return Err(Error::SizeMismatch(n, h.nrows()));
        }
        if g.len() != n.pow(4) {
            return Err(Error::SizeMismatch(n.pow(4), g.len()));
        }
        let g = DMatrix::from_row_slice(n * n, n * n, g);
        TwoBodyTensor::from_supermatrix(h, g)
    }

    /// Same as [`TwoBodyTensor::new`] with the two-body part given as a supermatrix.
    pub fn from_supermatrix(h: DMatrix<f64>, g: DMatrix<f64>) -> Result<TwoBodyTensor> {
        let n = h.nrows();
        if h.ncols() != n || g.nrows() != n * n || g.ncols() != n * n {
            return Err(Error::SizeMismatch(n * n, g.nrows()));
        }
        if h.iter().chain(g.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvariantViolation("non-finite tensor entry".into()));
        }
        let ah = max_asym(&h);
        if ah > SYMMETRY_TOL {
            return Err(Error::NonSymmetricInput(ah));
        }
        let ag = max_asym(&g);
        if ag > SYMMETRY_TOL {
            return Err(Error::AsymmetricSupermatrix(ag));
        }
        Ok(TwoBodyTensor {
            n,
            h: symmetrized(&h),
            g: symmetrized(&g),
        })
    }

    /// Trusted constructor for internally produced, already symmetric data.
    pub(crate) fn from_parts(h: DMatrix<f64>, g: DMatrix<f64>) -> TwoBodyTensor {
        TwoBodyTensor { n: h.nrows(), h, g }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> &DMatrix<f64> {
        &self.h
    }

    pub fn supermatrix(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn g(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let n = self.n;
        self.g[(p * n + q, r * n + s)]
    }

    /// Copy with the one-body part removed.
    pub fn two_body_only(&self) -> TwoBodyTensor {
        TwoBodyTensor {
            n: self.n,
            h: DMatrix::zeros(self.n, self.n),
            g: self.g.clone(),
        }
    }

    /// Squared Frobenius norm of the two-body part.
    pub fn g_norm_sq(&self) -> f64 {
        self.g.norm_squared()
    }

    pub fn add(&self, other: &TwoBodyTensor) -> Result<TwoBodyTensor> {
        if self.n != other.n {
            return Err(Error::SizeMismatch(self.n, other.n));
        }
        Ok(TwoBodyTensor::from_parts(&self.h + &other.h, &self.g + &other.g))
    }

    pub fn sub(&self, other: &TwoBodyTensor) -> Result<TwoBodyTensor> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, f: f64) -> TwoBodyTensor {
        TwoBodyTensor::from_parts(&self.h * f, &self.g * f)
    }

    /// Applies the orbital rotation `U` to every index:
    /// `g'_pqrs = Σ U_ap U_bq U_cr U_ds g_abcd` and `h' = Uᵀ h U`.
    pub fn rotated(&self, u: &DMatrix<f64>) -> TwoBodyTensor {
        let w = u.kronecker(u);
        let g = w.transpose() * &self.g * &w;
        let h = u.transpose() * &self.h * u;
        TwoBodyTensor::from_parts(symmetrized(&h), symmetrized(&g))
    }

    /// Largest violation of `g_pqrs = g_rspq` (zero for anything built here).
    pub fn max_asymmetry(&self) -> f64 {
        max_asym(&self.g).max(max_asym(&self.h))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_layout() {
        let n = 2;
        let mut g = vec![0.0; 16];
        // g_0110 and its partner g_1001
        g[0b0110] = 0.5;
        g[0b1001] = 0.5;
        let t = TwoBodyTensor::new(n, DMatrix::zeros(2, 2), &g).unwrap();
        assert_eq!(t.g(0, 1, 1, 0), 0.5);
        assert_eq!(t.g(1, 0, 0, 1), 0.5);
        assert_eq!(t.g(0, 0, 1, 1), 0.0);
    }

    #[test]
    fn rejects_asymmetry() {
        let mut g = vec![0.0; 16];
        g[0b0110] = 1e-3;
        assert!(matches!(
            TwoBodyTensor::new(2, DMatrix::zeros(2, 2), &g),
            Err(Error::AsymmetricSupermatrix(_))
        ));
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(
            TwoBodyTensor::new(2, h, &[0.0; 16]),
            Err(Error::NonSymmetricInput(_))
        ));
    }

    #[test]
    fn small_noise_is_averaged() {
        let mut g = vec![0.0; 16];
        g[0b0110] = 1.0;
        g[0b1001] = 1.0 + 1e-10;
        let t = TwoBodyTensor::new(2, DMatrix::zeros(2, 2), &g).unwrap();
        assert_eq!(t.g(0, 1, 1, 0), t.g(1, 0, 0, 1));
    }

    #[test]
    fn identity_rotation_is_noop() {
        let mut g = vec![0.0; 16];
        g[0] = 2.0;
        let t = TwoBodyTensor::new(2, DMatrix::identity(2, 2), &g).unwrap();
        assert_eq!(t.rotated(&DMatrix::identity(2, 2)), t);
    }
}
