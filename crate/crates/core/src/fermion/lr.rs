use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::Result;

use super::tensor::TwoBodyTensor;

/// One low-rank term `ε · L ⊗ L`, i.e. `g_pqrs = ε L_pq L_rs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LrFragment {
    pub n: usize,
    pub eps: f64,
    pub l_matrix: DMatrix<f64>,
}

impl LrFragment {
    pub fn tensor(&self) -> TwoBodyTensor {
        let v = flatten(&self.l_matrix);
        let g = &v * v.transpose() * self.eps;
        TwoBodyTensor::from_parts(DMatrix::zeros(self.n, self.n), g)
    }
}

fn flatten(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    DMatrix::from_fn(n * n, 1, |i, _| m[(i / n, i % n)])
}

/// Eigendecomposition of the two-body supermatrix, keeping the largest
/// `|ε|` terms until the squared norm of the discarded part is below `tol`.
pub fn lr_decompose(t: &TwoBodyTensor, tol: f64) -> Result<Vec<LrFragment>> {
    let n = t.n();
    let eig = SymmetricEigen::new(t.supermatrix().clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .abs()
            .total_cmp(&eig.eigenvalues[a].abs())
            .then(a.cmp(&b))
    });
    let mut remaining: f64 = eig.eigenvalues.iter().map(|e| e * e).sum();
    let mut out = Vec::new();
    for i in order {
        if remaining < tol {
            break;
        }
        let eps = eig.eigenvalues[i];
        remaining -= eps * eps;
        let mut v = eig.eigenvectors.column(i).into_owned();
        let lead = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
        if lead < 0.0 {
            v = -v;
        }
        out.push(LrFragment {
            n,
            eps,
            l_matrix: DMatrix::from_fn(n, n, |p, q| v[p * n + q]),
        });
    }
    Ok(out)
}
