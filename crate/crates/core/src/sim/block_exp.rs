use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

type M = DMatrix<Complex64>;

const PRE_TOL: f64 = 1e-10;
const CHECK_TOL: f64 = 1e-10;

pub fn matrix_exp(x: &M) -> M {
    x.clone().exp()
}

fn max_abs(m: &M) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn same_dims(ms: &[&M], dim: usize) -> Result<()> {
    for m in ms {
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::SizeMismatch(m.nrows(), dim));
        }
    }
    Ok(())
}

fn check_projectors(ps: &[M]) -> Result<()> {
    for (i, p) in ps.iter().enumerate() {
        if max_abs(&(p - p.adjoint())) > PRE_TOL {
            return Err(Error::PreconditionViolated(format!("P_{i} is not Hermitian")));
        }
        for (j, q) in ps.iter().enumerate() {
            let want = if i == j { q.clone() } else { M::zeros(q.nrows(), q.ncols()) };
            if max_abs(&(p * q - want)) > PRE_TOL {
                return Err(Error::PreconditionViolated(format!(
                    "P_{i} P_{j} ≠ δ_ij P_j"
                )));
            }
        }
    }
    Ok(())
}

fn check_generator(x: &M, label: &str, ps: &[M]) -> Result<()> {
    if max_abs(&(x + x.adjoint())) > PRE_TOL {
        return Err(Error::PreconditionViolated(format!("{label} is not anti-Hermitian")));
    }
    for (j, p) in ps.iter().enumerate() {
        if max_abs(&(x * p - p * x)) > PRE_TOL {
            return Err(Error::PreconditionViolated(format!(
                "{label} does not commute with P_{j}"
            )));
        }
    }
    Ok(())
}

fn complement(ps: &[M], dim: usize) -> M {
    ps.iter().fold(M::identity(dim, dim), |acc, p| acc - p)
}

/// Checks `exp(Σ X_i P_i) = Σ exp(X_i) P_i + (1 − Σ P_i)`.
pub fn check_block_identity(xs: &[M], ps: &[M]) -> Result<bool> {
    if xs.len() != ps.len() {
        return Err(Error::SizeMismatch(xs.len(), ps.len()));
    }
    let Some(dim) = xs.first().map(|x| x.nrows()) else {
        return Ok(true);
    };
    same_dims(&xs.iter().chain(ps).collect::<Vec<_>>(), dim)?;
    check_projectors(ps)?;
    for (i, x) in xs.iter().enumerate() {
        check_generator(x, &format!("X_{i}"), ps)?;
    }
    let sum = xs
        .iter()
        .zip(ps)
        .fold(M::zeros(dim, dim), |acc, (x, p)| acc + x * p);
    let lhs = matrix_exp(&sum);
    let rhs = xs
        .iter()
        .zip(ps)
        .fold(complement(ps, dim), |acc, (x, p)| acc + matrix_exp(x) * p);
    Ok(max_abs(&(lhs - rhs)) <= CHECK_TOL)
}

/// Checks `Σ_i U_i P_i + (1 − Σ P_i) = Π_i Π_j exp(X_ij P_i)` with
/// `U_i = Π_j exp(X_ij)`; `factors[i]` lists `X_i1, X_i2, …` in product order.
pub fn check_product_form(factors: &[Vec<M>], ps: &[M]) -> Result<bool> {
    if factors.len() != ps.len() {
        return Err(Error::SizeMismatch(factors.len(), ps.len()));
    }
    let Some(dim) = ps.first().map(|p| p.nrows()) else {
        return Ok(true);
    };
    same_dims(&factors.iter().flatten().chain(ps).collect::<Vec<_>>(), dim)?;
    check_projectors(ps)?;
    for (i, xs) in factors.iter().enumerate() {
        for (j, x) in xs.iter().enumerate() {
            check_generator(x, &format!("X_{i}{j}"), ps)?;
        }
    }
    let mut lhs = complement(ps, dim);
    let mut rhs = M::identity(dim, dim);
    for (xs, p) in factors.iter().zip(ps) {
        let u = xs
            .iter()
            .fold(M::identity(dim, dim), |acc, x| acc * matrix_exp(x));
        lhs += u * p;
        for x in xs {
            rhs *= matrix_exp(&(x * p));
        }
    }
    Ok(max_abs(&(lhs - rhs)) <= CHECK_TOL)
}

fn random_anti_hermitian(dim: usize, rng: &mut impl Rng) -> M {
    let a = M::from_fn(dim, dim, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    (&a - a.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Random generators and projectors satisfying the commutation
/// preconditions: a random unitary `V` splits the space into
/// `n_projectors` blocks (plus a leftover block unless `complete`), the
/// projectors are the block projectors and every generator is
/// block-diagonal. Returns `factors[i][j]` with `n_factors` per projector.
pub fn random_construction(
    dim: usize,
    n_projectors: usize,
    n_factors: usize,
    complete: bool,
    rng: &mut impl Rng,
) -> (Vec<Vec<M>>, Vec<M>) {
    let v = matrix_exp(&random_anti_hermitian(dim, rng));
    let blocks = n_projectors + usize::from(!complete);
    // Cut points give every block at least one dimension when possible.
    let mut cuts: Vec<usize> = (1..dim).collect();
    for i in (1..cuts.len()).rev() {
        cuts.swap(i, rng.random_range(0..=i));
    }
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks.saturating_sub(1)).collect();
    cuts.sort_unstable();
    let bounds: Vec<(usize, usize)> = std::iter::once(0)
        .chain(cuts.iter().copied())
        .zip(cuts.iter().copied().chain(std::iter::once(dim)))
        .collect();
    let mut ps = Vec::with_capacity(n_projectors);
    for &(a, b) in bounds.iter().take(n_projectors) {
        let mut d = M::zeros(dim, dim);
        for i in a..b {
            d[(i, i)] = Complex64::new(1.0, 0.0);
        }
        ps.push(&v * d * v.adjoint());
    }
    let block_diag = |rng: &mut _| {
        let mut x = M::zeros(dim, dim);
        for &(a, b) in &bounds {
            let blk = random_anti_hermitian(b - a, rng);
            x.view_mut((a, a), (b - a, b - a)).copy_from(&blk);
        }
        &v * x * v.adjoint()
    };
    let factors = (0..n_projectors)
        .map(|_| (0..n_factors).map(|_| block_diag(rng)).collect())
        .collect();
    (factors, ps)
}
