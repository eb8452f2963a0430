//! Lanczos with full reorthogonalization for the smallest eigenpairs of a
//! sparse Laplacian, used when the reduced graph is too large for the dense
//! path.
//!
//! The Laplacian nullspace is known exactly (one indicator vector per
//! connected component), so it is deflated up front and the iteration only
//! sees the nonzero part of the spectrum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tridiag::tridiagonal_eigen;
use super::SpectralError;
use crate::graph::SparseMatrix;
use crate::matrix::dot;

pub(crate) struct LanczosOutput {
    pub values: Vec<f64>,
    /// One length-n vector per value.
    pub vectors: Vec<Vec<f64>>,
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let nrm = dot(v, v).sqrt();
    if nrm > 0.0 {
        v.iter_mut().for_each(|x| *x /= nrm);
    }
    nrm
}

/// Two passes of classical Gram-Schmidt against `basis`.
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(-c, q, v);
        }
    }
}

/// The `want` smallest eigenpairs of `l` restricted to the orthogonal
/// complement of the orthonormal set `deflate`.
pub(crate) fn smallest_eigenpairs(
    l: &SparseMatrix,
    deflate: &[Vec<f64>],
    want: usize,
    max_iter: usize,
    tol: f64,
    seed: u64,
) -> Result<LanczosOutput, SpectralError> {
    let n = l.n_rows();
    let space = n - deflate.len();
    if want == 0 {
        return Ok(LanczosOutput {
            values: Vec::new(),
            vectors: Vec::new(),
        });
    }
    if want > space {
        return Err(SpectralError::TooFewEigenpairs {
            requested: want,
            available: space,
        });
    }
    let max_iter = max_iter.min(space).max(want);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fresh = |rng: &mut ChaCha8Rng, basis: &[Vec<f64>]| -> Option<Vec<f64>> {
        for _ in 0..8 {
            let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
            orthogonalize(&mut v, deflate);
            orthogonalize(&mut v, basis);
            if normalize(&mut v) > 1e-8 {
                return Some(v);
            }
        }
        None
    };

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_iter);
    let mut alpha: Vec<f64> = Vec::with_capacity(max_iter);
    let mut beta: Vec<f64> = Vec::with_capacity(max_iter);
    let mut q = fresh(&mut rng, &basis).ok_or(SpectralError::NotConverged(0))?;
    let mut w = vec![0.0; n];
    let check_every = 10usize;

    loop {
        l.matvec(&q, &mut w);
        let a = dot(&q, &w);
        axpy(-a, &q, &mut w);
        if let Some(prev) = basis.last() {
            axpy(-beta.last().copied().unwrap_or(0.0), prev, &mut w);
        }
        basis.push(std::mem::take(&mut q));
        alpha.push(a);
        orthogonalize(&mut w, deflate);
        orthogonalize(&mut w, &basis);
        let mut b = dot(&w, &w).sqrt();
        let m = basis.len();

        let exhausted = m >= max_iter;
        if m >= want && (m.is_multiple_of(check_every) || exhausted || b < 1e-12) {
            let eig = tridiagonal_eigen(&alpha, &beta)?;
            let converged = (0..want).all(|i| {
                let last = eig.vectors[(i, m - 1)];
                (b * last).abs() <= tol * eig.values[i].abs().max(1.0)
            });
            if converged || (exhausted && m == space) {
                return Ok(ritz(&basis, &eig, want));
            }
            if exhausted {
                return Err(SpectralError::NotConverged(m));
            }
        }
        if exhausted {
            return Err(SpectralError::NotConverged(m));
        }

        if b < 1e-12 {
            // Invariant subspace found; continue with a fresh direction,
            // which decouples the tridiagonal matrix.
            match fresh(&mut rng, &basis) {
                Some(v) => {
                    q = v;
                    b = 0.0;
                }
                None => {
                    let eig = tridiagonal_eigen(&alpha, &beta)?;
                    return Ok(ritz(&basis, &eig, want));
                }
            }
        } else {
            q = w.iter().map(|x| x / b).collect();
        }
        beta.push(b);
    }
}

fn ritz(basis: &[Vec<f64>], eig: &super::tridiag::SymmetricEigen, want: usize) -> LanczosOutput {
    let n = basis[0].len();
    let mut vectors = Vec::with_capacity(want);
    for i in 0..want {
        let s = eig.vectors.row(i);
        let mut u = vec![0.0; n];
        for (qj, &sj) in basis.iter().zip(s) {
            axpy(sj, qj, &mut u);
        }
        normalize(&mut u);
        vectors.push(u);
    }
    LanczosOutput {
        values: eig.values[..want].to_vec(),
        vectors,
    }
}
