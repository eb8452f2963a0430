//! Bottom eigenpairs of a graph Laplacian and the spectral embedding built
//! from them.

mod lanczos;
pub mod tridiag;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{component_count, components_of_pattern, LaplacianMatrix};
use crate::matrix::{norm2, DenseMatrix};

pub use tridiag::{symmetric_eigen, tridiagonal_eigen, SymmetricEigen};

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("requested {requested} eigenpairs but only {available} are available")]
    TooFewEigenpairs { requested: usize, available: usize },
    #[error("dimension {dim} exceeds the dense limit {limit}; enable the iterative solver")]
    TooLargeForDense { dim: usize, limit: usize },
    #[error("eigensolver did not converge after {0} iterations")]
    NotConverged(usize),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("k must be at least 1")]
    ZeroK,
}

/// Eigenvalues below `ZERO_TOL_REL * max diagonal` count as zero.
pub const ZERO_TOL_REL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenOptions {
    /// Largest dimension handled by the dense solver.
    pub dense_limit: usize,
    /// Use Lanczos instead of failing above `dense_limit`.
    pub iterative: bool,
    pub lanczos_max_iter: usize,
    pub lanczos_tol: f64,
    pub lanczos_seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self {
            dense_limit: 4000,
            iterative: false,
            lanczos_max_iter: 2000,
            lanczos_tol: 1e-9,
            lanczos_seed: 0x5eed,
        }
    }
}

/// `P x k` matrix of eigenvectors (as columns) with their eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    pub matrix: DenseMatrix,
    pub eigenvalues: Vec<f64>,
}

/// The `k` smallest eigenpairs of `l`, optionally skipping the zero
/// eigenvalues (one per connected component).
///
/// Each eigenvector is normalized and its sign fixed so that its largest
/// magnitude entry (lowest index on ties) is positive.
pub fn bottom_eigs(
    l: &LaplacianMatrix,
    k: usize,
    skip_zero: bool,
    opts: &EigenOptions,
) -> Result<Embedding, SpectralError> {
    if k == 0 {
        return Err(SpectralError::ZeroK);
    }
    let n = l.n();
    if n <= opts.dense_limit {
        dense_bottom(l, k, skip_zero)
    } else if opts.iterative {
        lanczos_bottom(l, k, skip_zero, opts)
    } else {
        Err(SpectralError::TooLargeForDense {
            dim: n,
            limit: opts.dense_limit,
        })
    }
}

fn zero_tolerance(l: &LaplacianMatrix) -> f64 {
    let max_diag = l.degree().iter().copied().fold(0.0, f64::max);
    ZERO_TOL_REL * max_diag
}

fn dense_bottom(
    l: &LaplacianMatrix,
    k: usize,
    skip_zero: bool,
) -> Result<Embedding, SpectralError> {
    let n = l.n();
    let eig = symmetric_eigen(&l.matrix().to_dense())?;
    let tol = zero_tolerance(l);
    let picked: Vec<usize> = (0..n)
        .filter(|&i| !skip_zero || eig.values[i] > tol)
        .take(k)
        .collect();
    if picked.len() < k {
        return Err(SpectralError::TooFewEigenpairs {
            requested: k,
            available: picked.len(),
        });
    }
    let mut matrix = DenseMatrix::zeros(n, k);
    let mut eigenvalues = Vec::with_capacity(k);
    for (c, &i) in picked.iter().enumerate() {
        let v = canonical_sign(eig.vectors.row(i).to_vec());
        for (r, x) in v.into_iter().enumerate() {
            matrix[(r, c)] = x;
        }
        eigenvalues.push(eig.values[i]);
    }
    Ok(Embedding {
        matrix,
        eigenvalues,
    })
}

fn lanczos_bottom(
    l: &LaplacianMatrix,
    k: usize,
    skip_zero: bool,
    opts: &EigenOptions,
) -> Result<Embedding, SpectralError> {
    let n = l.n();
    let comp = components_of_pattern(l.matrix());
    let c = component_count(&comp);
    let mut nullspace: Vec<Vec<f64>> = vec![vec![0.0; n]; c];
    let mut sizes = vec![0usize; c];
    for (i, &ci) in comp.iter().enumerate() {
        nullspace[ci][i] = 1.0;
        sizes[ci] += 1;
    }
    for (v, &s) in nullspace.iter_mut().zip(&sizes) {
        let inv = 1.0 / (s as f64).sqrt();
        v.iter_mut().for_each(|x| *x *= inv);
    }
    let (zeros, want) = if skip_zero {
        (0, k)
    } else {
        (k.min(c), k - k.min(c))
    };
    if skip_zero && k > n - c {
        return Err(SpectralError::TooFewEigenpairs {
            requested: k,
            available: n - c,
        });
    }
    let out = lanczos::smallest_eigenpairs(
        l.matrix(),
        &nullspace,
        want,
        opts.lanczos_max_iter,
        opts.lanczos_tol,
        opts.lanczos_seed,
    )?;
    let mut matrix = DenseMatrix::zeros(n, k);
    let mut eigenvalues = Vec::with_capacity(k);
    let columns = nullspace
        .into_iter()
        .take(zeros)
        .map(|v| (0.0, v))
        .chain(out.values.into_iter().zip(out.vectors));
    for (col, (lam, v)) in columns.enumerate() {
        for (r, x) in canonical_sign(v).into_iter().enumerate() {
            matrix[(r, col)] = x;
        }
        eigenvalues.push(lam);
    }
    Ok(Embedding {
        matrix,
        eigenvalues,
    })
}

fn canonical_sign(mut v: Vec<f64>) -> Vec<f64> {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
    v
}

/// Returns the embedding rows, optionally scaled to unit length, together
/// with the number of zero rows that could not be normalized.
pub fn embed_rows(e: &Embedding, row_normalize: bool) -> (DenseMatrix, usize) {
    let mut out = e.matrix.clone();
    let mut zero_rows = 0;
    if row_normalize {
        for i in 0..out.rows() {
            let row = out.row_mut(i);
            let nrm = norm2(row);
            if nrm > 0.0 {
                row.iter_mut().for_each(|x| *x /= nrm);
            } else {
                zero_rows += 1;
            }
        }
    }
    (out, zero_rows)
}
