use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::CoarsenError;
use crate::graph::LaplacianMatrix;
use crate::matrix::DenseMatrix;

/// Gauss-Seidel sweep order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepOrder {
    /// Ascending node id.
    #[default]
    Forward,
    /// Ascending then descending node id per sweep.
    Symmetric,
}

/// `K` relaxed test vectors, stored node-major: row `p` holds the values
/// `x_p^(1..K)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TestVectors {
    pub vectors: DenseMatrix,
    pub sweeps: usize,
}

impl TestVectors {
    /// Packs per-vector columns into the node-major layout.
    pub fn from_columns(columns: &[Vec<f64>], sweeps: usize) -> Self {
        let n = columns.first().map_or(0, Vec::len);
        let k = columns.len();
        let mut vectors = DenseMatrix::zeros(n, k);
        for (c, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), n, "test vectors differ in length");
            for (p, &v) in col.iter().enumerate() {
                vectors[(p, c)] = v;
            }
        }
        Self { vectors, sweeps }
    }

    pub fn n_nodes(&self) -> usize {
        self.vectors.rows()
    }

    pub fn n_vectors(&self) -> usize {
        self.vectors.cols()
    }
}

fn check_diagonal(l: &LaplacianMatrix) -> Result<(), CoarsenError> {
    let m = l.matrix();
    for p in 0..l.n() {
        let (cols, _) = m.row(p);
        let has_neighbors = cols.iter().any(|&q| q != p);
        if has_neighbors && !(l.degree()[p] > 0.0) {
            return Err(CoarsenError::ZeroDiagonal(p));
        }
    }
    Ok(())
}

/// Relaxes `L x = 0` in place: `x_p <- sum_{q != p} (-L_pq) x_q / L_pp`.
/// Rows without neighbours keep their value.
pub fn gauss_seidel(
    l: &LaplacianMatrix,
    x: &mut [f64],
    sweeps: usize,
    order: SweepOrder,
) -> Result<(), CoarsenError> {
    check_diagonal(l)?;
    for _ in 0..sweeps {
        forward_sweep(l, x);
        if order == SweepOrder::Symmetric {
            backward_sweep(l, x);
        }
    }
    Ok(())
}

#[inline]
fn relax(l: &LaplacianMatrix, x: &mut [f64], p: usize) {
    let (cols, vals) = l.matrix().row(p);
    let mut acc = 0.0;
    let mut any = false;
    for (&q, &v) in cols.iter().zip(vals) {
        if q != p {
            acc -= v * x[q];
            any = true;
        }
    }
    if any {
        x[p] = acc / l.degree()[p];
    }
}

fn forward_sweep(l: &LaplacianMatrix, x: &mut [f64]) {
    for p in 0..x.len() {
        relax(l, x, p);
    }
}

fn backward_sweep(l: &LaplacianMatrix, x: &mut [f64]) {
    for p in (0..x.len()).rev() {
        relax(l, x, p);
    }
}

/// Draws `k` vectors uniformly from `[-1, 1]^n` (one RNG stream per vector)
/// and applies `sweeps` Gauss-Seidel sweeps to each.
pub fn smooth_test_vectors(
    l: &LaplacianMatrix,
    k: usize,
    sweeps: usize,
    seed: u64,
) -> Result<TestVectors, CoarsenError> {
    smooth_test_vectors_with(l, k, sweeps, seed, SweepOrder::Forward)
}

pub fn smooth_test_vectors_with(
    l: &LaplacianMatrix,
    k: usize,
    sweeps: usize,
    seed: u64,
    order: SweepOrder,
) -> Result<TestVectors, CoarsenError> {
    if k == 0 {
        return Err(CoarsenError::InvalidParam(
            "test vector count must be >= 1".into(),
        ));
    }
    if sweeps == 0 {
        return Err(CoarsenError::InvalidParam(
            "sweep count must be >= 1".into(),
        ));
    }
    check_diagonal(l)?;
    let n = l.n();
    let mut vectors = DenseMatrix::zeros(n, k);
    for c in 0..k {
        for (p, v) in random_vector(n, seed, c as u64).into_iter().enumerate() {
            vectors[(p, c)] = v;
        }
    }
    // All vectors advance together, one pass over the matrix per sweep.
    let x = vectors.as_mut_slice();
    let mut acc = vec![0.0f64; k];
    for _ in 0..sweeps {
        for p in 0..n {
            relax_block(l, x, &mut acc, p);
        }
        if order == SweepOrder::Symmetric {
            for p in (0..n).rev() {
                relax_block(l, x, &mut acc, p);
            }
        }
    }
    Ok(TestVectors { vectors, sweeps })
}

/// [`relax`] applied to every column of the node-major block `x`.
#[inline]
fn relax_block(l: &LaplacianMatrix, x: &mut [f64], acc: &mut [f64], p: usize) {
    let k = acc.len();
    let (cols, vals) = l.matrix().row(p);
    acc.fill(0.0);
    let mut any = false;
    for (&q, &v) in cols.iter().zip(vals) {
        if q != p {
            let xq = &x[q * k..(q + 1) * k];
            for (a, &xv) in acc.iter_mut().zip(xq) {
                *a -= v * xv;
            }
            any = true;
        }
    }
    if any {
        let d = l.degree()[p];
        for (xv, &a) in x[p * k..(p + 1) * k].iter_mut().zip(acc.iter()) {
            *xv = a / d;
        }
    }
}

pub(crate) fn random_vector(n: usize, seed: u64, stream: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect()
}
