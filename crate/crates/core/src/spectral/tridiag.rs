//! Dense symmetric eigensolver: Householder reduction to tridiagonal form
//! followed by the implicitly shifted QL iteration (EISPACK tred2/tql2).
//!
//! The accumulated orthogonal factor is stored transposed (row `i` holds
//! column `i` of the usual `V`), so every Givens rotation in the QL sweep
//! and the inner loops of the reduction touch contiguous memory.

use super::SpectralError;
use crate::matrix::DenseMatrix;

/// Eigenvalues in ascending order; `vectors` row `i` is the unit eigenvector
/// for `values[i]`.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

/// Full eigen-decomposition of a symmetric matrix (only the lower triangle
/// is read).
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<SymmetricEigen, SpectralError> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "matrix must be square");
    if !a.is_finite() {
        return Err(SpectralError::NonFinite);
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            values: Vec::new(),
            vectors: DenseMatrix::zeros(0, 0),
        });
    }
    // w[(c, r)] plays the role of V[r][c].
    let mut w = a.transpose();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut w, &mut d, &mut e);
    tql2(&mut w, &mut d, &mut e)?;
    Ok(sorted(d, w))
}

/// Eigen-decomposition of the symmetric tridiagonal matrix with diagonal
/// `diag` and sub-diagonal `off` (`off.len() == diag.len() - 1`).
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<SymmetricEigen, SpectralError> {
    let n = diag.len();
    assert!(n == 0 || off.len() + 1 == n, "off-diagonal length mismatch");
    let mut w = DenseMatrix::identity(n);
    let mut d = diag.to_vec();
    // tql2 expects e[i] to be the coupling between i-1 and i.
    let mut e = vec![0.0; n];
    e[1..n].copy_from_slice(off);
    tql2(&mut w, &mut d, &mut e)?;
    Ok(sorted(d, w))
}

fn sorted(d: Vec<f64>, w: DenseMatrix) -> SymmetricEigen {
    let n = d.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]).then(i.cmp(&j)));
    let mut vectors = DenseMatrix::zeros(n, n);
    let values = order
        .iter()
        .enumerate()
        .map(|(dst, &src)| {
            vectors.row_mut(dst).copy_from_slice(w.row(src));
            d[src]
        })
        .collect();
    SymmetricEigen { values, vectors }
}

fn tred2(w: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = w[(j, n - 1)];
    }

    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for &dk in &d[..i] {
            scale += dk.abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = w[(j, i - 1)];
                w[(j, i)] = 0.0;
                w[(i, j)] = 0.0;
            }
        } else {
            for dk in &mut d[..i] {
                *dk /= scale;
                h += *dk * *dk;
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            e[..i].fill(0.0);

            for j in 0..i {
                f = d[j];
                w[(i, j)] = f;
                g = e[j] + w[(j, j)] * f;
                let col_j = w.row(j);
                for k in j + 1..i {
                    g += col_j[k] * d[k];
                    e[k] += col_j[k] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                let col_j = w.row_mut(j);
                for k in j..i {
                    col_j[k] -= f * e[k] + g * d[k];
                }
                d[j] = col_j[i - 1];
                col_j[i] = 0.0;
            }
        }
        d[i] = h;
    }

    // Accumulate the transformations.
    for i in 0..n - 1 {
        w[(i, n - 1)] = w[(i, i)];
        w[(i, i)] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = w[(i + 1, k)] / h;
            }
            for j in 0..=i {
                let g: f64 = {
                    let next = w.row(i + 1);
                    let col_j = w.row(j);
                    (0..=i).map(|k| next[k] * col_j[k]).sum()
                };
                let col_j = w.row_mut(j);
                for k in 0..=i {
                    col_j[k] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            w[(i + 1, k)] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = w[(j, n - 1)];
        w[(j, n - 1)] = 0.0;
    }
    w[(n - 1, n - 1)] = 1.0;
    e[0] = 0.0;
}

fn tql2(w: &mut DenseMatrix, d: &mut [f64], e: &mut [f64]) -> Result<(), SpectralError> {
    let n = d.len();
    if n == 0 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;

    let mut f = 0.0;
    let mut tst1 = 0.0f64;
    let eps = f64::EPSILON;
    let max_iter = 64 * n.max(8);
    let mut total_iter = 0usize;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                total_iter += 1;
                if total_iter > max_iter {
                    return Err(SpectralError::NotConverged(total_iter));
                }
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in &mut d[l + 2..n] {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);

                    rotate_rows(w, i, s, c);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
    Ok(())
}

#[inline]
fn rotate_rows(w: &mut DenseMatrix, i: usize, s: f64, c: f64) {
    let n = w.cols();
    let data = w.as_mut_slice();
    let (head, tail) = data.split_at_mut((i + 1) * n);
    let ri = &mut head[i * n..];
    let ri1 = &mut tail[..n];
    for (a, b) in ri.iter_mut().zip(ri1.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}
