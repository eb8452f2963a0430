use super::{CoarsenError, MappingOperator};
use crate::graph::{LaplacianMatrix, SparseMatrix};

/// Coarse Laplacian `H L H^T`: `(L_R)_ab = sum_{p in a, q in b} L_pq`.
///
/// Only the strict upper triangle is accumulated and then mirrored, and each
/// diagonal entry is the negated sum of its row's off-diagonals, so the
/// result is exactly symmetric with zero row sums up to summation rounding.
pub fn galerkin_reduce(
    l: &LaplacianMatrix,
    m: &MappingOperator,
) -> Result<LaplacianMatrix, CoarsenError> {
    if m.fine_count != l.n() {
        return Err(CoarsenError::DimensionMismatch {
            expected: l.n(),
            found: m.fine_count,
        });
    }
    let nc = m.coarse_count;
    let members = m.members();
    let fine = l.matrix();

    // Strict upper triangle, one row per aggregate.
    let mut upper: Vec<Vec<(usize, f64)>> = Vec::with_capacity(nc);
    let mut acc = vec![0.0f64; nc];
    let mut touched: Vec<usize> = Vec::new();
    let mut mark = vec![false; nc];
    for (a, mem) in members.iter().enumerate() {
        for &p in mem {
            let (cols, vals) = fine.row(p);
            for (&q, &v) in cols.iter().zip(vals) {
                let b = m.assignment[q];
                if b <= a {
                    continue;
                }
                if !mark[b] {
                    mark[b] = true;
                    touched.push(b);
                }
                acc[b] += v;
            }
        }
        touched.sort_unstable();
        let mut row = Vec::with_capacity(touched.len());
        for &b in &touched {
            if acc[b] != 0.0 {
                row.push((b, acc[b]));
            }
            acc[b] = 0.0;
            mark[b] = false;
        }
        touched.clear();
        upper.push(row);
    }

    // Mirror: lower entries of row b are the upper entries (a, b) with a < b,
    // which arrive in ascending a when scanning rows in order.
    let mut lower: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nc];
    for (a, row) in upper.iter().enumerate() {
        for &(b, v) in row {
            lower[b].push((a, v));
        }
    }

    let nnz: usize = upper.iter().map(Vec::len).sum::<usize>() * 2 + nc;
    let mut offsets = Vec::with_capacity(nc + 1);
    let mut cols = Vec::with_capacity(nnz);
    let mut vals = Vec::with_capacity(nnz);
    let mut degree = Vec::with_capacity(nc);
    offsets.push(0);
    for a in 0..nc {
        let diag: f64 = -lower[a]
            .iter()
            .chain(upper[a].iter())
            .map(|&(_, v)| v)
            .sum::<f64>();
        for &(b, v) in &lower[a] {
            cols.push(b);
            vals.push(v);
        }
        if diag != 0.0 {
            cols.push(a);
            vals.push(diag);
        }
        for &(b, v) in &upper[a] {
            cols.push(b);
            vals.push(v);
        }
        degree.push(diag);
        offsets.push(cols.len());
    }
    let matrix = SparseMatrix::from_csr(nc, nc, offsets, cols, vals);
    Ok(LaplacianMatrix::from_parts(matrix, degree))
}
