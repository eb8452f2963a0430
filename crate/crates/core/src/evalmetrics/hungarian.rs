//! Maximum-profit assignment (Kuhn-Munkres with row/column potentials).

use super::EvalError;
use crate::matrix::DenseMatrix;

/// `perm[j]` is the row assigned to column `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub profit: f64,
}

/// Square assignment maximizing `sum_j weights[perm[j]][j]`. Among optimal
/// assignments the lexicographically smallest `perm` is returned.
pub fn hungarian_max(weights: &DenseMatrix) -> Result<Assignment, EvalError> {
    let (r, c) = weights.shape();
    if r != c {
        return Err(EvalError::NotSquare { rows: r, cols: c });
    }
    if !weights.is_finite() {
        return Err(EvalError::NonFinite);
    }
    let n = r;
    if n == 0 {
        return Ok(Assignment {
            perm: Vec::new(),
            profit: 0.0,
        });
    }
    let scale = weights
        .as_slice()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let tol = 1e-9 * (1.0 + scale * n as f64);

    let (_, opt) = max_assignment(
        weights,
        &(0..n).collect::<Vec<_>>(),
        &(0..n).collect::<Vec<_>>(),
    );

    // Fix columns left to right, taking the smallest row that still admits
    // an optimal completion.
    let mut perm = Vec::with_capacity(n);
    let mut free_rows: Vec<usize> = (0..n).collect();
    let mut fixed = 0.0;
    for j in 0..n {
        let rest_cols: Vec<usize> = (j + 1..n).collect();
        let mut picked = None;
        for (pos, &row) in free_rows.iter().enumerate() {
            let rest_rows: Vec<usize> = free_rows.iter().copied().filter(|&x| x != row).collect();
            let (_, rest) = max_assignment(weights, &rest_rows, &rest_cols);
            if fixed + weights[(row, j)] + rest >= opt - tol {
                picked = Some(pos);
                break;
            }
        }
        let pos = picked.expect("some row completes an optimal assignment");
        let row = free_rows.remove(pos);
        fixed += weights[(row, j)];
        perm.push(row);
    }
    let profit = perm.iter().enumerate().map(|(j, &i)| weights[(i, j)]).sum();
    Ok(Assignment { perm, profit })
}

/// Optimal assignment on the submatrix `rows x cols` (equal lengths).
/// Returns, per column position, the matched row and the total profit.
fn max_assignment(w: &DenseMatrix, rows: &[usize], cols: &[usize]) -> (Vec<usize>, f64) {
    let n = rows.len();
    debug_assert_eq!(n, cols.len());
    if n == 0 {
        return (Vec::new(), 0.0);
    }
    // Minimize cost = -profit. 1-based arrays with a sentinel at index 0.
    let cost = |i: usize, j: usize| -w[(rows[i - 1], cols[j - 1])];
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if used[j] {
                    continue;
                }
                let cur = cost(i0, j) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let matched: Vec<usize> = (1..=n).map(|j| rows[p[j] - 1]).collect();
    let profit = matched
        .iter()
        .enumerate()
        .map(|(jj, &row)| w[(row, cols[jj])])
        .sum();
    (matched, profit)
}
