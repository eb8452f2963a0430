//! Independent oracles shared by the integration tests: a cyclic Jacobi
//! eigensolver, random graph generators, exhaustive assignment and partition
//! searches.
#![allow(dead_code)]

use rand::Rng;
use spcluster::graph::{laplacian, LaplacianMatrix, SimilarityGraph};
use spcluster::matrix::DenseMatrix;

/// Cyclic Jacobi rotations. Eigenvalues ascending; `vectors[i]` belongs to
/// `values[i]`.
pub fn jacobi_eigen(a: &DenseMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.rows();
    assert_eq!(n, a.cols());
    let mut m = a.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let frob: f64 = m.iter().map(|x| x * x).sum::<f64>().sqrt();
    for _ in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += m[i * n + j] * m[i * n + j];
                }
            }
        }
        if off.sqrt() <= 1e-15 * frob.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i * n + i].total_cmp(&m[j * n + j]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&c| (0..n).map(|r| v[r * n + c]).collect())
        .collect();
    (values, vectors)
}

/// Erdős–Rényi graph with uniform weights in `[0.1, 2)`.
pub fn random_graph(rng: &mut impl Rng, n: usize, p: f64) -> SimilarityGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                edges.push((i, j, rng.random_range(0.1..2.0)));
            }
        }
    }
    SimilarityGraph::from_edges(n, &edges).unwrap()
}

pub fn random_laplacian(rng: &mut impl Rng, n: usize, p: f64) -> LaplacianMatrix {
    laplacian(&random_graph(rng, n, p))
}

/// Surjective assignment of `n` nodes onto `1..=n` groups, numbered densely.
pub fn random_assignment(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    let groups = rng.random_range(1..=n);
    let raw: Vec<usize> = (0..n).map(|_| rng.random_range(0..groups)).collect();
    let mut remap = vec![usize::MAX; groups];
    let mut next = 0;
    raw.into_iter()
        .map(|g| {
            if remap[g] == usize::MAX {
                remap[g] = next;
                next += 1;
            }
            remap[g]
        })
        .collect()
}

/// Dense `H L H^T` from the definition.
pub fn triple_product(l: &DenseMatrix, assignment: &[usize], coarse: usize) -> DenseMatrix {
    let mut h = DenseMatrix::zeros(coarse, assignment.len());
    for (p, &a) in assignment.iter().enumerate() {
        h[(a, p)] = 1.0;
    }
    h.matmul(l).matmul(&h.transpose())
}

/// Zero row sums, exact symmetry, nonpositive off-diagonal, nonnegative
/// diagonal, and PSD by the Jacobi oracle.
pub fn check_laplacian(l: &LaplacianMatrix, tol: f64) -> Result<(), String> {
    let d = l.matrix().to_dense();
    let n = d.rows();
    let mut scale: f64 = 1.0;
    for i in 0..n {
        let s: f64 = d.row(i).iter().sum();
        if s.abs() > tol {
            return Err(format!("row {i} sums to {s:e}"));
        }
        scale = scale.max(d[(i, i)].abs());
        if d[(i, i)] < 0.0 {
            return Err(format!("negative diagonal at {i}"));
        }
        for j in 0..n {
            if d[(i, j)] != d[(j, i)] {
                return Err(format!("asymmetric at ({i},{j})"));
            }
            if i != j && d[(i, j)] > 0.0 {
                return Err(format!("positive off-diagonal at ({i},{j})"));
            }
        }
    }
    let (vals, _) = jacobi_eigen(&d);
    if let Some(&min) = vals.first() {
        if min < -tol * scale {
            return Err(format!("not PSD: smallest eigenvalue {min:e}"));
        }
    }
    Ok(())
}

/// Eigenvector of the smallest eigenvalue of `L + s 11^T / n` with `s`
/// above the spectrum: the Fiedler vector, orthogonal to the constant vector
/// even when `L` has several zero eigenvalues.
pub fn fiedler(l: &DenseMatrix) -> Vec<f64> {
    let n = l.rows();
    let shift = 2.0 * (0..n).map(|i| l[(i, i)]).fold(0.0, f64::max) + 1.0;
    let mut m = l.clone();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] += shift / n as f64;
        }
    }
    let (_, vecs) = jacobi_eigen(&m);
    vecs.into_iter().next().unwrap()
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

/// Best profit `sum_j w[perm[j]][j]` over all permutations, and the
/// lexicographically first permutation attaining it.
pub fn brute_force_assignment(w: &DenseMatrix) -> (f64, Vec<usize>) {
    let k = w.rows();
    let mut best = (f64::NEG_INFINITY, Vec::new());
    for perm in permutations(k) {
        let profit: f64 = perm.iter().enumerate().map(|(j, &i)| w[(i, j)]).sum();
        if profit > best.0 {
            best = (profit, perm);
        }
    }
    best
}

/// Minimum of `sum_i |x_i - mean(cluster(i))|` over every split of 1-D
/// points into two nonempty clusters, with the minimizing assignment
/// (point 0 in cluster 0).
pub fn best_two_partition_1d(xs: &[f64]) -> (f64, Vec<usize>) {
    let n = xs.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << n) {
        if mask & 1 != 0 || mask == 0 {
            continue;
        }
        let a: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
        let mut f = 0.0;
        for c in 0..2 {
            let pts: Vec<f64> = (0..n).filter(|&i| a[i] == c).map(|i| xs[i]).collect();
            let mean = pts.iter().sum::<f64>() / pts.len() as f64;
            f += pts.iter().map(|x| (x - mean).abs()).sum::<f64>();
        }
        if f < best.0 {
            best = (f, a);
        }
    }
    best
}

/// Fraction of nodes whose signs agree, maximized over a global sign flip.
pub fn sign_agreement(a: &[f64], b: &[f64]) -> f64 {
    let same = a
        .iter()
        .zip(b)
        .filter(|(x, y)| (**x >= 0.0) == (**y >= 0.0))
        .count() as f64
        / a.len() as f64;
    same.max(1.0 - same)
}
