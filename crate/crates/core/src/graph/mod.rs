//! kNN similarity graphs and their unnormalized Laplacians.

mod mtx;
mod sparse;

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataio::Dataset;
use crate::matrix::squared_distance;

pub use mtx::{read_matrix_market, write_matrix_market};
pub use sparse::SparseMatrix;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("k_neighbors must be in [1, {max}], got {k}")]
    BadNeighborCount { k: usize, max: usize },
    #[error("invalid kernel width {0}")]
    BadSigma(f64),
    #[error("adjacency is not a valid similarity graph: {0}")]
    InvalidAdjacency(String),
    #[error("matrix market: {0}")]
    MatrixMarket(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Edge weighting for the kNN graph.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    Binary,
    /// `exp(-d^2 / (2 sigma^2))`; `None` picks sigma as the mean distance to
    /// the k-th neighbour.
    Gaussian {
        sigma: Option<f64>,
    },
}

impl Default for Weighting {
    fn default() -> Self {
        Self::Gaussian { sigma: None }
    }
}

impl std::str::FromStr for Weighting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "binary" => Ok(Self::Binary),
            "gaussian" | "gaussian:auto" => Ok(Self::Gaussian { sigma: None }),
            other => {
                let sigma = other
                    .strip_prefix("gaussian:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| {
                        format!("unknown weighting `{other}` (binary | gaussian[:sigma|:auto])")
                    })?;
                Ok(Self::Gaussian { sigma: Some(sigma) })
            }
        }
    }
}

/// Undirected weighted graph: symmetric, zero-diagonal, nonnegative adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    adjacency: SparseMatrix,
    n_edges: usize,
}

impl SimilarityGraph {
    pub fn from_adjacency(adjacency: SparseMatrix) -> Result<Self, GraphError> {
        adjacency.validate().map_err(GraphError::InvalidAdjacency)?;
        if !adjacency.is_symmetric() {
            return Err(GraphError::InvalidAdjacency("not symmetric".into()));
        }
        for i in 0..adjacency.n_rows() {
            let (cols, vals) = adjacency.row(i);
            if cols.binary_search(&i).is_ok() {
                return Err(GraphError::InvalidAdjacency(format!("self loop at {i}")));
            }
            if vals.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
                return Err(GraphError::InvalidAdjacency(format!(
                    "non-positive or non-finite weight in row {i}"
                )));
            }
        }
        let n_edges = adjacency.nnz() / 2;
        Ok(Self { adjacency, n_edges })
    }

    /// Builds from an undirected edge list; duplicate edges are summed.
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        let mut trip = Vec::with_capacity(edges.len() * 2);
        for &(i, j, w) in edges {
            trip.push((i, j, w));
            trip.push((j, i, w));
        }
        Self::from_adjacency(SparseMatrix::from_triplets(n, n, trip))
    }

    pub fn adjacency(&self) -> &SparseMatrix {
        &self.adjacency
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.n_rows()
    }

    pub fn n_edges(&self) -> usize {
        self.n_edges
    }
}

/// `L = D - A`, stored in CSR with the diagonal wherever the degree is nonzero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplacianMatrix {
    matrix: SparseMatrix,
    degree: Vec<f64>,
}

impl LaplacianMatrix {
    /// Wraps a matrix that is already a Laplacian; the degree vector is read
    /// off the diagonal.
    pub fn from_matrix(matrix: SparseMatrix) -> Self {
        let degree = (0..matrix.n_rows()).map(|i| matrix.get(i, i)).collect();
        Self { matrix, degree }
    }

    pub(crate) fn from_parts(matrix: SparseMatrix, degree: Vec<f64>) -> Self {
        debug_assert_eq!(matrix.n_rows(), degree.len());
        Self { matrix, degree }
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn degree(&self) -> &[f64] {
        &self.degree
    }

    pub fn n(&self) -> usize {
        self.matrix.n_rows()
    }

    /// Number of undirected off-diagonal couplings.
    pub fn n_edges(&self) -> usize {
        let diag = self.degree.iter().filter(|&&d| d != 0.0).count();
        (self.matrix.nnz() - diag) / 2
    }

    /// Checks symmetry, sign pattern and zero row sums (within `tol`).
    pub fn check_invariants(&self, tol: f64) -> Result<(), String> {
        let m = &self.matrix;
        m.validate()?;
        if !m.is_symmetric() {
            return Err("not symmetric".into());
        }
        for i in 0..m.n_rows() {
            let (cols, vals) = m.row(i);
            let mut sum = 0.0;
            let mut scale = 0.0f64;
            for (&j, &v) in cols.iter().zip(vals) {
                if j == i && v < 0.0 {
                    return Err(format!("negative diagonal at {i}"));
                }
                if j != i && v > 0.0 {
                    return Err(format!("positive off-diagonal at ({i}, {j})"));
                }
                sum += v;
                scale = scale.max(v.abs());
            }
            if sum.abs() > tol * scale.max(1.0) {
                return Err(format!("row {i} sums to {sum}"));
            }
        }
        Ok(())
    }
}

/// Exact brute-force kNN graph, symmetrized by union.
///
/// Distance ties are broken by the smaller sample index. With automatic
/// sigma the kernel width is the mean distance to the `k_neighbors`-th
/// neighbour; a zero width degenerates to weight 1 for coincident points.
pub fn build_knn_graph(
    data: &Dataset,
    k_neighbors: usize,
    weighting: Weighting,
) -> Result<SimilarityGraph, GraphError> {
    let n = data.n_samples();
    if k_neighbors == 0 || k_neighbors >= n {
        return Err(GraphError::BadNeighborCount {
            k: k_neighbors,
            max: n.saturating_sub(1),
        });
    }
    if let Weighting::Gaussian { sigma: Some(s) } = weighting {
        if !(s > 0.0) || !s.is_finite() {
            return Err(GraphError::BadSigma(s));
        }
    }
    let x = data.features();

    let neighbors: Vec<Vec<(f64, usize)>> = (0..n)
        .into_par_iter()
        .map(|i| nearest(x.row(i), i, x, k_neighbors))
        .collect();

    let sigma = match weighting {
        Weighting::Binary => 0.0,
        Weighting::Gaussian { sigma: Some(s) } => s,
        Weighting::Gaussian { sigma: None } => {
            neighbors
                .iter()
                .map(|nb| nb[k_neighbors - 1].0.sqrt())
                .sum::<f64>()
                / n as f64
        }
    };

    let mut pairs: Vec<(usize, usize, f64)> = Vec::with_capacity(n * k_neighbors);
    for (i, nb) in neighbors.iter().enumerate() {
        for &(d2, j) in nb {
            pairs.push((i.min(j), i.max(j), d2));
        }
    }
    pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
    pairs.dedup_by_key(|p| (p.0, p.1));

    let mut trip = Vec::with_capacity(pairs.len() * 2);
    for (a, b, d2) in pairs {
        let w = match weighting {
            Weighting::Binary => 1.0,
            Weighting::Gaussian { .. } if sigma == 0.0 => {
                if d2 == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Weighting::Gaussian { .. } => (-d2 / (2.0 * sigma * sigma)).exp(),
        };
        if w > 0.0 {
            trip.push((a, b, w));
            trip.push((b, a, w));
        }
    }
    SimilarityGraph::from_adjacency(SparseMatrix::from_triplets(n, n, trip))
}

/// The `k` nearest rows to `query` (excluding `self_idx`) as sorted
/// `(squared distance, index)` pairs.
fn nearest(
    query: &[f64],
    self_idx: usize,
    x: &crate::matrix::DenseMatrix,
    k: usize,
) -> Vec<(f64, usize)> {
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (j, row) in x.iter_rows().enumerate() {
        if j == self_idx {
            continue;
        }
        let d2 = squared_distance(query, row);
        if best.len() == k && d2 >= best[k - 1].0 {
            continue;
        }
        // Scanning j in ascending order, so equal distances keep the
        // earlier (smaller) index in front.
        let pos = best.partition_point(|&(d, _)| d <= d2);
        best.insert(pos, (d2, j));
        best.truncate(k);
    }
    best
}

/// `L = D - A` with `D = diag(row sums of A)`.
pub fn laplacian(g: &SimilarityGraph) -> LaplacianMatrix {
    let a = g.adjacency();
    let n = a.n_rows();
    let degree = a.row_sums();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(a.nnz() + n);
    let mut vals = Vec::with_capacity(a.nnz() + n);
    offsets.push(0);
    for (i, &deg) in degree.iter().enumerate() {
        let (ac, av) = a.row(i);
        let mut diag_done = deg == 0.0;
        for (&j, &w) in ac.iter().zip(av) {
            if !diag_done && j > i {
                cols.push(i);
                vals.push(deg);
                diag_done = true;
            }
            cols.push(j);
            vals.push(-w);
        }
        if !diag_done {
            cols.push(i);
            vals.push(deg);
        }
        offsets.push(cols.len());
    }
    LaplacianMatrix {
        matrix: SparseMatrix::from_csr(n, n, offsets, cols, vals),
        degree,
    }
}

/// Component id per node, numbered by breadth-first search from the lowest
/// unvisited index.
pub fn connected_components(g: &SimilarityGraph) -> Vec<usize> {
    components_of_pattern(g.adjacency())
}

/// Connected components of the off-diagonal sparsity pattern of a square
/// matrix.
pub fn components_of_pattern(m: &SparseMatrix) -> Vec<usize> {
    let n = m.n_rows();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut queue = VecDeque::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &v in m.row(u).0 {
                if comp[v] == usize::MAX {
                    comp[v] = next;
                    queue.push_back(v);
                }
            }
        }
        next += 1;
    }
    comp
}

pub fn component_count(comp: &[usize]) -> usize {
    comp.iter().max().map_or(0, |&m| m + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::DenseMatrix;

    fn line(xs: &[f64]) -> Dataset {
        let rows: Vec<[f64; 1]> = xs.iter().map(|&x| [x]).collect();
        Dataset::new(DenseMatrix::from_rows(&rows), None, "line").unwrap()
    }

    fn edges(g: &SimilarityGraph) -> Vec<(usize, usize, f64)> {
        let a = g.adjacency();
        let mut out = Vec::new();
        for i in 0..a.n_rows() {
            let (c, v) = a.row(i);
            for (&j, &w) in c.iter().zip(v) {
                if i < j {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    #[test]
    fn colinear_nearest_neighbor() {
        let g = build_knn_graph(&line(&[0.0, 1.0, 2.0]), 1, Weighting::Binary).unwrap();
        // Point 1 is equidistant to 0 and 2; the tie goes to index 0, and
        // point 2 selects 1, so the union still has both edges.
        assert_eq!(edges(&g), vec![(0, 1, 1.0), (1, 2, 1.0)]);
        assert_eq!(g.n_edges(), 2);
    }

    #[test]
    fn k_equal_n_minus_one_is_complete() {
        let g = build_knn_graph(&line(&[0.0, 1.0, 2.0]), 2, Weighting::Binary).unwrap();
        assert_eq!(g.n_edges(), 3);
        let g = build_knn_graph(&line(&[0.3, 5.0, -2.0, 7.5, 1.0]), 4, Weighting::Binary).unwrap();
        assert_eq!(g.n_edges(), 10);
    }

    #[test]
    fn gaussian_two_components() {
        let g = build_knn_graph(
            &line(&[0.0, 1.0, 10.0, 11.0]),
            1,
            Weighting::Gaussian { sigma: Some(1.0) },
        )
        .unwrap();
        let w = (-0.5f64).exp();
        assert_eq!(edges(&g), vec![(0, 1, w), (2, 3, w)]);
        assert_eq!(connected_components(&g), vec![0, 0, 1, 1]);
    }

    #[test]
    fn auto_sigma_is_mean_kth_distance() {
        // k=1 neighbour distances all equal 1, so sigma = 1.
        let g = build_knn_graph(&line(&[0.0, 1.0, 10.0, 11.0]), 1, Weighting::default()).unwrap();
        assert_eq!(g.adjacency().get(0, 1), (-0.5f64).exp());
    }

    #[test]
    fn identical_points_are_legal() {
        let g = build_knn_graph(&line(&[2.0; 4]), 3, Weighting::default()).unwrap();
        assert_eq!(g.n_edges(), 6);
        assert!(g.adjacency().values().iter().all(|&w| w == 1.0));
    }

    #[test]
    fn neighbor_count_out_of_range() {
        let ds = line(&[0.0, 1.0, 2.0]);
        assert!(build_knn_graph(&ds, 0, Weighting::Binary).is_err());
        assert!(build_knn_graph(&ds, 3, Weighting::Binary).is_err());
        assert!(build_knn_graph(&ds, 1, Weighting::Gaussian { sigma: Some(0.0) }).is_err());
    }

    #[test]
    fn path_laplacian() {
        let g = SimilarityGraph::from_edges(3, &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
        let l = laplacian(&g);
        let want = DenseMatrix::from_rows(&[[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]);
        assert_eq!(l.matrix().to_dense(), want);
        assert_eq!(l.degree(), &[1.0, 2.0, 1.0]);
        assert!(l.check_invariants(1e-12).is_ok());
        assert_eq!(l.n_edges(), 2);
    }

    #[test]
    fn empty_graph_laplacian_is_zero() {
        let g = SimilarityGraph::from_edges(3, &[]).unwrap();
        let l = laplacian(&g);
        assert_eq!(l.matrix().nnz(), 0);
        assert_eq!(l.matrix().to_dense(), DenseMatrix::zeros(3, 3));
        assert_eq!(connected_components(&g), vec![0, 1, 2]);
    }

    #[test]
    fn components_of_path() {
        let g = SimilarityGraph::from_edges(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(connected_components(&g), vec![0; 4]);
        let g = SimilarityGraph::from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(connected_components(&g), vec![0, 0, 1, 1]);
    }

    #[test]
    fn rejects_asymmetric_adjacency() {
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 1, 1.0)]);
        assert!(SimilarityGraph::from_adjacency(a).is_err());
        let a = SparseMatrix::from_triplets(2, 2, vec![(0, 0, 1.0)]);
        assert!(SimilarityGraph::from_adjacency(a).is_err());
    }

    #[test]
    fn weighting_parse() {
        assert_eq!("binary".parse::<Weighting>().unwrap(), Weighting::Binary);
        assert_eq!(
            "gaussian".parse::<Weighting>().unwrap(),
            Weighting::Gaussian { sigma: None }
        );
        assert_eq!(
            "gaussian:0.5".parse::<Weighting>().unwrap(),
            Weighting::Gaussian { sigma: Some(0.5) }
        );
        assert!("cosine".parse::<Weighting>().is_err());
    }
}
