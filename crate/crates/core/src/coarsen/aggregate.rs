use serde::{Deserialize, Serialize};

use super::{CoarsenError, TestVectors};
use crate::graph::LaplacianMatrix;
use crate::matrix::{dot, DenseMatrix};

/// Piecewise-constant fine-to-coarse map: `assignment[p]` is the aggregate
/// holding fine node `p`. As a matrix `H` (coarse x fine) it has a single 1
/// per column; prolongation is `H^T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingOperator {
    pub fine_count: usize,
    pub coarse_count: usize,
    pub assignment: Vec<usize>,
}

impl MappingOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            fine_count: n,
            coarse_count: n,
            assignment: (0..n).collect(),
        }
    }

    /// Validates surjectivity and range; coarse ids are taken as given.
    pub fn new(assignment: Vec<usize>) -> Result<Self, CoarsenError> {
        let coarse_count = assignment.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; coarse_count];
        for &a in &assignment {
            seen[a] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(CoarsenError::InvalidParam(format!(
                "aggregate {missing} has no members"
            )));
        }
        Ok(Self {
            fine_count: assignment.len(),
            coarse_count,
            assignment,
        })
    }

    /// Fine nodes of each aggregate, in ascending order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.coarse_count];
        for (p, &a) in self.assignment.iter().enumerate() {
            out[a].push(p);
        }
        out
    }

    /// Dense `coarse_count x fine_count` 0/1 matrix.
    pub fn to_dense(&self) -> DenseMatrix {
        let mut h = DenseMatrix::zeros(self.coarse_count, self.fine_count);
        for (p, &a) in self.assignment.iter().enumerate() {
            h[(a, p)] = 1.0;
        }
        h
    }

    /// Copies coarse values back to fine nodes (`H^T v`).
    pub fn prolongate(&self, coarse: &[f64]) -> Vec<f64> {
        assert_eq!(coarse.len(), self.coarse_count);
        self.assignment.iter().map(|&a| coarse[a]).collect()
    }
}

/// Squared cosine between the test-vector rows of `p` and `q`. A zero row
/// carries no spectral signal and yields 0.
pub fn affinity(tv: &TestVectors, p: usize, q: usize) -> f64 {
    let xp = tv.vectors.row(p);
    let xq = tv.vectors.row(q);
    affinity_with_norms(xp, xq, dot(xp, xp), dot(xq, xq))
}

#[inline]
fn affinity_with_norms(xp: &[f64], xq: &[f64], npp: f64, nqq: f64) -> f64 {
    if npp == 0.0 || nqq == 0.0 {
        return 0.0;
    }
    let pq = dot(xp, xq);
    // Dividing twice keeps the intermediate bounded when the norms are tiny.
    ((pq / npp) * (pq / nqq)).min(1.0)
}

/// Greedy single pass in ascending node id: an unassigned node joins the
/// aggregate of its highest-affinity neighbour when that affinity reaches
/// `threshold` and the aggregate still has room, otherwise it seeds a new
/// aggregate. Coarse ids are numbered by first appearance.
pub fn aggregate_level(
    l: &LaplacianMatrix,
    tv: &TestVectors,
    threshold: f64,
    max_agg_size: usize,
) -> Result<MappingOperator, CoarsenError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(CoarsenError::InvalidParam(format!(
            "affinity threshold must lie in (0, 1), got {threshold}"
        )));
    }
    if max_agg_size < 2 {
        return Err(CoarsenError::InvalidParam(format!(
            "max aggregate size must be >= 2, got {max_agg_size}"
        )));
    }
    let n = l.n();
    if tv.n_nodes() != n {
        return Err(CoarsenError::DimensionMismatch {
            expected: n,
            found: tv.n_nodes(),
        });
    }
    let x = &tv.vectors;
    let self_norms: Vec<f64> = x.iter_rows().map(|r| dot(r, r)).collect();

    const UNASSIGNED: usize = usize::MAX;
    let mut assignment = vec![UNASSIGNED; n];
    let mut sizes: Vec<usize> = Vec::new();

    for p in 0..n {
        if assignment[p] != UNASSIGNED {
            continue;
        }
        let xp = x.row(p);
        let mut best: Option<(f64, usize)> = None;
        let (cols, _) = l.matrix().row(p);
        for &q in cols {
            if q == p {
                continue;
            }
            let c = affinity_with_norms(xp, x.row(q), self_norms[p], self_norms[q]);
            // Columns are ascending, so a strict comparison keeps the
            // smaller id on ties.
            if best.is_none_or(|(bc, _)| c > bc) {
                best = Some((c, q));
            }
        }
        let target = match best {
            Some((c, q)) if c >= threshold => match assignment[q] {
                UNASSIGNED => {
                    let id = sizes.len();
                    sizes.push(1);
                    assignment[q] = id;
                    Some(id)
                }
                a if sizes[a] < max_agg_size => Some(a),
                _ => None,
            },
            _ => None,
        };
        let id = target.unwrap_or_else(|| {
            sizes.push(0);
            sizes.len() - 1
        });
        assignment[p] = id;
        sizes[id] += 1;
    }

    // Renumber by first appearance in fine order.
    let mut remap = vec![UNASSIGNED; sizes.len()];
    let mut next = 0;
    for a in assignment.iter_mut() {
        if remap[*a] == UNASSIGNED {
            remap[*a] = next;
            next += 1;
        }
        *a = remap[*a];
    }
    Ok(MappingOperator {
        fine_count: n,
        coarse_count: next,
        assignment,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{laplacian, SimilarityGraph};

    fn tv(rows: &[&[f64]]) -> TestVectors {
        TestVectors {
            vectors: DenseMatrix::from_rows(rows),
            sweeps: 1,
        }
    }

    #[test]
    fn affinity_examples() {
        let t = tv(&[
            &[1.0, 2.0],
            &[1.0, 2.0],
            &[1.0, 0.0],
            &[0.0, 1.0],
            &[1.0, 1.0],
            &[0.0, 0.0],
        ]);
        assert_eq!(affinity(&t, 0, 1), 1.0);
        assert_eq!(affinity(&t, 2, 3), 0.0);
        assert_eq!(affinity(&t, 4, 2), 0.5);
        assert_eq!(affinity(&t, 2, 4), 0.5);
        assert_eq!(affinity(&t, 5, 0), 0.0);
    }

    fn path(n: usize) -> LaplacianMatrix {
        let e: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
        laplacian(&SimilarityGraph::from_edges(n, &e).unwrap())
    }

    #[test]
    fn capped_chain_on_constant_vectors() {
        let l = path(4);
        let t = tv(&[&[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0], &[1.0, 1.0]]);
        let m = aggregate_level(&l, &t, 1.0 - 1e-9, 2).unwrap();
        assert_eq!(m.assignment, vec![0, 0, 1, 1]);
        assert_eq!(m.coarse_count, 2);
        let m = aggregate_level(&l, &t, 0.5, 8).unwrap();
        assert_eq!(m.assignment, vec![0, 0, 0, 0]);
    }

    #[test]
    fn orthogonal_rows_stay_singletons() {
        let l = path(3);
        let t = tv(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let m = aggregate_level(&l, &t, 0.9, 4).unwrap();
        assert_eq!(m, MappingOperator::identity(3));
    }

    #[test]
    fn aggregates_respect_components() {
        let e = [
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (3, 5, 1.0),
        ];
        let l = laplacian(&SimilarityGraph::from_edges(6, &e).unwrap());
        let one: &[f64] = &[1.0];
        let t = tv(&[one; 6]);
        let m = aggregate_level(&l, &t, 0.5, 8).unwrap();
        assert_eq!(m.assignment, vec![0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn parameter_checks() {
        let l = path(3);
        let t = tv(&[&[1.0], &[1.0], &[1.0]]);
        assert!(aggregate_level(&l, &t, 0.0, 4).is_err());
        assert!(aggregate_level(&l, &t, 1.0, 4).is_err());
        assert!(aggregate_level(&l, &t, 0.5, 1).is_err());
        let short = tv(&[&[1.0], &[1.0]]);
        assert!(aggregate_level(&l, &short, 0.5, 4).is_err());
    }

    #[test]
    fn mapping_helpers() {
        let m = MappingOperator::new(vec![1, 0, 1]).unwrap();
        assert_eq!(m.coarse_count, 2);
        assert_eq!(m.members(), vec![vec![1], vec![0, 2]]);
        assert_eq!(m.prolongate(&[5.0, 7.0]), vec![7.0, 5.0, 7.0]);
        assert!(MappingOperator::new(vec![0, 2]).is_err());
    }
}
