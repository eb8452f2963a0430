//! Spectrum-preserving node reduction.
//!
//! Each level relaxes a handful of random vectors on `L x = 0`, measures how
//! parallel neighbouring nodes' relaxed values are, merges
//! highly-similar neighbours into aggregates, and forms the coarse Laplacian
//! by the Galerkin product `H L H^T`. Composing the per-level assignments
//! gives the correspondence table from original samples to pseudo-nodes.

mod aggregate;
mod galerkin;
mod smooth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::LaplacianMatrix;

pub use aggregate::{affinity, aggregate_level, MappingOperator};
pub use galerkin::galerkin_reduce;
pub use smooth::{
    gauss_seidel, smooth_test_vectors, smooth_test_vectors_with, SweepOrder, TestVectors,
};

#[derive(Debug, Error)]
pub enum CoarsenError {
    #[error("Laplacian has a zero diagonal at non-isolated node {0}")]
    ZeroDiagonal(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid coarsening parameter: {0}")]
    InvalidParam(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CoarsenParams {
    /// Number of relaxed test vectors.
    pub test_vectors: usize,
    /// Gauss-Seidel sweeps per test vector.
    pub sweeps: usize,
    /// Affinity cutoff for merging a node into a neighbour's aggregate.
    pub threshold: f64,
    pub max_agg_size: usize,
    pub max_levels: usize,
    pub sweep_order: SweepOrder,
    pub seed: u64,
}

impl Default for CoarsenParams {
    fn default() -> Self {
        Self {
            test_vectors: 8,
            sweeps: 4,
            threshold: 0.5,
            max_agg_size: 8,
            max_levels: 20,
            sweep_order: SweepOrder::Forward,
            seed: 42,
        }
    }
}

impl CoarsenParams {
    pub fn validate(&self) -> Result<(), CoarsenError> {
        let bad = |m: String| Err(CoarsenError::InvalidParam(m));
        if self.test_vectors == 0 {
            return bad("test vector count must be >= 1".into());
        }
        if self.sweeps == 0 {
            return bad("sweep count must be >= 1".into());
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return bad(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            ));
        }
        if self.max_agg_size < 2 {
            return bad(format!(
                "max_agg_size must be >= 2, got {}",
                self.max_agg_size
            ));
        }
        Ok(())
    }
}

/// Minimum relative shrink a level must achieve before coarsening is
/// considered stalled.
pub const STALL_SHRINK: f64 = 0.05;

/// One coarsening step: the map from the previous level and the resulting
/// coarse Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseLevel {
    pub mapping: MappingOperator,
    pub laplacian: LaplacianMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseningHierarchy {
    /// Finest to coarsest; empty when no reduction was requested.
    pub levels: Vec<CoarseLevel>,
    /// Original node -> coarsest pseudo-node.
    pub correspondence: Vec<usize>,
    /// Node count per level, starting with the original graph.
    pub sizes: Vec<usize>,
    /// Undirected edge count per level, starting with the original graph.
    pub edges: Vec<usize>,
    /// Set when the requested size could not be reached.
    pub warning: Option<String>,
}

impl CoarseningHierarchy {
    pub fn identity(l: &LaplacianMatrix) -> Self {
        Self {
            levels: Vec::new(),
            correspondence: (0..l.n()).collect(),
            sizes: vec![l.n()],
            edges: vec![l.n_edges()],
            warning: None,
        }
    }

    pub fn coarse_count(&self) -> usize {
        *self
            .sizes
            .last()
            .expect("sizes always holds the fine level")
    }

    /// The coarsest Laplacian, falling back to `fine` when there are no levels.
    pub fn coarsest<'a>(&'a self, fine: &'a LaplacianMatrix) -> &'a LaplacianMatrix {
        self.levels.last().map_or(fine, |lvl| &lvl.laplacian)
    }

    /// Composes the per-level assignments one level at a time.
    pub fn compose_levels(&self, n: usize) -> Vec<usize> {
        let mut cur: Vec<usize> = (0..n).collect();
        for lvl in &self.levels {
            for c in cur.iter_mut() {
                *c = lvl.mapping.assignment[*c];
            }
        }
        cur
    }

    pub fn dump(&self) -> HierarchyDump {
        HierarchyDump {
            fine_nodes: self.sizes[0],
            fine_edges: self.edges[0],
            levels: self
                .levels
                .iter()
                .enumerate()
                .map(|(i, lvl)| LevelDump {
                    level: i + 1,
                    nodes: lvl.mapping.coarse_count,
                    edges: lvl.laplacian.n_edges(),
                    assignment: lvl.mapping.assignment.clone(),
                })
                .collect(),
            correspondence: self.correspondence.clone(),
            warning: self.warning.clone(),
        }
    }
}

/// JSON-serializable summary of a hierarchy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyDump {
    pub fine_nodes: usize,
    pub fine_edges: usize,
    pub levels: Vec<LevelDump>,
    pub correspondence: Vec<usize>,
    pub warning: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDump {
    pub level: usize,
    pub nodes: usize,
    pub edges: usize,
    pub assignment: Vec<usize>,
}

/// Coarsens until the node count drops to `n / target_ratio`.
///
/// The loop stops at the first level at or below the target, when
/// `max_levels` is reached, or when a level shrinks by less than
/// [`STALL_SHRINK`]. If the final step overshoots the target by more (in
/// log-ratio) than the level before it undershoots, the final step is
/// dropped. An unreachable target sets `warning` instead of failing.
pub fn build_hierarchy(
    l: &LaplacianMatrix,
    target_ratio: f64,
    params: &CoarsenParams,
) -> Result<CoarseningHierarchy, CoarsenError> {
    if !(target_ratio >= 1.0) || !target_ratio.is_finite() {
        return Err(CoarsenError::InvalidParam(format!(
            "target ratio must be >= 1, got {target_ratio}"
        )));
    }
    params.validate()?;
    let mut h = CoarseningHierarchy::identity(l);
    let n = l.n();
    let target = n as f64 / target_ratio;
    if (n as f64) <= target || n <= 1 {
        return Ok(h);
    }

    let mut reached = false;
    let mut stalled = false;
    for level in 0..params.max_levels {
        let current = h.coarsest(l);
        let fine_n = current.n();
        let tv = smooth_test_vectors_with(
            current,
            params.test_vectors,
            params.sweeps,
            params.seed.wrapping_add(level as u64),
            params.sweep_order,
        )?;
        let mapping = aggregate_level(current, &tv, params.threshold, params.max_agg_size)?;
        if mapping.coarse_count == fine_n {
            stalled = true;
            break;
        }
        let coarse = galerkin_reduce(current, &mapping)?;
        let shrink = 1.0 - mapping.coarse_count as f64 / fine_n as f64;
        h.sizes.push(coarse.n());
        h.edges.push(coarse.n_edges());
        h.levels.push(CoarseLevel {
            mapping,
            laplacian: coarse,
        });
        if h.coarse_count() as f64 <= target {
            reached = true;
            break;
        }
        if shrink < STALL_SHRINK {
            stalled = true;
            break;
        }
    }

    if reached && h.levels.len() >= 2 {
        let last = h.coarse_count() as f64;
        let prev = h.sizes[h.sizes.len() - 2] as f64;
        if (prev / target).ln() < (target / last).ln() {
            h.levels.pop();
            h.sizes.pop();
            h.edges.pop();
        }
    }
    if !reached {
        h.warning = Some(format!(
            "target of {:.0} nodes not reached ({}); stopped at {} nodes after {} levels",
            target,
            if stalled {
                "coarsening stalled"
            } else {
                "max_levels reached"
            },
            h.coarse_count(),
            h.levels.len()
        ));
    }
    h.correspondence = h.compose_levels(n);
    Ok(h)
}
