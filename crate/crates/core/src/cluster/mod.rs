//! k-means on the spectral embedding and membership lift-back through the
//! correspondence table.

mod kmeans;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coarsen::CoarseningHierarchy;

pub use kmeans::{kmeans, objective, KMeansParams, KMeansResult};

#[derive(Debug, Error)]
pub enum ClusterError {
    #[error("cannot form {k} clusters from {points} points")]
    TooManyClusters { k: usize, points: usize },
    #[error("input contains non-finite values")]
    NonFinite,
    #[error("invalid k-means parameter: {0}")]
    InvalidParam(String),
    #[error("expected {expected} coarse labels, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}

/// Cluster ids for every original sample and for every pseudo-node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterResult {
    pub labels: Vec<usize>,
    pub coarse_labels: Vec<usize>,
    pub k: usize,
}

/// `labels[i] = coarse_labels[correspondence[i]]`.
pub fn lift_membership(
    coarse_labels: &[usize],
    hierarchy: &CoarseningHierarchy,
) -> Result<ClusterResult, ClusterError> {
    let expected = hierarchy.coarse_count();
    if coarse_labels.len() != expected {
        return Err(ClusterError::LengthMismatch {
            expected,
            found: coarse_labels.len(),
        });
    }
    let labels = hierarchy
        .correspondence
        .iter()
        .map(|&c| coarse_labels[c])
        .collect();
    Ok(ClusterResult {
        labels,
        coarse_labels: coarse_labels.to_vec(),
        k: coarse_labels.iter().max().map_or(0, |&m| m + 1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hierarchy(correspondence: Vec<usize>) -> CoarseningHierarchy {
        let p = correspondence.iter().max().map_or(0, |&m| m + 1);
        CoarseningHierarchy {
            levels: Vec::new(),
            sizes: vec![correspondence.len(), p],
            edges: vec![0, 0],
            correspondence,
            warning: None,
        }
    }

    #[test]
    fn identity_lift() {
        let h = hierarchy(vec![0, 1, 2]);
        let r = lift_membership(&[2, 0, 1], &h).unwrap();
        assert_eq!(r.labels, vec![2, 0, 1]);
        assert_eq!(r.k, 3);
    }

    #[test]
    fn table_lookup() {
        let h = hierarchy(vec![0, 0, 1, 1]);
        let r = lift_membership(&[1, 0], &h).unwrap();
        assert_eq!(r.labels, vec![1, 1, 0, 0]);
        assert_eq!(r.coarse_labels, vec![1, 0]);
    }

    #[test]
    fn single_pseudo_node() {
        let h = hierarchy(vec![0; 5]);
        let r = lift_membership(&[3], &h).unwrap();
        assert_eq!(r.labels, vec![3; 5]);
    }

    #[test]
    fn length_mismatch() {
        let h = hierarchy(vec![0, 0, 1, 1]);
        assert!(matches!(
            lift_membership(&[0], &h),
            Err(ClusterError::LengthMismatch {
                expected: 2,
                found: 1
            })
        ));
    }
}
