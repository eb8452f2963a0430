//! Clustering accuracy under the best one-to-one cluster-to-class matching.

mod hungarian;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::DenseMatrix;

pub use hungarian::{hungarian_max, Assignment};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("label vectors differ in length: {truth} vs {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("assignment weights must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("assignment weights contain non-finite values")]
    NonFinite,
}

/// Counts of (class, cluster) pairs over compacted alphabets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Sorted distinct ground-truth labels; row `i` is `classes[i]`.
    pub classes: Vec<usize>,
    /// Sorted distinct predicted labels; column `j` is `clusters[j]`.
    pub clusters: Vec<usize>,
    pub counts: Vec<Vec<usize>>,
    pub n_samples: usize,
}

impl ConfusionMatrix {
    pub fn new(truth: &[usize], predicted: &[usize]) -> Result<Self, EvalError> {
        if truth.len() != predicted.len() {
            return Err(EvalError::LengthMismatch {
                truth: truth.len(),
                predicted: predicted.len(),
            });
        }
        if truth.is_empty() {
            return Err(EvalError::Empty);
        }
        let classes = sorted_unique(truth);
        let clusters = sorted_unique(predicted);
        let mut counts = vec![vec![0usize; clusters.len()]; classes.len()];
        for (t, p) in truth.iter().zip(predicted) {
            let i = classes.binary_search(t).expect("present");
            let j = clusters.binary_search(p).expect("present");
            counts[i][j] += 1;
        }
        Ok(Self {
            classes,
            clusters,
            counts,
            n_samples: truth.len(),
        })
    }

    /// Square zero-padded profit matrix, rows = classes, columns = clusters.
    fn padded(&self) -> DenseMatrix {
        let s = self.classes.len().max(self.clusters.len());
        let mut w = DenseMatrix::zeros(s, s);
        for (i, row) in self.counts.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                w[(i, j)] = c as f64;
            }
        }
        w
    }
}

fn sorted_unique(xs: &[usize]) -> Vec<usize> {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccReport {
    pub acc: f64,
    pub matched: usize,
    pub n_samples: usize,
    /// Predicted label -> matched ground-truth label. Clusters matched to
    /// no class (more clusters than classes) are absent.
    pub mapping: BTreeMap<usize, usize>,
}

/// Fraction of samples whose cluster maps to their class under the
/// matching that maximizes that fraction.
pub fn accuracy(truth: &[usize], predicted: &[usize]) -> Result<AccReport, EvalError> {
    let cm = ConfusionMatrix::new(truth, predicted)?;
    let a = hungarian_max(&cm.padded())?;
    let mut matched = 0usize;
    let mut mapping = BTreeMap::new();
    for (j, &i) in a.perm.iter().enumerate() {
        if j < cm.clusters.len() && i < cm.classes.len() {
            matched += cm.counts[i][j];
            mapping.insert(cm.clusters[j], cm.classes[i]);
        }
    }
    Ok(AccReport {
        acc: matched as f64 / cm.n_samples as f64,
        matched,
        n_samples: cm.n_samples,
        mapping,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_up_to_relabel() {
        let r = accuracy(&[0, 0, 1, 1, 2], &[5, 5, 3, 3, 9]).unwrap();
        assert_eq!(r.acc, 1.0);
        assert_eq!(r.mapping.get(&5), Some(&0));
        assert_eq!(r.mapping.get(&3), Some(&1));
        assert_eq!(r.mapping.get(&9), Some(&2));
    }

    #[test]
    fn half_right() {
        let r = accuracy(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
        assert_eq!(r.acc, 0.5);
        assert_eq!(r.matched, 2);
    }

    #[test]
    fn more_clusters_than_classes() {
        let r = accuracy(&[0, 0, 0, 1], &[0, 1, 2, 3]).unwrap();
        assert_eq!(r.acc, 0.5);
        assert_eq!(r.mapping.len(), 2);
    }

    #[test]
    fn fewer_clusters_than_classes() {
        let r = accuracy(&[0, 1, 2, 2], &[0, 0, 0, 0]).unwrap();
        assert_eq!(r.acc, 0.5);
        assert_eq!(r.mapping, BTreeMap::from([(0, 2)]));
    }

    #[test]
    fn confusion_counts() {
        let cm = ConfusionMatrix::new(&[2, 4, 4], &[1, 1, 0]).unwrap();
        assert_eq!(cm.classes, vec![2, 4]);
        assert_eq!(cm.clusters, vec![0, 1]);
        assert_eq!(cm.counts, vec![vec![0, 1], vec![1, 1]]);
    }

    #[test]
    fn errors() {
        assert_eq!(
            accuracy(&[0, 1], &[0]),
            Err(EvalError::LengthMismatch {
                truth: 2,
                predicted: 1
            })
        );
        assert_eq!(accuracy(&[], &[]), Err(EvalError::Empty));
    }
}
