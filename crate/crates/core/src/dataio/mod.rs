//! Dataset container, on-disk loaders and synthetic shape generators.

mod csv;
mod idx;
mod libsvm;
mod synthetic;

use std::path::PathBuf;

use thiserror::Error;

use crate::matrix::DenseMatrix;

pub use self::csv::{load_csv, write_csv, LabelColumn};
pub use self::idx::{load_idx, IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC};
pub use self::libsvm::load_libsvm;
pub use self::synthetic::{make_two_circles, make_two_moons};

#[derive(Debug, Error)]
pub enum DataError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error at row {row}, column {col}: {msg}")]
    Parse { row: usize, col: usize, msg: String },
    #[error("row {row} has {found} columns, expected {expected}")]
    Ragged {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("label at row {row} is not a non-negative integer: {value}")]
    BadLabel { row: usize, value: f64 },
    #[error("line {line}: indices not strictly increasing ({prev} then {next})")]
    NonIncreasingIndex {
        line: usize,
        prev: usize,
        next: usize,
    },
    #[error("line {line}: malformed index:value pair `{pair}`")]
    MalformedPair { line: usize, pair: String },
    #[error("wrong magic number: expected {expected:#010x}, found {found:#010x}")]
    WrongMagic { expected: u32, found: u32 },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("image count {images} does not match label count {labels}")]
    CountMismatch { images: usize, labels: usize },
    #[error("label column `{0}` not found")]
    NoSuchColumn(String),
    #[error("empty input")]
    Empty,
    #[error("invalid dataset: {0}")]
    Invalid(String),
}

/// Dense samples-by-features matrix with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: DenseMatrix,
    labels: Option<Vec<usize>>,
    name: String,
}

impl Dataset {
    pub fn new(
        features: DenseMatrix,
        labels: Option<Vec<usize>>,
        name: impl Into<String>,
    ) -> Result<Self, DataError> {
        let (n, d) = features.shape();
        if n == 0 || d == 0 {
            return Err(DataError::Invalid(format!(
                "need at least one sample and one feature, got {n}x{d}"
            )));
        }
        if let Some((idx, _)) = features
            .as_slice()
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite())
        {
            return Err(DataError::Invalid(format!(
                "non-finite feature at sample {}, attribute {}",
                idx / d,
                idx % d
            )));
        }
        if let Some(l) = &labels {
            if l.len() != n {
                return Err(DataError::Invalid(format!(
                    "{} labels for {n} samples",
                    l.len()
                )));
            }
        }
        Ok(Self {
            features,
            labels,
            name: name.into(),
        })
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_samples(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    /// Number of distinct ground-truth classes, if labels are present.
    pub fn n_classes(&self) -> Option<usize> {
        self.labels.as_ref().map(|l| {
            let mut seen: Vec<usize> = l.clone();
            seen.sort_unstable();
            seen.dedup();
            seen.len()
        })
    }

    /// Per-feature min-max scaling to `[0, 1]`. Constant features become 0.
    pub fn min_max_scaled(&self) -> Self {
        let (n, d) = self.features.shape();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for row in self.features.iter_rows() {
            for (j, &v) in row.iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        let mut out = self.features.clone();
        for i in 0..n {
            for (j, v) in out.row_mut(i).iter_mut().enumerate() {
                let span = hi[j] - lo[j];
                *v = if span > 0.0 { (*v - lo[j]) / span } else { 0.0 };
            }
        }
        Self {
            features: out,
            labels: self.labels.clone(),
            name: self.name.clone(),
        }
    }
}

/// Maps arbitrary label values to contiguous ids in order of first appearance.
pub(crate) fn remap_first_appearance<T: PartialEq + Clone>(raw: &[T]) -> Vec<usize> {
    let mut alphabet: Vec<T> = Vec::new();
    raw.iter()
        .map(|v| match alphabet.iter().position(|a| a == v) {
            Some(p) => p,
            None => {
                alphabet.push(v.clone());
                alphabet.len() - 1
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(Dataset::new(DenseMatrix::zeros(0, 3), None, "x").is_err());
        assert!(Dataset::new(DenseMatrix::zeros(3, 0), None, "x").is_err());
        let m = DenseMatrix::from_rows(&[[1.0, f64::NAN]]);
        assert!(Dataset::new(m, None, "x").is_err());
        let m = DenseMatrix::from_rows(&[[1.0], [2.0]]);
        assert!(Dataset::new(m, Some(vec![0]), "x").is_err());
    }

    #[test]
    fn min_max_scaling() {
        let m = DenseMatrix::from_rows(&[[0.0, 5.0, 1.0], [10.0, 5.0, 3.0], [5.0, 5.0, 2.0]]);
        let ds = Dataset::new(m, None, "s").unwrap().min_max_scaled();
        assert_eq!(ds.features().row(0), &[0.0, 0.0, 0.0]);
        assert_eq!(ds.features().row(1), &[1.0, 0.0, 1.0]);
        assert_eq!(ds.features().row(2), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn first_appearance_remap() {
        assert_eq!(
            remap_first_appearance(&[5, 5, 2, 7, 2]),
            vec![0, 0, 1, 2, 1]
        );
    }
}
