use std::fs;
use std::path::Path;

use super::{remap_first_appearance, DataError, Dataset};
use crate::matrix::DenseMatrix;

/// Loads `<label> <idx>:<val> ...` lines with 1-based, strictly increasing
/// indices. Missing entries are zero; labels are remapped to contiguous ids
/// in order of first appearance.
pub fn load_libsvm(path: &Path) -> Result<Dataset, DataError> {
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_libsvm(&text, name)
}

pub(crate) fn parse_libsvm(text: &str, name: String) -> Result<Dataset, DataError> {
    let mut raw_labels: Vec<f64> = Vec::new();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::new();
    let mut dim = 0usize;

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut tokens = content.split_whitespace();
        let label_tok = tokens.next().expect("non-empty line has a token");
        let label: f64 = label_tok.parse().map_err(|_| DataError::Parse {
            row: line_no,
            col: 1,
            msg: format!("label `{label_tok}` is not a number"),
        })?;
        let mut entries = Vec::new();
        let mut prev = 0usize;
        for pair in tokens {
            let malformed = || DataError::MalformedPair {
                line: line_no,
                pair: pair.to_string(),
            };
            let (i, v) = pair.split_once(':').ok_or_else(malformed)?;
            let idx: usize = i.parse().map_err(|_| malformed())?;
            let val: f64 = v.parse().map_err(|_| malformed())?;
            if idx == 0 || !val.is_finite() {
                return Err(malformed());
            }
            if idx <= prev {
                return Err(DataError::NonIncreasingIndex {
                    line: line_no,
                    prev,
                    next: idx,
                });
            }
            prev = idx;
            dim = dim.max(idx);
            if val != 0.0 {
                entries.push((idx - 1, val));
            }
        }
        raw_labels.push(label);
        rows.push(entries);
    }
    if rows.is_empty() {
        return Err(DataError::Empty);
    }
    let dim = dim.max(1);
    let mut features = DenseMatrix::zeros(rows.len(), dim);
    for (r, entries) in rows.iter().enumerate() {
        for &(j, v) in entries {
            features[(r, j)] = v;
        }
    }
    let labels = remap_first_appearance(&raw_labels);
    Dataset::new(features, Some(labels), name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decodes_sparse_rows() {
        let ds = parse_libsvm("1 1:0.5 3:2.0\n2 2:1.0", "t".into()).unwrap();
        assert_eq!(ds.n_samples(), 2);
        assert_eq!(ds.n_features(), 3);
        assert_eq!(ds.features().row(0), &[0.5, 0.0, 2.0]);
        assert_eq!(ds.features().row(1), &[0.0, 1.0, 0.0]);
        assert_eq!(ds.labels().unwrap(), &[0, 1]);
    }

    #[test]
    fn remaps_labels() {
        let ds = parse_libsvm("5 1:1.0\n5 1:2.0", "t".into()).unwrap();
        assert_eq!(ds.labels().unwrap(), &[0, 0]);
        let ds = parse_libsvm("+1 1:1\n-1 1:2\n1 1:3", "t".into()).unwrap();
        assert_eq!(ds.labels().unwrap(), &[0, 1, 0]);
    }

    #[test]
    fn rejects_non_increasing_indices() {
        assert!(matches!(
            parse_libsvm("1 3:1 2:1", "t".into()),
            Err(DataError::NonIncreasingIndex {
                line: 1,
                prev: 3,
                next: 2
            })
        ));
        assert!(matches!(
            parse_libsvm("1 2:1 2:1", "t".into()),
            Err(DataError::NonIncreasingIndex { .. })
        ));
    }

    #[test]
    fn rejects_malformed_and_empty() {
        assert!(matches!(
            parse_libsvm("1 3=1", "t".into()),
            Err(DataError::MalformedPair { .. })
        ));
        assert!(matches!(
            parse_libsvm("1 0:1", "t".into()),
            Err(DataError::MalformedPair { .. })
        ));
        assert!(matches!(
            parse_libsvm("\n\n", "t".into()),
            Err(DataError::Empty)
        ));
    }
}
