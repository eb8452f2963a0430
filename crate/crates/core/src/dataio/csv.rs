use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{DataError, Dataset};
use crate::matrix::DenseMatrix;

/// Which CSV column (if any) holds the ground-truth labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    First,
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header row.
    Name(String),
}

impl std::str::FromStr for LabelColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "first" => Self::First,
            "last" => Self::Last,
            other => match other.parse::<usize>() {
                Ok(i) => Self::Index(i),
                Err(_) => Self::Name(other.to_string()),
            },
        })
    }
}

/// Loads a comma-separated numeric table.
///
/// A first row in which no cell parses as a number is treated as a header.
/// Label values are kept verbatim after checking they are non-negative
/// integers. Row numbers in errors are 1-based file lines.
pub fn load_csv(path: &Path, label_column: Option<LabelColumn>) -> Result<Dataset, DataError> {
    let file = File::open(path).map_err(|source| DataError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    read_csv(file, label_column, name)
}

pub(crate) fn read_csv<R: std::io::Read>(
    reader: R,
    label_column: Option<LabelColumn>,
    name: String,
) -> Result<Dataset, DataError> {
    let mut rdr = ::csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(::csv::Trim::All)
        .from_reader(reader);

    let mut header: Option<Vec<String>> = None;
    let mut width: Option<usize> = None;
    let mut values: Vec<f64> = Vec::new();
    let mut rows = 0usize;
    let mut first = true;

    for record in rdr.records() {
        let record = record.map_err(|e| DataError::Parse {
            row: e.position().map_or(0, |p| p.line() as usize),
            col: 0,
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        if first {
            first = false;
            if record.iter().all(|c| c.parse::<f64>().is_err()) {
                header = Some(record.iter().map(str::to_string).collect());
                width = Some(record.len());
                continue;
            }
        }
        let expected = *width.get_or_insert(record.len());
        if record.len() != expected {
            return Err(DataError::Ragged {
                row: line,
                found: record.len(),
                expected,
            });
        }
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| DataError::Parse {
                row: line,
                col: j + 1,
                msg: format!("`{cell}` is not a number"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let width = match width {
        Some(w) if rows > 0 => w,
        _ => return Err(DataError::Empty),
    };

    let label_idx = match label_column {
        None => None,
        Some(LabelColumn::First) => Some(0),
        Some(LabelColumn::Last) => Some(width - 1),
        Some(LabelColumn::Index(i)) if i < width => Some(i),
        Some(LabelColumn::Index(i)) => return Err(DataError::NoSuchColumn(i.to_string())),
        Some(LabelColumn::Name(n)) => Some(
            header
                .as_ref()
                .and_then(|h| h.iter().position(|c| *c == n))
                .ok_or(DataError::NoSuchColumn(n))?,
        ),
    };

    let Some(li) = label_idx else {
        let features = DenseMatrix::from_vec(rows, width, values);
        return Dataset::new(features, None, name);
    };

    let d = width - 1;
    let mut feats = Vec::with_capacity(rows * d);
    let mut labels = Vec::with_capacity(rows);
    for (r, row) in values.chunks_exact(width).enumerate() {
        let v = row[li];
        if v < 0.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
            return Err(DataError::BadLabel {
                row: r + 1,
                value: v,
            });
        }
        labels.push(v as usize);
        feats.extend(
            row.iter()
                .enumerate()
                .filter(|&(j, _)| j != li)
                .map(|(_, x)| *x),
        );
    }
    Dataset::new(DenseMatrix::from_vec(rows, d, feats), Some(labels), name)
}

/// Writes features (and labels as a trailing column) without a header.
///
/// Floats are written in shortest round-trip form, so reloading with
/// `LabelColumn::Last` reproduces the dataset exactly.
pub fn write_csv(ds: &Dataset, path: &Path) -> Result<(), DataError> {
    let io_err = |source| DataError::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    write_csv_to(ds, &mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

pub(crate) fn write_csv_to<W: Write>(ds: &Dataset, w: &mut W) -> std::io::Result<()> {
    for (i, row) in ds.features().iter_rows().enumerate() {
        let mut first = true;
        for v in row {
            if !first {
                w.write_all(b",")?;
            }
            first = false;
            write!(w, "{v:?}")?;
        }
        if let Some(l) = ds.labels() {
            write!(w, ",{}", l[i])?;
        }
        w.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str, lc: Option<LabelColumn>) -> Result<Dataset, DataError> {
        read_csv(text.as_bytes(), lc, "t".into())
    }

    #[test]
    fn reads_plain_table() {
        let ds = parse("1,2\n3,4\n5,6", None).unwrap();
        assert_eq!(ds.n_samples(), 3);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.features().row(2), &[5.0, 6.0]);
        assert!(ds.labels().is_none());
    }

    #[test]
    fn splits_last_column_as_labels() {
        let ds = parse("1,2\n3,4\n5,6", Some(LabelColumn::Last)).unwrap();
        assert_eq!(ds.n_features(), 1);
        assert_eq!(ds.labels().unwrap(), &[2, 4, 6]);
        assert_eq!(ds.features().column(0), vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn parse_error_names_row() {
        match parse("1,x", None) {
            Err(DataError::Parse { row, col, .. }) => {
                assert_eq!(row, 1);
                assert_eq!(col, 2);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        match parse("1,2\n3,zz\n", None) {
            Err(DataError::Parse { row: 2, .. }) => {}
            other => panic!("expected parse error on row 2, got {other:?}"),
        }
    }

    #[test]
    fn ragged_rows_rejected() {
        assert!(matches!(
            parse("1,2\n3\n", None),
            Err(DataError::Ragged {
                row: 2,
                found: 1,
                expected: 2
            })
        ));
    }

    #[test]
    fn header_detected_and_named_column() {
        let ds = parse("a,b,label\n1,2,0\n3,4,1\n", Some("label".parse().unwrap())).unwrap();
        assert_eq!(ds.n_samples(), 2);
        assert_eq!(ds.labels().unwrap(), &[0, 1]);
        assert!(matches!(
            parse("a,b\n1,2\n", Some(LabelColumn::Name("zz".into()))),
            Err(DataError::NoSuchColumn(_))
        ));
    }

    #[test]
    fn non_integral_label_rejected() {
        assert!(matches!(
            parse("1,0.5\n", Some(LabelColumn::Last)),
            Err(DataError::BadLabel { row: 1, .. })
        ));
        assert!(matches!(
            parse("1,-1\n", Some(LabelColumn::Last)),
            Err(DataError::BadLabel { .. })
        ));
    }

    #[test]
    fn empty_is_error() {
        assert!(matches!(parse("", None), Err(DataError::Empty)));
        assert!(matches!(parse("a,b\n", None), Err(DataError::Empty)));
    }
}
