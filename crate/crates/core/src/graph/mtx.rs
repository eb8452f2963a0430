//! Matrix Market (coordinate, real, symmetric) dump and load for similarity
//! graphs. Only the strict lower triangle is written.

use std::io::{BufRead, Write};

use super::{GraphError, SimilarityGraph, SparseMatrix};

pub fn write_matrix_market<W: Write>(g: &SimilarityGraph, mut w: W) -> Result<(), GraphError> {
    let a = g.adjacency();
    let n = a.n_rows();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{n} {n} {}", g.n_edges())?;
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            if j < i {
                writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
            }
        }
    }
    Ok(())
}

pub fn read_matrix_market<R: BufRead>(r: R) -> Result<SimilarityGraph, GraphError> {
    let bad = |m: &str| GraphError::MatrixMarket(m.to_string());
    let mut lines = r.lines();
    let banner = lines.next().ok_or_else(|| bad("empty input"))??;
    let banner_lc = banner.to_ascii_lowercase();
    let fields: Vec<&str> = banner_lc.split_whitespace().collect();
    if fields.len() < 5 || fields[0] != "%%matrixmarket" || fields[2] != "coordinate" {
        return Err(bad("expected a coordinate Matrix Market banner"));
    }
    let symmetric = match fields[4] {
        "symmetric" => true,
        "general" => false,
        other => {
            return Err(GraphError::MatrixMarket(format!(
                "unsupported symmetry {other}"
            )))
        }
    };
    let pattern = fields[3] == "pattern";

    let mut size: Option<(usize, usize, usize)> = None;
    let mut trip = Vec::new();
    for line in lines {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') {
            continue;
        }
        let parts: Vec<&str> = t.split_whitespace().collect();
        match size {
            None => {
                if parts.len() != 3 {
                    return Err(bad("malformed size line"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("malformed size line"));
                size = Some((p(parts[0])?, p(parts[1])?, p(parts[2])?));
            }
            Some((rows, cols, _)) => {
                let want = if pattern { 2 } else { 3 };
                if parts.len() < want {
                    return Err(GraphError::MatrixMarket(format!("malformed entry `{t}`")));
                }
                let idx = |s: &str| {
                    s.parse::<usize>()
                        .ok()
                        .filter(|&v| v >= 1)
                        .ok_or_else(|| GraphError::MatrixMarket(format!("bad index in `{t}`")))
                };
                let (i, j) = (idx(parts[0])? - 1, idx(parts[1])? - 1);
                if i >= rows || j >= cols {
                    return Err(GraphError::MatrixMarket(format!(
                        "index out of range in `{t}`"
                    )));
                }
                let v = if pattern {
                    1.0
                } else {
                    parts[2]
                        .parse::<f64>()
                        .map_err(|_| GraphError::MatrixMarket(format!("bad value in `{t}`")))?
                };
                trip.push((i, j, v));
                if symmetric && i != j {
                    trip.push((j, i, v));
                }
            }
        }
    }
    let (rows, cols, _) = size.ok_or_else(|| bad("missing size line"))?;
    if rows != cols {
        return Err(bad("adjacency must be square"));
    }
    SimilarityGraph::from_adjacency(SparseMatrix::from_triplets(rows, cols, trip))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = SimilarityGraph::from_edges(4, &[(0, 1, 0.25), (1, 3, 1.0 / 3.0), (2, 3, 2.0)])
            .unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("%%MatrixMarket matrix coordinate real symmetric\n4 4 3\n"));
        let back = read_matrix_market(buf.as_slice()).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_matrix_market("hello\n".as_bytes()).is_err());
        assert!(read_matrix_market(
            "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n".as_bytes()
        )
        .is_err());
    }
}
