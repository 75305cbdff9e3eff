//! File formats: data/label CSV, distance-matrix CSV, and edge lists.
//!
//! Data CSV: one observation per row, comma-separated finite decimals,
//! optional single header row. Edge lists: one edge per line, either
//! `i j` or `i j w` (0-based node indices with `i < j`, whitespace
//! separated).

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{DataMatrix, DistanceMatrix, SimilarityGraph};
use crate::weight::WeightedGraph;

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn parse_row(path: &Path, line_no: usize, line: &str) -> Result<Vec<f64>> {
    line.split(',')
        .map(|field| {
            let field = field.trim();
            field.parse::<f64>().map_err(|_| {
                Error::Io(format!(
                    "{}:{}: cannot parse '{}' as a number",
                    path.display(),
                    line_no,
                    field
                ))
            })
        })
        .collect()
}

/// Reads a data matrix from CSV; `header` skips the first row.
pub fn read_data_csv(path: &Path, header: bool) -> Result<DataMatrix> {
    let lines = read_lines(path)?;
    let mut rows = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        if header && idx == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let row = parse_row(path, idx + 1, line)?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Io(format!("{}:{}: non-finite entry", path.display(), idx + 1)));
        }
        rows.push(row);
    }
    DataMatrix::from_rows(rows)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads a precomputed distance matrix (square CSV) and validates it.
pub fn read_dist_csv(path: &Path, header: bool) -> Result<DistanceMatrix> {
    let data = read_data_csv(path, header)?;
    if data.n_rows() != data.n_cols() {
        return Err(Error::Io(format!(
            "{}: distance matrix must be square, got {} x {}",
            path.display(),
            data.n_rows(),
            data.n_cols()
        )));
    }
    let n = data.n_rows();
    let values: Vec<f64> = (0..n).flat_map(|i| data.row(i).to_vec()).collect();
    DistanceMatrix::new(n, values).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Reads 0/1 labels, one per row (first CSV field of each row).
pub fn read_labels_csv(path: &Path, header: bool) -> Result<Vec<u8>> {
    let lines = read_lines(path)?;
    let mut labels = Vec::new();
    for (idx, line) in lines.iter().enumerate() {
        if header && idx == 0 {
            continue;
        }
        let field = line.split(',').next().unwrap_or("").trim();
        if field.is_empty() {
            continue;
        }
        match field {
            "0" => labels.push(0u8),
            "1" => labels.push(1u8),
            other => {
                return Err(Error::Io(format!(
                    "{}:{}: label must be 0 or 1, got '{other}'",
                    path.display(),
                    idx + 1
                )))
            }
        }
    }
    Ok(labels)
}

/// An edge list as read from disk: edges plus optional weights when
/// the file has a third column.
pub struct EdgeListFile {
    pub edges: Vec<(usize, usize)>,
    pub weights: Option<Vec<f64>>,
}

/// Reads `i j` or `i j w` lines. Every line must have the same column
/// count and satisfy `i < j`.
pub fn read_edge_list(path: &Path) -> Result<EdgeListFile> {
    let lines = read_lines(path)?;
    let mut edges = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    let mut weighted: Option<bool> = None;
    for (idx, line) in lines.iter().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let has_weight = match fields.len() {
            2 => false,
            3 => true,
            n => {
                return Err(Error::Io(format!(
                    "{}:{line_no}: expected 'i j' or 'i j w', got {n} fields",
                    path.display()
                )))
            }
        };
        match weighted {
            None => weighted = Some(has_weight),
            Some(w) if w != has_weight => {
                return Err(Error::Io(format!(
                    "{}:{line_no}: mixed weighted and unweighted lines",
                    path.display()
                )))
            }
            _ => {}
        }
        let parse_idx = |s: &str| {
            s.parse::<usize>().map_err(|_| {
                Error::Io(format!("{}:{line_no}: bad node index '{s}'", path.display()))
            })
        };
        let i = parse_idx(fields[0])?;
        let j = parse_idx(fields[1])?;
        if i >= j {
            return Err(Error::Io(format!(
                "{}:{line_no}: edges must satisfy i < j, got {i} {j}",
                path.display()
            )));
        }
        edges.push((i, j));
        if has_weight {
            let w = fields[2].parse::<f64>().map_err(|_| {
                Error::Io(format!("{}:{line_no}: bad weight '{}'", path.display(), fields[2]))
            })?;
            weights.push(w);
        }
    }
    if edges.is_empty() {
        return Err(Error::Io(format!("{}: no edges", path.display())));
    }
    Ok(EdgeListFile {
        edges,
        weights: if weighted == Some(true) { Some(weights) } else { None },
    })
}

/// Serializes a graph as `i j` lines.
pub fn write_edge_list(graph: &SimilarityGraph) -> String {
    let mut out = String::new();
    for &(i, j) in graph.edges() {
        let _ = writeln!(out, "{i} {j}");
    }
    out
}

/// Serializes a weighted graph as `i j w` lines, weights at 13
/// significant digits.
pub fn write_weighted_edge_list(gw: &WeightedGraph) -> String {
    let mut out = String::new();
    for (e, &(i, j)) in gw.graph().edges().iter().enumerate() {
        let _ = writeln!(out, "{i} {j} {:.12e}", gw.weights()[e]);
    }
    out
}

/// Rounds to `digits` significant digits (for stable report output).
pub fn round_sig(x: f64, digits: i32) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    let magnitude = x.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (x * factor).round() / factor
}

/// Formats with `digits` significant digits, trailing zeros trimmed.
pub fn fmt_sig(x: f64, digits: i32) -> String {
    format!("{}", round_sig(x, digits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::{assign_weights, WeightFunction};
    use std::io::Write;

    fn temp_file(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn data_csv_roundtrip() {
        let f = temp_file("1.0,2.0\n3.5,-4.25\n0,1e3\n");
        let m = read_data_csv(f.path(), false).unwrap();
        assert_eq!(m.n_rows(), 3);
        assert_eq!(m.row(1), &[3.5, -4.25]);
        assert_eq!(m.row(2), &[0.0, 1000.0]);
    }

    #[test]
    fn data_csv_header_and_errors() {
        let f = temp_file("a,b\n1,2\n3,4\n");
        let m = read_data_csv(f.path(), true).unwrap();
        assert_eq!(m.n_rows(), 2);
        // Without the flag the header is a parse error naming line 1.
        let err = read_data_csv(f.path(), false).unwrap_err();
        assert!(err.to_string().contains(":1:"), "{err}");
    }

    #[test]
    fn labels_csv() {
        let f = temp_file("0\n0\n1\n1\n");
        assert_eq!(read_labels_csv(f.path(), false).unwrap(), vec![0, 0, 1, 1]);
        let bad = temp_file("0\n2\n");
        assert!(read_labels_csv(bad.path(), false).is_err());
    }

    #[test]
    fn dist_csv_validation() {
        let f = temp_file("0,1\n1,0\n");
        let d = read_dist_csv(f.path(), false).unwrap();
        assert_eq!(d.get(0, 1), 1.0);
        let asym = temp_file("0,1\n2,0\n");
        assert!(read_dist_csv(asym.path(), false).is_err());
    }

    #[test]
    fn edge_list_plain_and_weighted() {
        let f = temp_file("0 1\n1 2\n");
        let e = read_edge_list(f.path()).unwrap();
        assert_eq!(e.edges, vec![(0, 1), (1, 2)]);
        assert!(e.weights.is_none());

        let f = temp_file("0 1 0.5\n1 2 0.25\n");
        let e = read_edge_list(f.path()).unwrap();
        assert_eq!(e.weights, Some(vec![0.5, 0.25]));

        let bad = temp_file("1 0\n");
        assert!(read_edge_list(bad.path()).is_err());
        let mixed = temp_file("0 1\n1 2 0.5\n");
        assert!(read_edge_list(mixed.path()).is_err());
    }

    #[test]
    fn weighted_edge_list_roundtrip() {
        let g = SimilarityGraph::new(3, vec![(0, 1), (1, 2)]).unwrap();
        let gw = assign_weights(&g, &WeightFunction::W3).unwrap();
        let text = write_weighted_edge_list(&gw);
        let f = temp_file(&text);
        let back = read_edge_list(f.path()).unwrap();
        assert_eq!(back.edges, g.edges());
        for (a, b) in back.weights.unwrap().iter().zip(gw.weights()) {
            assert!((a - b).abs() <= 1e-12 * b.abs());
        }
    }

    #[test]
    fn significant_digit_rounding() {
        assert_eq!(round_sig(123456.789, 6), 123457.0);
        assert_eq!(round_sig(0.0001234567, 3), 0.000123);
        assert_eq!(round_sig(-9.87654321e-7, 4), -9.877e-7);
        assert_eq!(round_sig(0.0, 6), 0.0);
        assert_eq!(fmt_sig(99.5, 6), "99.5");
    }
}
