use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::graph::ObservationGraph;
use crate::numerics::SymMatrix;
use crate::{Error, Result};

use super::ExperimentRow;

/// Token marking an unobserved cell.
pub const NA: &str = "NA";
/// Largest tolerated `|a_ij − a_ji|` between observed cells.
pub const ASYMMETRY_TOL: f64 = 1e-9;

/// A matrix read from CSV together with its observation pattern.
#[derive(Clone, Debug)]
pub struct LoadedMatrix {
    /// Zero at unobserved cells, symmetrized.
    pub matrix: SymMatrix,
    pub graph: ObservationGraph,
    /// Column names, when the file starts with a header row.
    pub names: Option<Vec<String>>,
}

enum Cell {
    Value(f64),
    Missing,
}

fn parse_error(row: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        row,
        col,
        msg: msg.into(),
    }
}

/// Reads all records; rows and columns in errors are 1-based file positions.
fn read_records(path: &Path) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        out.push(rec.iter().map(str::to_owned).collect());
    }
    Ok(out)
}

fn is_number(token: &str) -> bool {
    token.parse::<f64>().is_ok()
}

/// Parses a square CSV of decimal numbers and `NA` cells.
fn parse_square(records: Vec<Vec<String>>) -> Result<(Vec<Vec<Cell>>, Option<Vec<String>>)> {
    let mut records = records.into_iter().peekable();
    let mut names = None;
    let mut first_row = 1;
    if let Some(first) = records.peek() {
        if first.iter().all(|t| t != NA && !is_number(t)) {
            names = records.next();
            first_row = 2;
        }
    }
    let rows: Vec<Vec<String>> = records.collect();
    let d = rows.len();
    if d == 0 {
        return Err(parse_error(first_row, 1, "no data rows"));
    }
    if let Some(n) = &names {
        if n.len() != d {
            return Err(parse_error(1, n.len().min(d) + 1, format!(
                "header has {} names for {d} data rows",
                n.len()
            )));
        }
    }
    let mut cells = Vec::with_capacity(d);
    for (r, row) in rows.iter().enumerate() {
        let file_row = r + first_row;
        if row.len() != d {
            return Err(parse_error(file_row, row.len().min(d) + 1, format!(
                "expected {d} cells, found {}",
                row.len()
            )));
        }
        let mut parsed = Vec::with_capacity(d);
        for (c, token) in row.iter().enumerate() {
            if token == NA {
                parsed.push(Cell::Missing);
                continue;
            }
            match token.parse::<f64>() {
                Ok(v) if v.is_finite() => parsed.push(Cell::Value(v)),
                Ok(_) => return Err(parse_error(file_row, c + 1, format!("non-finite value {token:?}"))),
                Err(_) => return Err(parse_error(file_row, c + 1, format!("not a number or {NA}: {token:?}"))),
            }
        }
        cells.push(parsed);
    }
    Ok((cells, names))
}

/// Loads a symmetric matrix whose `NA` cells mark unobserved entries.
///
/// An optional header row of variable names is recognized when none of its
/// tokens is numeric. If `mask_path` is given, its 0 cells are treated as
/// unobserved as well; a 1 in the mask over an `NA` cell is an error.
pub fn load_matrix_csv(path: &Path, mask_path: Option<&Path>) -> Result<LoadedMatrix> {
    let (cells, names) = parse_square(read_records(path)?)?;
    let header_rows = usize::from(names.is_some());
    let d = cells.len();
    let mask = match mask_path {
        Some(p) => Some(load_mask_csv(p)?),
        None => None,
    };
    if let Some(m) = &mask {
        if m.n() != d {
            return Err(Error::invalid(format!("mask is {0}x{0} but matrix is {d}x{d}", m.n())));
        }
    }

    let mut edges = Vec::new();
    let mut data = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let (row, col) = (i + 1 + header_rows, j + 1);
            match (&cells[i][j], &cells[j][i]) {
                (Cell::Value(a), Cell::Value(b)) => {
                    if (a - b).abs() > ASYMMETRY_TOL {
                        return Err(parse_error(row, col, format!(
                            "asymmetric values {a} and {b} (max asymmetry {ASYMMETRY_TOL})"
                        )));
                    }
                    if mask.as_ref().is_some_and(|m| !m.has_edge(i, j)) {
                        continue;
                    }
                    let v = 0.5 * (a + b);
                    data[i * d + j] = v;
                    data[j * d + i] = v;
                    edges.push((i, j));
                }
                (Cell::Missing, Cell::Missing) => {
                    if mask.as_ref().is_some_and(|m| m.has_edge(i, j)) {
                        return Err(parse_error(row, col, "mask marks an NA cell as observed"));
                    }
                }
                _ => return Err(parse_error(row, col, "NA pattern is not symmetric")),
            }
        }
    }
    Ok(LoadedMatrix {
        matrix: SymMatrix::from_row_major(d, data)?,
        graph: ObservationGraph::from_edges(d, edges)?,
        names,
    })
}

/// Loads a symmetric 0/1 mask; 1 marks an observed entry.
pub fn load_mask_csv(path: &Path) -> Result<ObservationGraph> {
    let (cells, names) = parse_square(read_records(path)?)?;
    let offset = usize::from(names.is_some());
    let d = cells.len();
    let mut edges = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let v = match cells[i][j] {
                Cell::Value(v) if v == 0.0 || v == 1.0 => v,
                _ => return Err(parse_error(i + 1 + offset, j + 1, "mask cells must be 0 or 1")),
            };
            let w = match cells[j][i] {
                Cell::Value(w) => w,
                Cell::Missing => f64::NAN,
            };
            if v != w {
                return Err(parse_error(i + 1 + offset, j + 1, "mask is not symmetric"));
            }
            if j >= i && v == 1.0 {
                edges.push((i, j));
            }
        }
    }
    ObservationGraph::from_edges(d, edges)
}

/// Writes `matrix` with `NA` at cells outside `graph` (all cells when `graph`
/// is `None`), using shortest round-trip decimal formatting.
pub fn write_matrix_csv(
    path: &Path,
    matrix: &SymMatrix,
    graph: Option<&ObservationGraph>,
    names: Option<&[String]>,
) -> Result<()> {
    let d = matrix.dim();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    if let Some(n) = names {
        w.write_record(n)?;
    }
    for i in 0..d {
        let row: Vec<String> = (0..d)
            .map(|j| match graph {
                Some(g) if !g.has_edge(i, j) => NA.to_owned(),
                _ => format!("{}", matrix[(i, j)]),
            })
            .collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_mask_csv(path: &Path, graph: &ObservationGraph) -> Result<()> {
    let d = graph.n();
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for i in 0..d {
        let row: Vec<&str> = (0..d).map(|j| if graph.has_edge(i, j) { "1" } else { "0" }).collect();
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub const ROW_HEADER: &str = "bucket_lo,bucket_hi,gap,sigma,reps,rate,mean_rescaled";

/// Decimal rendering with six significant digits, e.g. `0.123457`,
/// `1234570`, `1e-7`.
pub fn format_sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("valid float");
    format!("{rounded}")
}

/// Writes rows sorted by `bucket_lo` under [`ROW_HEADER`].
pub fn emit_csv(rows: &[ExperimentRow], path: &Path) -> Result<()> {
    let mut f = File::create(path)?;
    f.write_all(render_rows(rows).as_bytes())?;
    Ok(())
}

/// The exact bytes [`emit_csv`] writes.
pub fn render_rows(rows: &[ExperimentRow]) -> String {
    let mut sorted: Vec<&ExperimentRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.bucket_lo.total_cmp(&b.bucket_lo));
    let mut out = String::from(ROW_HEADER);
    out.push('\n');
    for r in sorted {
        let fields = [
            format_sig6(r.bucket_lo),
            format_sig6(r.bucket_hi),
            format_sig6(r.spectral_gap),
            format_sig6(r.sigma),
            r.reps.to_string(),
            format_sig6(r.exact_recovery_rate),
            format_sig6(r.mean_rescaled),
        ];
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Parses a file written by [`emit_csv`].
pub fn read_rows_csv(path: &Path) -> Result<Vec<ExperimentRow>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != ROW_HEADER {
        return Err(parse_error(1, 1, format!("unexpected header {:?}", header.join(","))));
    }
    let mut rows = Vec::new();
    for (k, rec) in reader.records().enumerate() {
        let rec = rec?;
        let file_row = k + 2;
        let num = |c: usize| -> Result<f64> {
            rec.get(c)
                .and_then(|t| t.parse::<f64>().ok())
                .ok_or_else(|| parse_error(file_row, c + 1, "not a number"))
        };
        let reps = rec
            .get(4)
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| parse_error(file_row, 5, "reps must be a nonnegative integer"))?;
        rows.push(ExperimentRow {
            bucket_lo: num(0)?,
            bucket_hi: num(1)?,
            spectral_gap: num(2)?,
            sigma: num(3)?,
            reps,
            exact_recovery_rate: num(5)?,
            mean_rescaled: num(6)?,
            skipped: 0,
        });
    }
    Ok(rows)
}
