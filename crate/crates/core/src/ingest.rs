//! Problem instance ingestion: p-median graph files (all-pairs shortest
//! paths) and numeric vector files (pairwise metric evaluation).

use crate::error::{Error, Result};
use crate::matrix::{DissimilarityMatrix, Metric};
use std::collections::HashMap;
use std::path::Path;

/// A matrix plus the requested cluster count and, when known, the proven
/// optimal total deviation for quality normalization.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub matrix: DissimilarityMatrix,
    pub k: usize,
    pub name: String,
    pub known_optimum: Option<f64>,
}

/// A p-median instance as distributed: header `n m p`, then `m` lines
/// `i j cost` with 1-based vertices and nonnegative integer costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrlibGraph {
    pub n_vertices: usize,
    pub n_edges: usize,
    pub p: usize,
    pub edges: Vec<(usize, usize, u64)>,
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

pub fn parse_orlib(text: &str) -> Result<OrlibGraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));

    let (header_line, header) = lines.next().ok_or_else(|| parse_err(0, "missing header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(parse_err(
            header_line,
            format!("expected header \"n m p\", got {} tokens", fields.len()),
        ));
    }
    let parse_usize = |tok: &str, what: &str, line: usize| -> Result<usize> {
        tok.parse()
            .map_err(|_| parse_err(line, format!("invalid {what}: {tok:?}")))
    };
    let n_vertices = parse_usize(fields[0], "vertex count", header_line)?;
    let n_edges = parse_usize(fields[1], "edge count", header_line)?;
    let p = parse_usize(fields[2], "p", header_line)?;

    let mut edges = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let (line_no, line) = lines
            .next()
            .ok_or_else(|| parse_err(0, format!("expected {n_edges} edge lines, file ended early")))?;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(
                line_no,
                format!("expected \"i j cost\", got {} tokens", toks.len()),
            ));
        }
        let i = parse_usize(toks[0], "vertex", line_no)?;
        let j = parse_usize(toks[1], "vertex", line_no)?;
        let cost: i64 = toks[2]
            .parse()
            .map_err(|_| parse_err(line_no, format!("invalid cost: {:?}", toks[2])))?;
        if i < 1 || i > n_vertices || j < 1 || j > n_vertices {
            return Err(parse_err(
                line_no,
                format!("vertex out of range 1..={n_vertices}: ({i}, {j})"),
            ));
        }
        if cost < 0 {
            return Err(parse_err(line_no, format!("negative cost {cost}")));
        }
        edges.push((i, j, cost as u64));
    }
    if let Some((line_no, line)) = lines.next() {
        return Err(parse_err(
            line_no,
            format!("extra tokens after last edge: {:?}", line.trim()),
        ));
    }
    Ok(OrlibGraph {
        n_vertices,
        n_edges,
        p,
        edges,
    })
}

/// All-pairs shortest paths over the undirected graph (Floyd–Warshall,
/// O(n³)); parallel edges keep the cheapest cost.
pub fn graph_to_matrix(graph: &OrlibGraph) -> Result<DissimilarityMatrix> {
    let n = graph.n_vertices;
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n {
        d[i * n + i] = 0.0;
    }
    for &(i, j, cost) in &graph.edges {
        let (a, b) = (i - 1, j - 1);
        let c = cost as f64;
        if c < d[a * n + b] {
            d[a * n + b] = c;
            d[b * n + a] = c;
        }
    }
    for via in 0..n {
        for i in 0..n {
            let d_iv = d[i * n + via];
            if d_iv.is_infinite() {
                continue;
            }
            for j in 0..n {
                let through = d_iv + d[via * n + j];
                if through < d[i * n + j] {
                    d[i * n + j] = through;
                }
            }
        }
    }
    if let Some(pos) = d.iter().position(|v| v.is_infinite()) {
        // report with the 1-based labels used in the file
        return Err(Error::Disconnected(pos / n + 1, pos % n + 1));
    }
    DissimilarityMatrix::from_values(n, d)
}

/// Load numeric vectors (comma- or whitespace-separated, one point per
/// line; a non-numeric first line is treated as a header) and evaluate the
/// metric pairwise.
pub fn load_vectors(path: &Path, metric: Metric) -> Result<DissimilarityMatrix> {
    let text = std::fs::read_to_string(path)?;
    parse_vectors(&text, metric)
}

pub fn parse_vectors(text: &str, metric: Metric) -> Result<DissimilarityMatrix> {
    let rows = parse_rows(text)?;
    DissimilarityMatrix::from_points(&rows, metric)
}

fn parse_rows(text: &str) -> Result<Vec<Vec<f64>>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    let mut first_data_line = true;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let cells: Vec<&str> = if trimmed.contains(',') {
            trimmed.split(',').map(str::trim).collect()
        } else {
            trimmed.split_whitespace().collect()
        };
        if first_data_line && cells.iter().any(|c| c.parse::<f64>().is_err()) {
            // header row
            first_data_line = false;
            continue;
        }
        first_data_line = false;
        let mut row = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                parse_err(
                    line_no,
                    format!("non-numeric value {:?} in column {}", cell, col + 1),
                )
            })?;
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_err(
                    line_no,
                    format!("ragged row: expected {w} columns, found {}", row.len()),
                ));
            }
            Some(_) => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_err(0, "no data rows"));
    }
    Ok(rows)
}

/// Parse a sidecar of known optima: lines `instance_name optimum_value`,
/// `#` comments and blank lines skipped.
pub fn parse_optima(text: &str) -> Result<HashMap<String, f64>> {
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut toks = trimmed.split_whitespace();
        let name = toks.next().unwrap();
        let value: f64 = toks
            .next()
            .ok_or_else(|| parse_err(line_no, "expected \"name value\""))?
            .parse()
            .map_err(|_| parse_err(line_no, "invalid optimum value"))?;
        if toks.next().is_some() {
            return Err(parse_err(line_no, "extra tokens after optimum value"));
        }
        map.insert(name.to_string(), value);
    }
    Ok(map)
}

pub fn load_optima(path: &Path) -> Result<HashMap<String, f64>> {
    parse_optima(&std::fs::read_to_string(path)?)
}

/// Load an ORLib-format file into a ready-to-cluster instance, attaching
/// the known optimum when the sidecar map has an entry for `name`.
pub fn load_orlib_instance(
    path: &Path,
    optima: &HashMap<String, f64>,
) -> Result<ProblemInstance> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string());
    let graph = parse_orlib(&std::fs::read_to_string(path)?)?;
    let matrix = graph_to_matrix(&graph)?;
    Ok(ProblemInstance {
        matrix,
        k: graph.p,
        name: name.clone(),
        known_optimum: optima.get(&name).copied(),
    })
}
