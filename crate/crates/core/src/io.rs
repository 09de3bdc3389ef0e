//! Edge-list ingestion and CSV emission.
//!
//! Edge lists are whitespace-separated `source target [weight]` lines;
//! columns past the third are ignored. Every file is written to a temporary
//! sibling and renamed into place.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use log::warn;
use tempfile::NamedTempFile;

use crate::curvature::{CurvatureField, CurvatureMap};
use crate::dynamics::ChangeReport;
use crate::error::{Error, Result};
use crate::flow::FlowTrace;
use crate::graph::{EdgeInsert, NetworkBuilder, WeightedNetwork};
use crate::numeric::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeListFormat {
    pub comment_prefix: char,
    pub directed: bool,
}

impl Default for EdgeListFormat {
    fn default() -> Self {
        EdgeListFormat {
            comment_prefix: '#',
            directed: false,
        }
    }
}

impl EdgeListFormat {
    pub fn directed(directed: bool) -> Self {
        EdgeListFormat {
            directed,
            ..Default::default()
        }
    }
}

/// Splits a line into `(1-based column, token)` pairs.
fn tokens(line: &str) -> impl Iterator<Item = (usize, &str)> {
    line.char_indices()
        .filter(|&(i, c)| {
            !c.is_whitespace() && line[..i].chars().next_back().is_none_or(char::is_whitespace)
        })
        .map(move |(i, _)| {
            let rest = &line[i..];
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            (line[..i].chars().count() + 1, &rest[..end])
        })
}

/// Parses an edge list. Nodes are indexed by first appearance; a missing
/// weight column means weight 1, and a negative weight sets the edge's
/// orientation. Self-loops are skipped with a warning.
pub fn parse_edge_list<R: BufRead>(input: R, fmt: EdgeListFormat) -> Result<WeightedNetwork> {
    let mut builder = NetworkBuilder::new(fmt.directed);
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            column: 1,
            reason: e.to_string(),
        })?;
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with(fmt.comment_prefix) {
            continue;
        }
        let mut cols = tokens(&line);
        let (_, a) = cols.next().expect("line has a token");
        let Some((_, b)) = cols.next() else {
            return Err(Error::Parse {
                line: line_no,
                column: line.chars().count() + 1,
                reason: "expected a target node".into(),
            });
        };
        let weight = match cols.next() {
            None => 1.0,
            Some((column, text)) => {
                let w: f64 = text.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    column,
                    reason: format!("invalid weight {text:?}"),
                })?;
                if !(w.is_finite() && w != 0.0) {
                    return Err(Error::Parse {
                        line: line_no,
                        column,
                        reason: format!("weight must be finite and non-zero, got {text}"),
                    });
                }
                w
            }
        };
        if a == b {
            warn!("line {line_no}: skipping self-loop on {a}");
            builder.node(a);
            continue;
        }
        match builder.add_edge(a, b, weight) {
            Ok(EdgeInsert::Added(_)) => {}
            Ok(EdgeInsert::Collapsed(e)) => {
                warn!("line {line_no}: duplicate edge {a} {b} merged into edge {e}")
            }
            Err(Error::DuplicateEdge(..)) => {
                return Err(Error::DuplicateDirectedEdge {
                    line: line_no,
                    source_label: a.to_owned(),
                    target_label: b.to_owned(),
                })
            }
            Err(e) => return Err(e),
        }
    }
    Ok(builder.build())
}

pub fn read_edge_list(path: &Path, fmt: EdgeListFormat) -> Result<WeightedNetwork> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(BufReader::new(file), fmt)
}

/// Writes `path` atomically: `body` fills a temporary file in the same
/// directory, which is then renamed over `path`.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let tmp = NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = BufWriter::new(tmp);
    body(&mut out)?;
    let tmp = out
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Error + '_ {
    move |e| Error::io(path, e)
}

/// Serializes `g` in the format read by [`parse_edge_list`]. Weights are
/// printed in shortest round-trip form, with the orientation as sign.
pub fn write_edge_list<W: Write>(g: &WeightedNetwork, header: &[String], mut out: W) -> Result<()> {
    let to_io = |e: std::io::Error| Error::io("<edge list>", e);
    for line in header {
        writeln!(out, "# {line}").map_err(to_io)?;
    }
    for (e, &(u, v)) in g.edges().iter().enumerate() {
        let (lu, lv) = (g.label(u), g.label(v));
        if [lu, lv].iter().any(|l| l.is_empty() || l.contains(char::is_whitespace)) {
            return Err(Error::InvalidConfig(format!(
                "label {lu:?} or {lv:?} cannot be written to an edge list"
            )));
        }
        let w = g.edge_weight(e) * g.orientation(e).sign();
        writeln!(out, "{lu} {lv} {w}").map_err(to_io)?;
    }
    Ok(())
}

pub fn save_edge_list(g: &WeightedNetwork, header: &[String], path: &Path) -> Result<()> {
    write_atomic(path, |out| write_edge_list(g, header, out))
}

/// One row per edge: labels, weight, curvature, and for directed networks
/// the head and tail terms.
pub fn emit_curvature(g: &WeightedNetwork, field: &CurvatureField, path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        let directed = field.directed_parts.as_ref();
        let mut header = vec!["edge", "source", "target", "weight", "curvature"];
        if directed.is_some() {
            header.extend(["head", "tail"]);
        }
        w.write_record(&header)?;
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            let mut row = vec![
                e.to_string(),
                g.label(u).to_owned(),
                g.label(v).to_owned(),
                g.edge_weight(e).to_string(),
                field.edge[e].to_string(),
            ];
            if let Some(parts) = directed {
                row.push(parts[e].head.to_string());
                row.push(parts[e].tail.to_string());
            }
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err(path))
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    /// `count / (total * width)`, integrating to 1 over all bins.
    pub density: f64,
}

/// Equal-width histogram over the value range. A constant sample is binned
/// over `[v - 0.5, v + 0.5]`.
pub fn histogram(values: &[f64], bins: usize) -> Result<Vec<HistogramBin>> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if bins == 0 {
        return Err(Error::InvalidConfig("bin count must be at least 1".into()));
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidConfig("values must be finite".into()));
    }
    let (lo, hi) = if lo == hi { (lo - 0.5, hi + 0.5) } else { (lo, hi) };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in values {
        let i = (((x - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let total = values.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| HistogramBin {
            lo: lo + i as f64 * width,
            hi: if i + 1 == bins { hi } else { lo + (i + 1) as f64 * width },
            count,
            density: count as f64 / (total * width),
        })
        .collect())
}

pub fn emit_histogram(field: &CurvatureField, bins: usize, path: &Path) -> Result<()> {
    let table = histogram(&field.edge, bins)?;
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["bin_lo", "bin_hi", "count", "density"])?;
        for b in &table {
            w.write_record([
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                b.density.to_string(),
            ])?;
        }
        w.flush().map_err(io_err(path))
    })
}

/// Sibling path holding the index/label table of a matrix file:
/// `map.csv` becomes `map.labels.csv`.
pub fn label_table_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().unwrap_or_default().to_string_lossy();
    path.with_file_name(format!("{stem}.labels.csv"))
}

pub fn emit_label_table<S: AsRef<str>>(labels: &[S], path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "label"])?;
        for (i, l) in labels.iter().enumerate() {
            w.write_record([i.to_string().as_str(), l.as_ref()])?;
        }
        w.flush().map_err(io_err(path))
    })
}

/// Dense `n x n` CSV without header, absent entries as empty cells, plus the
/// label table at [`label_table_path`].
pub fn emit_curvature_map(map: &CurvatureMap, labels: &[String], path: &Path) -> Result<()> {
    if labels.len() != map.size() {
        return Err(Error::LengthMismatch {
            expected: map.size(),
            actual: labels.len(),
        });
    }
    write_atomic(path, |out| {
        let mut line = String::new();
        for i in 0..map.size() {
            line.clear();
            for (j, cell) in map.row(i).iter().enumerate() {
                if j > 0 {
                    line.push(',');
                }
                if let Some(x) = cell {
                    line.push_str(&x.to_string());
                }
            }
            line.push('\n');
            out.write_all(line.as_bytes()).map_err(io_err(path))?;
        }
        Ok(())
    })?;
    emit_label_table(labels, &label_table_path(path))
}

/// Symmetric matrix with a header row and a leading name column.
pub fn emit_distance_matrix<S: AsRef<str>>(names: &[S], d: &DenseMatrix, path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        let header: Vec<&str> = std::iter::once("")
            .chain(names.iter().map(AsRef::as_ref))
            .collect();
        w.write_record(&header)?;
        for (i, name) in names.iter().enumerate() {
            let row: Vec<String> = std::iter::once(name.as_ref().to_owned())
                .chain(d.row(i).iter().map(f64::to_string))
                .collect();
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err(path))
    })
}

/// One row per shared, added and removed edge, labelled from the snapshot
/// that contains it.
pub fn emit_change_report(
    a: &WeightedNetwork,
    b: &WeightedNetwork,
    report: &ChangeReport,
    path: &Path,
) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["source", "target", "status", "deviation", "flagged"])?;
        let threshold = report.params.threshold;
        for &(e, _, dev) in &report.deviations {
            let (u, v) = a.endpoints(e);
            w.write_record([
                a.label(u),
                a.label(v),
                "shared",
                &dev.to_string(),
                if dev > threshold { "true" } else { "false" },
            ])?;
        }
        for (g, edges, status) in [(b, &report.added, "added"), (a, &report.removed, "removed")] {
            for &e in edges {
                let (u, v) = g.endpoints(e);
                w.write_record([g.label(u), g.label(v), status, "", "true"])?;
            }
        }
        w.flush().map_err(io_err(path))
    })
}

/// Wide table: `step, mean_curvature, clamped`, then one weight column per edge.
pub fn emit_flow_trace(g: &WeightedNetwork, trace: &FlowTrace, path: &Path) -> Result<()> {
    write_atomic(path, |out| {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["step".to_owned(), "mean_curvature".into(), "clamped".into()];
        header.extend(
            g.edges()
                .iter()
                .map(|&(u, v)| format!("{}-{}", g.label(u), g.label(v))),
        );
        w.write_record(&header)?;
        for (step, weights) in trace.snapshots.iter().enumerate() {
            let clamped = if step == 0 { 0 } else { trace.clamped[step - 1] };
            let mut row = vec![
                step.to_string(),
                trace.mean_curvature[step].to_string(),
                clamped.to_string(),
            ];
            row.extend(weights.iter().map(f64::to_string));
            w.write_record(&row)?;
        }
        w.flush().map_err(io_err(path))
    })
}
