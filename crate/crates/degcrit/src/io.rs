//! File formats: per-trial CSV, JSON reports and JSONL graphs.
//!
//! CSV columns are fixed (see [`CSV_HEADER`]); lengths are in edges and an
//! empty complex part is written as −1 in the `complex_*` columns.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use degcrit_core::graph::Graph;
use serde::{Deserialize, Serialize};

use crate::experiment::{ResultTable, TrialRow};

pub const CSV_HEADER: [&str; 13] = [
    "trial",
    "n",
    "m",
    "realized_mu",
    "attempts",
    "largest_component",
    "largest_excess",
    "total_excess",
    "complex_size",
    "complex_diameter",
    "complex_longest_path",
    "complex_circumference",
    "planar",
];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: line {line}: {reason}")]
    Record { path: String, line: usize, reason: String },
}

/// `x` rounded to nine significant digits, in shortest round-trip form.
pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() { "nan".into() } else if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float");
    format!("{rounded}")
}

fn opt(v: Option<usize>) -> String {
    v.map_or_else(|| "-1".to_string(), |x| x.to_string())
}

fn row_record(r: &TrialRow) -> [String; 13] {
    [
        r.trial.to_string(),
        r.n.to_string(),
        r.m.to_string(),
        format_float(r.realized_mu),
        r.attempts.to_string(),
        r.largest_component.to_string(),
        r.largest_excess.to_string(),
        r.total_excess.to_string(),
        r.complex_size.to_string(),
        opt(r.complex_diameter),
        opt(r.complex_longest_path),
        opt(r.complex_circumference),
        u8::from(r.planar).to_string(),
    ]
}

pub fn write_csv<'a, W: Write>(rows: impl IntoIterator<Item = &'a TrialRow>, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record(row_record(r))?;
    }
    w.flush()?;
    Ok(())
}

fn parse_field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, String> {
    let s = rec.get(i).ok_or_else(|| format!("missing column {}", CSV_HEADER[i]))?;
    s.parse().map_err(|_| format!("bad {} `{s}`", CSV_HEADER[i]))
}

fn parse_opt(rec: &csv::StringRecord, i: usize) -> Result<Option<usize>, String> {
    let v: i64 = parse_field(rec, i)?;
    Ok(if v < 0 { None } else { Some(v as usize) })
}

fn parse_row(rec: &csv::StringRecord) -> Result<TrialRow, String> {
    let planar: u8 = parse_field(rec, 12)?;
    let row = TrialRow {
        trial: parse_field(rec, 0)?,
        n: parse_field(rec, 1)?,
        m: parse_field(rec, 2)?,
        realized_mu: parse_field(rec, 3)?,
        attempts: parse_field(rec, 4)?,
        largest_component: parse_field(rec, 5)?,
        largest_excess: parse_field(rec, 6)?,
        total_excess: parse_field(rec, 7)?,
        complex_size: parse_field(rec, 8)?,
        complex_diameter: parse_opt(rec, 9)?,
        complex_longest_path: parse_opt(rec, 10)?,
        complex_circumference: parse_opt(rec, 11)?,
        planar: planar != 0,
    };
    row.summary().check().map_err(|e| e.to_string())?;
    Ok(row)
}

/// Reads rows back, checking the header and every row's invariants.
pub fn read_csv<R: Read>(input: R, origin: &str) -> Result<Vec<TrialRow>, IoError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(|source| IoError::Csv { path: origin.into(), source })?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(IoError::Record { path: origin.into(), line: 1, reason: format!("unexpected header {header:?}") });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|source| IoError::Csv { path: origin.into(), source })?;
        rows.push(parse_row(&rec).map_err(|reason| IoError::Record { path: origin.into(), line: i + 2, reason })?);
    }
    Ok(rows)
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    File::create(path).map(BufWriter::new).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

fn open(path: &Path) -> Result<BufReader<File>, IoError> {
    File::open(path).map(BufReader::new).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn save_csv(table: &ResultTable, path: &Path) -> Result<(), IoError> {
    let out = create(path)?;
    write_csv(table.rows(), out).map_err(|source| IoError::Csv { path: path.display().to_string(), source })
}

pub fn load_csv(path: &Path) -> Result<Vec<TrialRow>, IoError> {
    read_csv(open(path)?, &path.display().to_string())
}

pub fn save_json(table: &ResultTable, path: &Path) -> Result<(), IoError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, table).map_err(|source| IoError::Json { path: path.display().to_string(), source })?;
    out.write_all(b"\n").and_then(|_| out.flush()).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn load_json(path: &Path) -> Result<ResultTable, IoError> {
    serde_json::from_reader(open(path)?).map_err(|source| IoError::Json { path: path.display().to_string(), source })
}

/// One graph per line: `{"n": …, "edges": [[u, v], …]}`, 1-based, `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl From<&Graph> for GraphRecord {
    fn from(g: &Graph) -> Self {
        Self { n: g.n(), edges: g.edges().iter().map(|&(u, v)| [u + 1, v + 1]).collect() }
    }
}

impl GraphRecord {
    pub fn to_graph(&self) -> degcrit_core::Result<Graph> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        Graph::from_one_based(self.n, &edges)
    }
}

pub fn write_jsonl<'a, W: Write>(graphs: impl IntoIterator<Item = &'a Graph>, mut out: W) -> std::io::Result<()> {
    for g in graphs {
        serde_json::to_writer(&mut out, &GraphRecord::from(g))?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

pub fn read_jsonl<R: BufRead>(input: R, origin: &str) -> Result<Vec<Graph>, IoError> {
    let mut graphs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|source| IoError::Io { path: origin.into(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: GraphRecord = serde_json::from_str(&line)
            .map_err(|e| IoError::Record { path: origin.into(), line: i + 1, reason: e.to_string() })?;
        let g = rec.to_graph().map_err(|e| IoError::Record { path: origin.into(), line: i + 1, reason: e.to_string() })?;
        graphs.push(g);
    }
    Ok(graphs)
}

pub fn save_jsonl(graphs: &[Graph], path: &Path) -> Result<(), IoError> {
    write_jsonl(graphs, create(path)?).map_err(|source| IoError::Io { path: path.display().to_string(), source })
}

pub fn load_jsonl(path: &Path) -> Result<Vec<Graph>, IoError> {
    read_jsonl(open(path)?, &path.display().to_string())
}
