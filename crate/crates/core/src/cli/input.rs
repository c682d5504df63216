//! CSV ingestion: `winner,loser,count` edge lists and labelled square
//! matrices.

use std::path::Path;

use indexmap::IndexMap;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::CountMatrix;

const EDGE_HEADER: [&str; 3] = ["winner", "loser", "count"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum InputFormat {
    Edges,
    Matrix,
}

/// Parsed counts together with the SHA-256 digest of the raw input.
#[derive(Debug, Clone)]
pub struct Input {
    pub counts: CountMatrix,
    pub digest: String,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads a count matrix from `path`. Without an explicit format the edge
/// header `winner,loser,count` selects the edge list, anything else the
/// matrix layout.
pub fn parse_input(path: &Path, format: Option<InputFormat>) -> Result<Input> {
    let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::Parse {
        line: 1,
        message: format!("input is not UTF-8: {e}"),
    })?;
    Ok(Input {
        counts: parse_str(text, format)?,
        digest: digest(&bytes),
    })
}

pub fn parse_str(text: &str, format: Option<InputFormat>) -> Result<CountMatrix> {
    let rows = records(text)?;
    let format = format.unwrap_or_else(|| match rows.first() {
        Some((_, header)) if header.iter().map(String::as_str).eq(EDGE_HEADER) => InputFormat::Edges,
        _ => InputFormat::Matrix,
    });
    match format {
        InputFormat::Edges => parse_edges(&rows),
        InputFormat::Matrix => parse_matrix(&rows),
    }
}

type Record = (usize, Vec<String>);

fn records(text: &str) -> Result<Vec<Record>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        if rec.iter().all(str::is_empty) {
            continue;
        }
        out.push((line, rec.iter().map(str::to_owned).collect()));
    }
    Ok(out)
}

fn parse_count(line: usize, field: &str) -> Result<f64> {
    let value: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("`{field}` is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("`{field}` is not finite"),
        });
    }
    if value < 0.0 {
        return Err(Error::Domain(format!("negative count {value} on line {line}")));
    }
    Ok(value)
}

fn parse_edges(rows: &[Record]) -> Result<CountMatrix> {
    let Some(((_, header), body)) = rows.split_first() else {
        return Err(Error::Parse {
            line: 1,
            message: "empty input".into(),
        });
    };
    if !header.iter().map(String::as_str).eq(EDGE_HEADER) {
        return Err(Error::Parse {
            line: 1,
            message: "edge list needs the header `winner,loser,count`".into(),
        });
    }
    let mut index: IndexMap<String, ()> = IndexMap::new();
    let mut edges = Vec::with_capacity(body.len());
    for (line, fields) in body {
        let [winner, loser, count] = fields.as_slice() else {
            return Err(Error::Parse {
                line: *line,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        };
        if winner.is_empty() || loser.is_empty() {
            return Err(Error::Parse {
                line: *line,
                message: "empty label".into(),
            });
        }
        let count = parse_count(*line, count)?;
        let w = index.insert_full(winner.clone(), ()).0;
        let l = index.insert_full(loser.clone(), ()).0;
        edges.push((w, l, count));
    }
    let n = index.len();
    if n == 0 {
        return Err(Error::Parse {
            line: 2,
            message: "no edges".into(),
        });
    }
    let mut counts = DenseMatrix::zeros(n, n);
    for (w, l, c) in edges {
        counts[(w, l)] += c;
    }
    CountMatrix::new(counts, index.into_keys().collect())
}

fn parse_matrix(rows: &[Record]) -> Result<CountMatrix> {
    let Some(((_, header), body)) = rows.split_first() else {
        return Err(Error::Parse {
            line: 1,
            message: "empty input".into(),
        });
    };
    let labels: Vec<String> = header.iter().skip(1).cloned().collect();
    let n = labels.len();
    if body.len() != n {
        return Err(Error::Dimension(format!(
            "matrix has {n} column labels but {} data rows",
            body.len()
        )));
    }
    let mut data = Vec::with_capacity(n * n);
    for (r, (line, fields)) in body.iter().enumerate() {
        if fields.len() != n + 1 {
            return Err(Error::Dimension(format!(
                "line {line}: expected a label and {n} counts, found {} fields",
                fields.len()
            )));
        }
        if fields[0] != labels[r] {
            return Err(Error::Parse {
                line: *line,
                message: format!("row label `{}` does not match column label `{}`", fields[0], labels[r]),
            });
        }
        for field in &fields[1..] {
            data.push(parse_count(*line, field)?);
        }
    }
    CountMatrix::new(DenseMatrix::new(n, n, data)?, labels)
}

/// Writes the labelled matrix layout. Counts use Rust's shortest
/// round-trip float formatting, so parsing the output reproduces the
/// matrix bit for bit.
pub fn emit_matrix(c: &CountMatrix) -> String {
    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let header: Vec<&str> = std::iter::once("")
        .chain(c.labels().iter().map(String::as_str))
        .collect();
    writer.write_record(&header).expect("in-memory write");
    for (i, label) in c.labels().iter().enumerate() {
        let row: Vec<String> = std::iter::once(label.clone())
            .chain(c.counts().row(i).iter().map(|x| format!("{x:?}")))
            .collect();
        writer.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

/// `label,articles` CSV with a header row, matched to `labels` by name.
pub fn parse_articles(path: &Path, labels: &[String]) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let rows = records(&text)?;
    let mut by_label = IndexMap::new();
    for (line, fields) in rows.iter().skip(1) {
        let [label, value] = fields.as_slice() else {
            return Err(Error::Parse {
                line: *line,
                message: "expected `label,articles`".into(),
            });
        };
        by_label.insert(label.clone(), parse_count(*line, value)?);
    }
    labels
        .iter()
        .map(|l| {
            by_label
                .get(l)
                .copied()
                .ok_or_else(|| Error::Domain(format!("no article count for `{l}`")))
        })
        .collect()
}
