//! CSV datasets with header `x1,...,xd,y`.

use std::path::Path;

use crate::error::{Error, Result};
use crate::kriging::{Fidelity, SampleSet};
use crate::sampling::Domain;

/// Rows read from one dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Vec<f64>>,
    pub responses: Vec<f64>,
    /// Rows discarded because some entry was missing or non-finite.
    pub dropped: usize,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }
}

fn expected_header(d: usize, with_y: bool) -> Vec<String> {
    let mut h: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    if with_y {
        h.push("y".into());
    }
    h
}

fn parse_field(s: &str) -> Result<Option<f64>> {
    let t = s.trim();
    if t.is_empty() {
        return Ok(None);
    }
    let v: f64 = t
        .parse()
        .map_err(|_| Error::Dataset(format!("cannot parse `{t}` as a number")))?;
    Ok(v.is_finite().then_some(v))
}

/// Reads a table whose header is `x1..xd` followed by `y` when `with_y`.
fn read_table(path: &Path, with_y: bool) -> Result<(usize, Vec<Vec<f64>>, usize)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let d = if with_y { header.len().saturating_sub(1) } else { header.len() };
    if d == 0 || header != expected_header(d, with_y) {
        return Err(Error::Dataset(format!(
            "{}: header must be `{}`, found `{}`",
            path.display(),
            expected_header(d.max(1), with_y).join(","),
            header.join(",")
        )));
    }
    let width = header.len();
    let mut rows = Vec::new();
    let mut dropped = 0;
    for record in reader.records() {
        let record = record?;
        if record.len() != width {
            return Err(Error::Dataset(format!(
                "{}: row with {} fields, expected {width}",
                path.display(),
                record.len()
            )));
        }
        let values = record.iter().map(parse_field).collect::<Result<Vec<_>>>()?;
        match values.into_iter().collect::<Option<Vec<f64>>>() {
            Some(row) => rows.push(row),
            None => dropped += 1,
        }
    }
    Ok((d, rows, dropped))
}

/// Reads an `x1..xd,y` dataset, dropping rows with non-finite entries.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    let (d, rows, dropped) = read_table(path, true)?;
    let mut points = Vec::with_capacity(rows.len());
    let mut responses = Vec::with_capacity(rows.len());
    for mut r in rows {
        responses.push(r.pop().expect("row has a response"));
        debug_assert_eq!(r.len(), d);
        points.push(r);
    }
    Ok(Dataset {
        points,
        responses,
        dropped,
    })
}

/// Reads an `x1..xd` query table (an extra trailing `y` column is ignored).
pub fn read_queries(path: &Path) -> Result<Vec<Vec<f64>>> {
    let with_y = {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path)?;
        reader.headers()?.iter().next_back() == Some("y")
    };
    let (_, mut rows, dropped) = read_table(path, with_y)?;
    if dropped > 0 {
        return Err(Error::Dataset(format!(
            "{}: {dropped} query rows contain non-finite values",
            path.display()
        )));
    }
    if with_y {
        for r in &mut rows {
            r.pop();
        }
    }
    Ok(rows)
}

/// Writes an `x1..xd,y` dataset using shortest round-trip float formatting.
pub fn write_dataset(path: &Path, points: &[Vec<f64>], responses: &[f64]) -> Result<()> {
    write_dataset_to(std::fs::File::create(path)?, points, responses)
}

pub fn write_dataset_to<W: std::io::Write>(out: W, points: &[Vec<f64>], responses: &[f64]) -> Result<()> {
    if points.len() != responses.len() {
        return Err(Error::Input("points and responses differ in length".into()));
    }
    let d = points.first().map_or(0, Vec::len);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(expected_header(d, true))?;
    for (p, y) in points.iter().zip(responses) {
        let mut rec: Vec<String> = p.iter().map(|v| v.to_string()).collect();
        rec.push(y.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// The two ingested fidelity levels plus how many rows each lost.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub lf: SampleSet,
    pub hf: SampleSet,
    pub dropped_lf: usize,
    pub dropped_hf: usize,
}

/// Bounding box of the given points, widened where a coordinate is constant.
pub fn bounding_domain(points: &[Vec<f64>]) -> Result<Domain> {
    let d = points.first().map_or(0, Vec::len);
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for j in 0..d {
            lo[j] = lo[j].min(p[j]);
            hi[j] = hi[j].max(p[j]);
        }
    }
    for j in 0..d {
        if lo[j] >= hi[j] {
            let pad = 0.5 * lo[j].abs().max(1.0);
            lo[j] -= pad;
            hi[j] += pad;
        }
    }
    Domain::new(lo, hi)
}

/// Loads LF and HF CSV files into sample sets over `domain` (the bounding
/// box of all valid points when `None`).
pub fn ingest_dataset(lf_csv: &Path, hf_csv: &Path, domain: Option<&Domain>) -> Result<Ingested> {
    let lf = read_dataset(lf_csv)?;
    let hf = read_dataset(hf_csv)?;
    for (name, data) in [("low-fidelity", &lf), ("high-fidelity", &hf)] {
        if data.points.len() < 2 {
            return Err(Error::Dataset(format!(
                "{name} file has {} valid rows; at least 2 are needed",
                data.points.len()
            )));
        }
    }
    if lf.dim() != hf.dim() {
        return Err(Error::DimensionMismatch {
            expected: lf.dim(),
            actual: hf.dim(),
        });
    }
    let domain = match domain {
        Some(d) => {
            if d.dim() != lf.dim() {
                return Err(Error::DimensionMismatch {
                    expected: lf.dim(),
                    actual: d.dim(),
                });
            }
            d.clone()
        }
        None => {
            let all: Vec<Vec<f64>> = lf.points.iter().chain(&hf.points).cloned().collect();
            bounding_domain(&all)?
        }
    };
    Ok(Ingested {
        lf: SampleSet::from_physical(&domain, &lf.points, &lf.responses, Fidelity::Low)?,
        hf: SampleSet::from_physical(&domain, &hf.points, &hf.responses, Fidelity::High)?,
        dropped_lf: lf.dropped,
        dropped_hf: hf.dropped,
    })
}
