//! CSV encodings of the measurement tables and exponent series.
//!
//! Floats are written with Rust's shortest round-trip formatting, so reading a
//! table back reproduces the in-memory values exactly. Undefined rates are
//! written as empty fields.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fitting::{FitOutcome, FitResult, Model};
use crate::pa_measure::{AttachmentStats, Axis, ClassRow, HybridCell, HybridStats, LocalizedCurve, Window};
use crate::pipeline::{ExponentKind, ExponentSeries};
use crate::temporal_graph::Timestamp;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(s: &str, line: usize) -> Result<Option<f64>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| Error::Malformed {
        line,
        message: format!("not a number: `{s}`"),
    })
}

fn parse<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| Error::Malformed {
        line,
        message: format!("unexpected value `{s}`"),
    })
}

fn check_header(r: &mut csv::Reader<impl Read>, expected: &[&str]) -> Result<()> {
    let header = r.headers()?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Malformed {
            line: 1,
            message: format!("expected header `{}`", expected.join(",")),
        });
    }
    Ok(())
}

const CLASS_HEADER: [&str; 5] = ["axis_value", "A", "n", "T", "kappa"];

/// `axis_value,A,n,T,kappa`
pub fn write_attachment_csv<W: Write>(out: W, stats: &AttachmentStats) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLASS_HEADER)?;
    for r in &stats.rows {
        w.write_record([
            r.value.to_string(),
            r.attachments.to_string(),
            r.size.to_string(),
            opt(r.rate),
            opt(r.cumulative),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_attachment_csv<R: Read>(input: R, axis: Axis, window: Window) -> Result<AttachmentStats> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &CLASS_HEADER)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 5 {
            return Err(Error::Malformed {
                line,
                message: "expected 5 fields".into(),
            });
        }
        rows.push(ClassRow {
            value: parse(&rec[0], line)?,
            attachments: parse(&rec[1], line)?,
            size: parse(&rec[2], line)?,
            rate: parse_opt(&rec[3], line)?,
            cumulative: parse_opt(&rec[4], line)?,
        });
    }
    Ok(AttachmentStats { axis, window, rows })
}

const HYBRID_HEADER: [&str; 5] = ["c", "k", "A", "n", "T"];

/// `c,k,A,n,T`
pub fn write_hybrid_csv<W: Write>(out: W, h: &HybridStats) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HYBRID_HEADER)?;
    for (&(c, k), cell) in &h.cells {
        w.write_record([
            c.to_string(),
            k.to_string(),
            cell.attachments.to_string(),
            cell.size.to_string(),
            opt(cell.rate),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// Reads a hybrid table; `node_count` (N at the cutoff) restores the raw values.
pub fn read_hybrid_csv<R: Read>(input: R, window: Window, node_count: u64) -> Result<HybridStats> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &HYBRID_HEADER)?;
    let mut cells = BTreeMap::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        if rec.len() != 5 {
            return Err(Error::Malformed {
                line,
                message: "expected 5 fields".into(),
            });
        }
        let c: u32 = parse(&rec[0], line)?;
        let k: u32 = parse(&rec[1], line)?;
        let attachments: u64 = parse(&rec[2], line)?;
        let size: u64 = parse(&rec[3], line)?;
        let raw = if size == 0 {
            0.0
        } else {
            attachments as f64 * node_count as f64 / size as f64
        };
        cells.insert(
            (c, k),
            HybridCell {
                attachments,
                size,
                raw,
                rate: parse_opt(&rec[4], line)?,
            },
        );
    }
    Ok(HybridStats {
        window,
        node_count,
        cells,
    })
}

/// `k,n,Phi` for a within-shell curve or `c,n,Pi` for an among-shell curve.
pub fn write_curve_csv<W: Write>(out: W, curve: &LocalizedCurve) -> Result<()> {
    use crate::pa_measure::FixedAxis;
    let header = match curve.fixed {
        FixedAxis::Coreness(_) => ["k", "n", "Phi"],
        FixedAxis::Degree(_) => ["c", "n", "Pi"],
    };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for p in &curve.points {
        w.write_record([p.value.to_string(), p.size.to_string(), opt(p.cumulative)])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

const SERIES_HEADER: [&str; 6] = ["window_end", "exponent", "intercept", "r2", "n_points", "model"];

/// `window_end,exponent,intercept,r2,n_points,model`; insufficient windows
/// leave the numeric fields empty and report `insufficient` as the model.
pub fn write_series_csv<W: Write>(out: W, series: &ExponentSeries) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SERIES_HEADER)?;
    for (&t, v) in series.windows.iter().zip(&series.values) {
        let end = (t + series.dt).to_string();
        match v {
            FitOutcome::Fitted(f) => w.write_record([
                end,
                f.exponent.to_string(),
                f.intercept.to_string(),
                f.r_squared.to_string(),
                f.n_points.to_string(),
                f.model.to_string(),
            ])?,
            FitOutcome::Insufficient { usable, .. } => w.write_record([
                end,
                String::new(),
                String::new(),
                String::new(),
                usable.to_string(),
                "insufficient".to_string(),
            ])?,
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

/// One parsed series row.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesRow {
    pub window_end: Timestamp,
    pub exponent: Option<f64>,
    pub intercept: Option<f64>,
    pub r_squared: Option<f64>,
    pub n_points: usize,
    pub model: Option<Model>,
}

pub fn read_series_csv<R: Read>(input: R) -> Result<Vec<SeriesRow>> {
    let mut r = csv::Reader::from_reader(input);
    check_header(&mut r, &SERIES_HEADER)?;
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = i + 2;
        let model = match &rec[5] {
            "power_law" => Some(Model::PowerLaw),
            "exponential" => Some(Model::Exponential),
            "insufficient" => None,
            other => {
                return Err(Error::Malformed {
                    line,
                    message: format!("unknown model `{other}`"),
                })
            }
        };
        rows.push(SeriesRow {
            window_end: parse(&rec[0], line)?,
            exponent: parse_opt(&rec[1], line)?,
            intercept: parse_opt(&rec[2], line)?,
            r_squared: parse_opt(&rec[3], line)?,
            n_points: parse(&rec[4], line)?,
            model,
        });
    }
    Ok(rows)
}

impl SeriesRow {
    /// The row as the series would hold it, minus the fields the CSV does not
    /// carry (slope, fit range, exclusion counts).
    pub fn matches(&self, v: &FitOutcome) -> bool {
        match (v, self.model) {
            (FitOutcome::Fitted(f), Some(model)) => {
                let FitResult {
                    exponent,
                    intercept,
                    r_squared,
                    n_points,
                    ..
                } = f;
                model == f.model
                    && self.exponent == Some(*exponent)
                    && self.intercept == Some(*intercept)
                    && self.r_squared == Some(*r_squared)
                    && self.n_points == *n_points
            }
            (FitOutcome::Insufficient { usable, .. }, None) => self.n_points == *usable,
            _ => false,
        }
    }
}

/// Convenience used by series consumers that only need the kind label.
pub fn series_file_name(kind: ExponentKind) -> String {
    format!("series_{kind}.csv")
}
