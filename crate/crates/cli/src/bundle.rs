//! On-disk layout of measured windows: one directory per window holding the
//! CSV tables, plus `manifest.json` at the top.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use coregrowth::fitting::FitOptions;
use coregrowth::pa_measure::{phi_within_shell, pi_among_shells, Axis, Window};
use coregrowth::pipeline::{fit_window, WindowReport};
use coregrowth::tables;
use coregrowth::{FitPlan, Timestamp};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub input: String,
    pub time_unit: String,
    pub degree_mode: String,
    pub dt: Timestamp,
    pub windows: Vec<WindowEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowEntry {
    pub dir: String,
    pub cutoff: Timestamp,
    pub end: Timestamp,
    /// N(t): nodes present at the cutoff.
    pub node_count: u64,
    pub events: usize,
    pub new_new: usize,
    pub old_old: usize,
    /// No attachment events; the tables carry empty rate columns.
    pub empty: bool,
    /// Shells with a `phi_c<c0>.csv` curve.
    pub phi: Vec<u32>,
    /// Degree classes with a `pi_k<k0>.csv` curve.
    pub pi: Vec<u32>,
}

pub fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CliError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(coregrowth::Error::from)?;
    writeln!(w).and_then(|_| w.flush()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Wraps a core error with the file it came from.
fn in_file(path: &Path, e: coregrowth::Error) -> CliError {
    match e {
        coregrowth::Error::Malformed { line, message } => CliError::Data(coregrowth::Error::Malformed {
            line,
            message: format!("{}: {message}", path.display()),
        }),
        other => CliError::Data(other),
    }
}

/// Writes the tables of one window into `root/entry.dir` and fills in the
/// curves that exist.
pub fn write_window(root: &Path, report: &WindowReport, c0: &[u32], k0: &[u32], entry: &mut WindowEntry) -> Result<(), CliError> {
    let dir = root.join(&entry.dir);
    let put = |name: String, f: &dyn Fn(&mut BufWriter<File>) -> coregrowth::Result<()>| -> Result<(), CliError> {
        let path = dir.join(name);
        let mut w = create(&path)?;
        f(&mut w).map_err(|e| in_file(&path, e))?;
        w.flush().map_err(|source| CliError::Io { path, source })
    };
    put("degree.csv".into(), &|w| tables::write_attachment_csv(w, &report.degree))?;
    put("coreness.csv".into(), &|w| tables::write_attachment_csv(w, &report.coreness))?;
    put("hybrid.csv".into(), &|w| tables::write_hybrid_csv(w, &report.hybrid))?;
    for &c in c0 {
        if let Ok(curve) = phi_within_shell(&report.hybrid, c) {
            put(format!("phi_c{c}.csv"), &|w| tables::write_curve_csv(w, &curve))?;
            entry.phi.push(c);
        }
    }
    for &k in k0 {
        if let Ok(curve) = pi_among_shells(&report.hybrid, k) {
            put(format!("pi_k{k}.csv"), &|w| tables::write_curve_csv(w, &curve))?;
            entry.pi.push(k);
        }
    }
    Ok(())
}

pub fn read_manifest(root: &Path) -> Result<Manifest, CliError> {
    let path = root.join(MANIFEST);
    serde_json::from_reader(open(&path)?).map_err(|e| in_file(&path, e.into()))
}

/// Rebuilds the window reports from the tables and refits them.
pub fn read_reports(root: &Path, manifest: &Manifest, plan: &FitPlan) -> Result<Vec<WindowReport>, CliError> {
    let mut reports = Vec::with_capacity(manifest.windows.len());
    for entry in &manifest.windows {
        let dir: PathBuf = root.join(&entry.dir);
        let window = Window {
            start: entry.cutoff,
            end: entry.end,
        };
        let read_class = |name: &str, axis: Axis| {
            let path = dir.join(name);
            tables::read_attachment_csv(open(&path)?, axis, window).map_err(|e| in_file(&path, e))
        };
        let degree = read_class("degree.csv", Axis::Degree)?;
        let coreness = read_class("coreness.csv", Axis::Coreness)?;
        let path = dir.join("hybrid.csv");
        let hybrid = tables::read_hybrid_csv(open(&path)?, window, entry.node_count).map_err(|e| in_file(&path, e))?;
        let shells = hybrid.shell_stats();
        let fits = fit_window(&degree, &coreness, &hybrid, &shells, plan);
        reports.push(WindowReport {
            cutoff: entry.cutoff,
            dt: entry.end - entry.cutoff,
            events: entry.events,
            new_new: entry.new_new,
            old_old: entry.old_old,
            degree,
            coreness,
            hybrid,
            shells,
            fits,
        });
    }
    Ok(reports)
}

pub fn fit_plan(min_class_size: u64, tail_trim: f64) -> Result<FitPlan, CliError> {
    if !(0.0..1.0).contains(&tail_trim) {
        return Err(CliError::Usage(format!("invalid value for `tail_trim`: {tail_trim} (expected 0 <= x < 1)")));
    }
    Ok(FitPlan::uniform(FitOptions {
        min_class_size,
        tail_trim,
        ..FitOptions::default()
    }))
}
