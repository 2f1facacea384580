use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use coregrowth::growth_sim::{CorenessRefresh, OutDegree};
use coregrowth::pipeline::{ExponentSeries, SeriesSummary};
use coregrowth::tables;
use coregrowth::temporal_graph::{parse_timestamp, read_generic_file, read_snap_files, IngestOptions};
use coregrowth::{
    analyze_schedule, simulate, DegreeMode, ExponentKind, FitOptions, FitPlan, KernelMode, KernelSpec, SimConfig,
    TemporalNetwork, TimeUnit, Timestamp, WindowSchedule,
};
use serde::Serialize;

use crate::bundle::{self, Manifest, WindowEntry, MANIFEST};
use crate::config::ConfigFile;
use crate::{CliError, Command, Common, FitArgs, FitOptionArgs, IngestArgs, MeasureArgs, ReportArgs, SimulateArgs, WindowArgs};

const DEFAULT_CURVE_CLASS: u32 = 20;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Measure(a) => measure(a),
        Command::Fit(a) => fit(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Report(a) => report(a),
    }
}

fn load(common: &Common) -> Result<(ConfigFile, Option<String>), CliError> {
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let stamp = if cfg.flag("no_timestamp", common.no_timestamp)? {
        None
    } else {
        Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
    };
    Ok((cfg, stamp))
}

fn write_network(path: &Path, net: &TemporalNetwork, stamp: Option<&str>) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = bundle::create(path)?;
    if let Some(s) = stamp {
        writeln!(w, "# generated: {s}").map_err(io)?;
    }
    net.write_tsv(&mut w).map_err(io)?;
    w.flush().map_err(io)
}

fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct IngestSummary<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<&'a str>,
    format: &'a str,
    time_unit: String,
    report: &'a coregrowth::temporal_graph::IngestReport,
}

fn ingest(a: IngestArgs) -> Result<(), CliError> {
    let (cfg, stamp) = load(&a.common)?;
    let format: String = cfg.pick_or("format", a.format, "generic_tsv".into())?;
    let output: PathBuf = cfg.require("output", a.output)?;
    let (net, report) = match format.as_str() {
        "generic_tsv" => {
            let input: PathBuf = cfg.require("input", a.input)?;
            read_generic_file(&input)?
        }
        "snap_citation" => {
            let edges: PathBuf = cfg.require("edges", a.edges)?;
            let dates: PathBuf = cfg.require("dates", a.dates)?;
            let opts = IngestOptions {
                strip_prefix: cfg.pick("strip_prefix", a.strip_prefix)?,
                ..IngestOptions::default()
            };
            read_snap_files(&edges, &dates, &opts)?
        }
        other => {
            return Err(CliError::Usage(format!(
                "invalid value for `format`: `{other}` (expected generic_tsv or snap_citation)"
            )))
        }
    };
    if net.edge_count() == 0 {
        return Err(CliError::Data(coregrowth::Error::Malformed {
            line: report.lines_read,
            message: "input contains no usable edges".into(),
        }));
    }
    write_network(&output, &net, stamp.as_deref())?;
    let summary = IngestSummary {
        generated_at: stamp.as_deref(),
        format: &format,
        time_unit: net.time_unit().to_string(),
        report: &report,
    };
    bundle::write_json(&sidecar(&output, ".report.json"), &summary)?;
    println!(
        "{} nodes, {} edges ({} lines, {} comments, {} self-loops, {} duplicates, {} missing dates)",
        report.nodes,
        report.edges,
        report.lines_read,
        report.comment_lines,
        report.self_loops,
        report.duplicates,
        report.missing_dates
    );
    Ok(())
}

/// Parses a string-valued flag, naming the field on failure.
fn typed<T>(key: &str, raw: Option<&str>) -> Result<Option<T>, CliError>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    raw.map(|s| s.parse().map_err(|e| CliError::Usage(format!("invalid value for `{key}`: {e}"))))
        .transpose()
}

fn parse_time(key: &str, raw: &str) -> Result<Timestamp, CliError> {
    parse_timestamp(raw)
        .map(|(t, _)| t)
        .ok_or_else(|| CliError::Usage(format!("invalid value for `{key}`: `{raw}` (expected an integer or YYYY-MM-DD)")))
}

fn schedule(cfg: &ConfigFile, w: &WindowArgs, net: &TemporalNetwork) -> Result<WindowSchedule, CliError> {
    let default = WindowSchedule::default_for(net)?;
    let dt = cfg.pick_or("dt", w.dt, default.dt)?;
    if dt <= 0 {
        return Err(CliError::Usage(format!("invalid value for `dt`: {dt} (must be positive)")));
    }
    let start: Option<String> = cfg.pick("start", w.start.clone())?;
    let end: Option<String> = cfg.pick("end", w.end.clone())?;
    let stride: Option<i64> = cfg.pick("stride", w.stride)?;
    if start.is_none() && end.is_none() && stride.is_none() {
        return Ok(WindowSchedule {
            cutoffs: default.cutoffs,
            dt,
        });
    }
    let (first, last) = net.time_span().unwrap_or((0, 0));
    let start = match start {
        Some(s) => parse_time("start", &s)?,
        None => default.cutoffs.first().copied().unwrap_or(first),
    };
    let end = match end {
        Some(s) => parse_time("end", &s)?,
        None => last,
    };
    let stride = stride.unwrap_or(dt);
    if stride <= 0 {
        return Err(CliError::Usage(format!("invalid value for `stride`: {stride} (must be positive)")));
    }
    let s = WindowSchedule::regular(start, stride, dt, end)?;
    if s.is_empty() {
        return Err(CliError::Usage(format!("empty window schedule: `start` ({start}) is after `end` ({end})")));
    }
    Ok(s)
}

fn measure_into(
    cfg: &ConfigFile,
    stamp: Option<&str>,
    input: Option<PathBuf>,
    out_dir: Option<PathBuf>,
    w: &WindowArgs,
) -> Result<PathBuf, CliError> {
    let input: PathBuf = cfg.require("input", input)?;
    let out_dir: PathBuf = cfg.require("out_dir", out_dir)?;
    let mode: DegreeMode = cfg.pick_or("degree_mode", typed("degree_mode", w.degree_mode.as_deref())?, DegreeMode::Undirected)?;
    let c0 = cfg.pick_list("c0", w.c0.clone())?.unwrap_or_else(|| vec![DEFAULT_CURVE_CLASS]);
    let k0 = cfg.pick_list("k0", w.k0.clone())?.unwrap_or_else(|| vec![DEFAULT_CURVE_CLASS]);

    let (net, _) = read_generic_file(&input)?;
    if net.edge_count() == 0 {
        return Err(CliError::Insufficient(format!("{}: no edges to measure", input.display())));
    }
    let schedule = schedule(cfg, w, &net)?;
    if schedule.is_empty() {
        return Err(CliError::Insufficient(
            "the default schedule has no cutoffs; the data spans less than one window, set --start/--end".into(),
        ));
    }
    let reports = analyze_schedule(&net, &schedule, mode, &FitPlan::default())?;

    let mut manifest = Manifest {
        generated_at: stamp.map(str::to_string),
        input: input.display().to_string(),
        time_unit: net.time_unit().to_string(),
        degree_mode: mode.to_string(),
        dt: schedule.dt,
        windows: Vec::with_capacity(reports.len()),
    };
    for (i, r) in reports.iter().enumerate() {
        let mut entry = WindowEntry {
            dir: format!("window_{i:03}"),
            cutoff: r.cutoff,
            end: r.cutoff + r.dt,
            node_count: r.hybrid.node_count,
            events: r.events,
            new_new: r.new_new,
            old_old: r.old_old,
            empty: r.is_empty(),
            phi: Vec::new(),
            pi: Vec::new(),
        };
        bundle::write_window(&out_dir, r, &c0, &k0, &mut entry)?;
        manifest.windows.push(entry);
    }
    bundle::write_json(&out_dir.join(MANIFEST), &manifest)?;
    let with_events = reports.iter().filter(|r| !r.is_empty()).count();
    println!("{} windows measured, {with_events} with attachment events", reports.len());
    if with_events == 0 {
        return Err(CliError::Insufficient(
            "no window contains attachment events; adjust --start, --stride or --dt".into(),
        ));
    }
    Ok(out_dir)
}


fn measure(a: MeasureArgs) -> Result<(), CliError> {
    let (cfg, stamp) = load(&a.common)?;
    measure_into(&cfg, stamp.as_deref(), a.input, a.out_dir, &a.window).map(|_| ())
}

#[derive(Serialize)]
struct SeriesFile<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<&'a str>,
    fit_options: FitOptions,
    series: BTreeMap<&'static str, &'a ExponentSeries>,
}

#[derive(Serialize)]
struct SummaryFile<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<&'a str>,
    /// How the spread is computed.
    spread: &'static str,
    exponents: BTreeMap<&'static str, Option<SeriesSummary>>,
    /// Tendencies reported for inspection, never enforced.
    checks: BTreeMap<&'static str, Option<bool>>,
}

fn fit_from(
    cfg: &ConfigFile,
    stamp: Option<&str>,
    bundles: &Path,
    out_dir: &Path,
    f: &FitOptionArgs,
) -> Result<(), CliError> {
    let defaults = FitOptions::default();
    let min_class_size = cfg.pick_or("min_class_size", f.min_class_size, defaults.min_class_size)?;
    let tail_trim = cfg.pick_or("tail_trim", f.tail_trim, defaults.tail_trim)?;
    let plan = bundle::fit_plan(min_class_size, tail_trim)?;
    let manifest = bundle::read_manifest(bundles)?;
    let reports = bundle::read_reports(bundles, &manifest, &plan)?;

    let series: Vec<ExponentSeries> = ExponentKind::ALL
        .iter()
        .map(|&k| ExponentSeries::from_reports(k, &reports))
        .collect();
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    for s in &series {
        let path = out_dir.join(tables::series_file_name(s.kind));
        let mut w = bundle::create(&path)?;
        tables::write_series_csv(&mut w, s)?;
    }
    bundle::write_json(
        &out_dir.join("series.json"),
        &SeriesFile {
            generated_at: stamp,
            fit_options: plan.alpha,
            series: series.iter().map(|s| (s.kind.name(), s)).collect(),
        },
    )?;

    let summaries: BTreeMap<&'static str, Option<SeriesSummary>> =
        series.iter().map(|s| (s.kind.name(), s.summary())).collect();
    let mean = |k: ExponentKind| summaries[k.name()].map(|s| s.mean);
    let compare = |a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> bool| a.zip(b).map(|(a, b)| f(a, b));
    let mut checks = BTreeMap::new();
    checks.insert(
        "alpha_within_shell_ge_alpha",
        compare(mean(ExponentKind::AlphaWithinShell), mean(ExponentKind::Alpha), |a, b| a >= b),
    );
    checks.insert(
        "beta_among_shells_le_beta",
        compare(mean(ExponentKind::BetaAmongShells), mean(ExponentKind::Beta), |a, b| a <= b),
    );
    bundle::write_json(
        &out_dir.join("summary.json"),
        &SummaryFile {
            generated_at: stamp,
            spread: "sample standard deviation over fitted windows",
            exponents: summaries.clone(),
            checks,
        },
    )?;

    let mut text = String::from("# mean ± sample standard deviation over fitted windows\n");
    for s in &series {
        match summaries[s.kind.name()] {
            Some(m) => text += &format!(
                "{} = {} ± {} ({}/{} windows)\n",
                s.kind,
                round4(m.mean),
                round4(m.std),
                m.windows_fitted,
                m.windows_total
            ),
            None => text += &format!("{} = insufficient (0/{} windows)\n", s.kind, s.values.len()),
        }
    }
    let path = out_dir.join("summary.txt");
    fs::write(&path, &text).map_err(|source| CliError::Io { path, source })?;
    print!("{text}");

    if summaries.values().all(Option::is_none) {
        return Err(CliError::Insufficient("no window has enough classes for any fit".into()));
    }
    Ok(())
}

fn round4(x: f64) -> String {
    format!("{x:.4}")
}

fn fit(a: FitArgs) -> Result<(), CliError> {
    let (cfg, stamp) = load(&a.common)?;
    let bundles: PathBuf = cfg.require("bundles", a.bundles)?;
    let out_dir: PathBuf = cfg.pick_or("out_dir", a.out_dir, bundles.clone())?;
    fit_from(&cfg, stamp.as_deref(), &bundles, &out_dir, &a.fit)
}


fn report(a: ReportArgs) -> Result<(), CliError> {
    let (cfg, stamp) = load(&a.common)?;
    let out_dir = measure_into(&cfg, stamp.as_deref(), a.input, a.out_dir, &a.window)?;
    fit_from(&cfg, stamp.as_deref(), &out_dir, &out_dir, &a.fit)
}

#[derive(Serialize)]
struct SimMetadata<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    generated_at: Option<&'a str>,
    config: &'a SimConfig,
    kernel: &'a KernelSpec,
    time_unit: TimeUnit,
    nodes: usize,
    edges: usize,
}

fn simulate_cmd(a: SimulateArgs) -> Result<(), CliError> {
    let (cfg, stamp) = load(&a.common)?;
    let output: PathBuf = cfg.require("output", a.output)?;
    let n: usize = cfg.pick_or("n", a.n, 20_000)?;
    let m: usize = cfg.pick_or("m", a.m, 3)?;
    let extra_mean: f64 = cfg.pick_or("extra_mean", a.extra_mean, 0.0)?;
    let mode: KernelMode = cfg.pick_or("kernel", typed("kernel", a.kernel.as_deref())?, KernelMode::Hybrid)?;
    let default_alpha = if mode == KernelMode::DegreeOnly { 1.0 } else { 0.7 };
    let alpha: f64 = cfg.pick_or("alpha", a.alpha, default_alpha)?;
    let beta: f64 = cfg.pick_or("beta", a.beta, 0.2)?;
    let offset: f64 = cfg.pick_or("offset", a.offset, 1.0)?;
    let seed: u64 = cfg.pick_or("seed", a.seed, 42)?;
    let refresh: usize = cfg.pick_or("refresh_every", a.refresh_every, 1)?;
    if extra_mean < 0.0 || !extra_mean.is_finite() {
        return Err(CliError::Usage(format!("invalid value for `extra_mean`: {extra_mean} (must be >= 0)")));
    }

    let mut sim = SimConfig::new(n, m, seed);
    if extra_mean > 0.0 {
        sim.out_degree = OutDegree::ShiftedGeometric { extra_mean };
    }
    sim.coreness_refresh = match refresh {
        1 => CorenessRefresh::EveryStep,
        k => CorenessRefresh::EveryNSteps(k),
    };
    let kernel = KernelSpec {
        mode,
        alpha,
        beta,
        degree_offset: offset,
    };
    let net = simulate(&sim, &kernel)?;
    write_network(&output, &net, stamp.as_deref())?;
    bundle::write_json(
        &sidecar(&output, ".meta.json"),
        &SimMetadata {
            generated_at: stamp.as_deref(),
            config: &sim,
            kernel: &kernel,
            time_unit: net.time_unit(),
            nodes: net.node_count(),
            edges: net.edge_count(),
        },
    )?;
    println!("{} nodes, {} edges written to {}", net.node_count(), net.edge_count(), output.display());
    Ok(())
}
