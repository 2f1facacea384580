//! Temporal network model: ingestion, snapshots at a cutoff time, and the
//! new-node attachments observed inside a window `[t, t + dt)`.
//!
//! Node ids are dense (`0..n`) and assigned in order of first appearance in
//! the time-sorted edge list, so they follow arrival order. External labels
//! are kept in a side table for export.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer timestamp: epoch days for calendar data, abstract ticks otherwise.
pub type Timestamp = i64;

/// One year, the default observation window.
pub const DAYS_PER_YEAR: Timestamp = 365;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimedEdge {
    pub src: NodeId,
    pub dst: NodeId,
    pub t: Timestamp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeUnit {
    /// Days since 1970-01-01.
    Days,
    Ticks,
}

impl fmt::Display for TimeUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeUnit::Days => "days",
            TimeUnit::Ticks => "ticks",
        })
    }
}

impl FromStr for TimeUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "days" => Ok(TimeUnit::Days),
            "ticks" => Ok(TimeUnit::Ticks),
            other => Err(Error::Config(format!("unknown time unit `{other}`"))),
        }
    }
}

/// Which incident edges count toward a node's degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeMode {
    #[default]
    Undirected,
    /// Edges pointing at the node (citations received).
    In,
    /// Edges leaving the node (references made).
    Out,
}

impl fmt::Display for DegreeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DegreeMode::Undirected => "undirected",
            DegreeMode::In => "in",
            DegreeMode::Out => "out",
        })
    }
}

impl FromStr for DegreeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "undirected" => Ok(DegreeMode::Undirected),
            "in" => Ok(DegreeMode::In),
            "out" => Ok(DegreeMode::Out),
            other => Err(Error::Config(format!(
                "unknown degree mode `{other}` (expected undirected, in or out)"
            ))),
        }
    }
}

/// Counters collected while building a [`TemporalNetwork`].
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestReport {
    pub lines_read: usize,
    pub comment_lines: usize,
    pub self_loops: usize,
    pub duplicates: usize,
    /// SNAP adapter only: edges whose citing node has no date.
    pub missing_dates: usize,
    pub nodes: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    /// Prefix marking cross-listed ids in a SNAP dates file (`"11"` for the
    /// arXiv HEP datasets). Stripped when the id is longer than `id_width`.
    pub strip_prefix: Option<String>,
    /// Width of an unprefixed SNAP id; defaults to 7 digits.
    pub id_width: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemporalNetwork {
    edges: Vec<TimedEdge>,
    arrival: Vec<Timestamp>,
    labels: Vec<String>,
    time_unit: TimeUnit,
}

impl TemporalNetwork {
    /// Builds a network from labelled triples. Self-loops are dropped, edges are
    /// stably sorted by time, ids are assigned in sorted order and a repeated
    /// `(src, dst)` pair keeps only its earliest occurrence.
    pub fn from_labelled<I>(triples: I, time_unit: TimeUnit) -> (Self, IngestReport)
    where
        I: IntoIterator<Item = (String, String, Timestamp)>,
    {
        let mut report = IngestReport::default();
        let mut raw: Vec<(String, String, Timestamp)> = Vec::new();
        for (src, dst, t) in triples {
            if src == dst {
                report.self_loops += 1;
                continue;
            }
            raw.push((src, dst, t));
        }
        raw.sort_by_key(|e| e.2);

        let mut ids: HashMap<String, u32> = HashMap::new();
        let mut labels = Vec::new();
        let mut arrival = Vec::new();
        let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(raw.len());
        let mut edges = Vec::with_capacity(raw.len());
        let mut intern = |label: String, t: Timestamp| -> u32 {
            *ids.entry(label).or_insert_with_key(|label| {
                labels.push(label.clone());
                arrival.push(t);
                (labels.len() - 1) as u32
            })
        };
        for (src, dst, t) in raw {
            let s = intern(src, t);
            let d = intern(dst, t);
            if !seen.insert((s, d)) {
                report.duplicates += 1;
                continue;
            }
            edges.push(TimedEdge {
                src: NodeId(s),
                dst: NodeId(d),
                t,
            });
        }
        report.nodes = labels.len();
        report.edges = edges.len();
        (
            TemporalNetwork {
                edges,
                arrival,
                labels,
                time_unit,
            },
            report,
        )
    }

    /// Builds a network over dense ids `0..n_nodes`. Labels are the decimal ids.
    /// Nodes without edges get an arrival of `Timestamp::MAX` and never appear
    /// in any snapshot.
    pub fn from_edges(n_nodes: usize, edges: Vec<TimedEdge>, time_unit: TimeUnit) -> Result<Self> {
        let mut edges = edges;
        edges.sort_by_key(|e| e.t);
        let mut arrival = vec![Timestamp::MAX; n_nodes];
        let mut seen = HashSet::with_capacity(edges.len());
        let mut kept = Vec::with_capacity(edges.len());
        for e in edges {
            if e.src.index() >= n_nodes || e.dst.index() >= n_nodes {
                return Err(Error::Config(format!(
                    "edge ({}, {}) references a node outside 0..{n_nodes}",
                    e.src, e.dst
                )));
            }
            if e.src == e.dst || !seen.insert((e.src, e.dst)) {
                continue;
            }
            for v in [e.src, e.dst] {
                let a = &mut arrival[v.index()];
                *a = (*a).min(e.t);
            }
            kept.push(e);
        }
        Ok(TemporalNetwork {
            edges: kept,
            arrival,
            labels: (0..n_nodes).map(|i| i.to_string()).collect(),
            time_unit,
        })
    }

    pub fn edges(&self) -> &[TimedEdge] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.arrival.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn arrival(&self, v: NodeId) -> Timestamp {
        self.arrival[v.index()]
    }

    pub fn arrivals(&self) -> &[Timestamp] {
        &self.arrival
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v.index()]
    }

    pub fn time_unit(&self) -> TimeUnit {
        self.time_unit
    }

    /// Time of the earliest and latest edge.
    pub fn time_span(&self) -> Option<(Timestamp, Timestamp)> {
        Some((self.edges.first()?.t, self.edges.last()?.t))
    }

    /// Edges with `lo <= t < hi`.
    pub fn edges_between(&self, lo: Timestamp, hi: Timestamp) -> &[TimedEdge] {
        let a = self.edges.partition_point(|e| e.t < lo);
        let b = self.edges.partition_point(|e| e.t < hi);
        &self.edges[a..b.max(a)]
    }

    /// Static graph of every edge with `t < cutoff`.
    pub fn snapshot_at(&self, cutoff: Timestamp, mode: DegreeMode) -> Snapshot {
        let prefix = &self.edges[..self.edges.partition_point(|e| e.t < cutoff)];
        let n = self.node_count();
        let present: Vec<bool> = self.arrival.iter().map(|&a| a < cutoff).collect();
        let present_count = present.iter().filter(|&&p| p).count();

        let mut undirected = Csr::build(n, prefix.iter().flat_map(|e| {
            [(e.src.0, e.dst.0), (e.dst.0, e.src.0)]
        }));
        // Reciprocal citations collapse onto one undirected edge.
        undirected.sort_dedup();
        let directed = match mode {
            DegreeMode::Undirected => None,
            DegreeMode::Out => Some(Csr::build(n, prefix.iter().map(|e| (e.src.0, e.dst.0)))),
            DegreeMode::In => Some(Csr::build(n, prefix.iter().map(|e| (e.dst.0, e.src.0)))),
        };
        Snapshot {
            cutoff,
            mode,
            present,
            present_count,
            undirected,
            directed,
            edge_count: prefix.len(),
        }
    }

    /// Attachments made by nodes arriving in `[t, t + dt)` to nodes that
    /// arrived before `t`.
    pub fn window_attachments(&self, t: Timestamp, dt: Timestamp) -> WindowAttachments {
        assert!(dt > 0, "window length must be positive");
        let end = t.saturating_add(dt);
        let mut w = WindowAttachments {
            start: t,
            end,
            events: Vec::new(),
            new_new: 0,
            old_old: 0,
        };
        for e in self.edges_between(t, end) {
            let src_new = self.arrival[e.src.index()] >= t;
            let dst_new = self.arrival[e.dst.index()] >= t;
            match (src_new, dst_new) {
                (true, false) => w.events.push(Attachment {
                    new_node: e.src,
                    target: e.dst,
                }),
                (false, true) => w.events.push(Attachment {
                    new_node: e.dst,
                    target: e.src,
                }),
                (true, true) => w.new_new += 1,
                (false, false) => w.old_old += 1,
            }
        }
        w
    }

    /// Writes the normalized `src<TAB>dst<TAB>t` edge list using the external labels.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# time_unit: {}", self.time_unit)?;
        for e in &self.edges {
            writeln!(out, "{}\t{}\t{}", self.label(e.src), self.label(e.dst), e.t)?;
        }
        out.flush()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Csr {
    fn build(n: usize, pairs: impl Iterator<Item = (u32, u32)> + Clone) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for (u, _) in pairs.clone() {
            offsets[u as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0u32; offsets[n]];
        for (u, v) in pairs {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
        }
        Csr { offsets, targets }
    }

    fn sort_dedup(&mut self) {
        let n = self.offsets.len() - 1;
        let mut write = 0;
        let mut new_offsets = Vec::with_capacity(n + 1);
        new_offsets.push(0);
        for u in 0..n {
            let (lo, hi) = (self.offsets[u], self.offsets[u + 1]);
            self.targets[lo..hi].sort_unstable();
            let mut last = None;
            for i in lo..hi {
                let v = self.targets[i];
                if last != Some(v) {
                    self.targets[write] = v;
                    write += 1;
                    last = Some(v);
                }
            }
            new_offsets.push(write);
        }
        self.targets.truncate(write);
        self.offsets = new_offsets;
    }

    #[inline]
    fn row(&self, u: usize) -> &[u32] {
        &self.targets[self.offsets[u]..self.offsets[u + 1]]
    }
}

/// The network as of a cutoff time: every edge with `t < cutoff`.
///
/// Degrees follow the snapshot's [`DegreeMode`]; the undirected adjacency is
/// always available for core decomposition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    cutoff: Timestamp,
    mode: DegreeMode,
    present: Vec<bool>,
    present_count: usize,
    undirected: Csr,
    directed: Option<Csr>,
    edge_count: usize,
}

impl Snapshot {
    pub fn cutoff(&self) -> Timestamp {
        self.cutoff
    }

    pub fn mode(&self) -> DegreeMode {
        self.mode
    }

    /// Size of the id space (present or not).
    pub fn id_bound(&self) -> usize {
        self.present.len()
    }

    /// N(t): nodes that arrived before the cutoff.
    pub fn node_count(&self) -> usize {
        self.present_count
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn contains(&self, v: NodeId) -> bool {
        self.present.get(v.index()).copied().unwrap_or(false)
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.present
            .iter()
            .enumerate()
            .filter(|(_, &p)| p)
            .map(|(i, _)| NodeId(i as u32))
    }

    /// Neighbors under the snapshot's degree mode.
    pub fn neighbors(&self, v: NodeId) -> &[u32] {
        match &self.directed {
            Some(csr) => csr.row(v.index()),
            None => self.undirected.row(v.index()),
        }
    }

    #[inline]
    pub fn degree(&self, v: NodeId) -> u32 {
        self.neighbors(v).len() as u32
    }

    pub fn undirected_neighbors(&self, v: NodeId) -> &[u32] {
        self.undirected.row(v.index())
    }

    #[inline]
    pub fn undirected_degree(&self, v: NodeId) -> u32 {
        self.undirected_neighbors(v).len() as u32
    }

    pub fn max_degree(&self) -> u32 {
        self.nodes().map(|v| self.degree(v)).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attachment {
    pub new_node: NodeId,
    pub target: NodeId,
}

/// New-node attachments inside `[start, end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowAttachments {
    pub start: Timestamp,
    pub end: Timestamp,
    pub events: Vec<Attachment>,
    /// Window edges whose endpoints both arrived inside the window.
    pub new_new: usize,
    /// Window edges between two nodes that arrived before the window.
    pub old_old: usize,
}

impl WindowAttachments {
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn total_edges(&self) -> usize {
        self.events.len() + self.new_new + self.old_old
    }
}

/// Parses `YYYY-MM-DD` into epoch days, or a plain integer as-is.
/// The flag reports whether the value was a calendar date.
pub fn parse_timestamp(s: &str) -> Option<(Timestamp, bool)> {
    let s = s.trim();
    if let Ok(v) = s.parse::<i64>() {
        return Some((v, false));
    }
    let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()?;
    Some((date_to_days(date), true))
}

pub fn date_to_days(date: NaiveDate) -> Timestamp {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1).expect("valid epoch");
    (date - epoch).num_days()
}

pub fn days_to_date(days: Timestamp) -> Option<NaiveDate> {
    NaiveDate::from_ymd_opt(1970, 1, 1)?.checked_add_signed(chrono::Duration::days(days))
}

/// Reads the generic `src<TAB>dst<TAB>timestamp` format. A `# time_unit:`
/// header (as written by [`TemporalNetwork::write_tsv`]) fixes the unit;
/// otherwise any ISO date in the file selects days.
pub fn read_generic<R: BufRead>(reader: R) -> Result<(TemporalNetwork, IngestReport)> {
    let mut triples = Vec::new();
    let mut lines_read = 0;
    let mut comment_lines = 0;
    let mut saw_date = false;
    let mut declared: Option<TimeUnit> = None;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            comment_lines += 1;
            if let Some(unit) = comment.trim().strip_prefix("time_unit:") {
                declared = Some(unit.trim().parse().map_err(|_| Error::Malformed {
                    line: line_no,
                    message: format!("unknown time unit `{}`", unit.trim()),
                })?);
            }
            continue;
        }
        let fields: Vec<&str> = trimmed.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::Malformed {
                line: line_no,
                message: format!("expected 3 tab-separated fields, found {}", fields.len()),
            });
        }
        let (t, is_date) = parse_timestamp(fields[2]).ok_or_else(|| Error::Malformed {
            line: line_no,
            message: format!("unparseable timestamp `{}`", fields[2]),
        })?;
        saw_date |= is_date;
        let (src, dst) = (fields[0].trim(), fields[1].trim());
        if src.is_empty() || dst.is_empty() {
            return Err(Error::Malformed {
                line: line_no,
                message: "empty node id".into(),
            });
        }
        triples.push((src.to_string(), dst.to_string(), t));
    }
    let unit = declared.unwrap_or(if saw_date { TimeUnit::Days } else { TimeUnit::Ticks });
    let (net, mut report) = TemporalNetwork::from_labelled(triples, unit);
    report.lines_read = lines_read;
    report.comment_lines = comment_lines;
    Ok((net, report))
}

fn snap_id(raw: &str, line: usize, opts: &IngestOptions) -> Result<u64> {
    let width = opts.id_width.unwrap_or(7);
    let mut s = raw.trim();
    if let Some(prefix) = &opts.strip_prefix {
        if s.len() > width && s.starts_with(prefix.as_str()) {
            s = &s[prefix.len()..];
        }
    }
    s.parse::<u64>().map_err(|_| Error::Malformed {
        line,
        message: format!("node id `{raw}` is not an integer"),
    })
}

/// Reads a SNAP citation dataset: an edges file of `FromNodeId<TAB>ToNodeId`
/// and a dates file of `NodeId<TAB>YYYY-MM-DD`. Each edge is stamped with the
/// citing node's date; edges whose citing node has no date are skipped.
pub fn read_snap<E: BufRead, D: BufRead>(
    edges: E,
    dates: D,
    opts: &IngestOptions,
) -> Result<(TemporalNetwork, IngestReport)> {
    let mut date_of: HashMap<u64, Timestamp> = HashMap::new();
    for (i, line) in dates.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(id), Some(date)) = (fields.next(), fields.next()) else {
            return Err(Error::Malformed {
                line: line_no,
                message: "dates file: expected `NodeId<TAB>YYYY-MM-DD`".into(),
            });
        };
        let id = snap_id(id, line_no, opts)?;
        let (t, _) = parse_timestamp(date).ok_or_else(|| Error::Malformed {
            line: line_no,
            message: format!("dates file: unparseable date `{date}`"),
        })?;
        // An id listed twice (e.g. cross-listed) keeps its earliest date.
        date_of
            .entry(id)
            .and_modify(|d| *d = (*d).min(t))
            .or_insert(t);
    }

    let mut report = IngestReport::default();
    let mut triples = Vec::new();
    for (i, line) in edges.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Malformed {
            line: line_no,
            message: e.to_string(),
        })?;
        report.lines_read += 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            report.comment_lines += 1;
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(src), Some(dst), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Malformed {
                line: line_no,
                message: "edges file: expected `FromNodeId<TAB>ToNodeId`".into(),
            });
        };
        let src = snap_id(src, line_no, opts)?;
        let dst = snap_id(dst, line_no, opts)?;
        match date_of.get(&src) {
            Some(&t) => triples.push((src.to_string(), dst.to_string(), t)),
            None => report.missing_dates += 1,
        }
    }
    let (net, built) = TemporalNetwork::from_labelled(triples, TimeUnit::Days);
    report.self_loops = built.self_loops;
    report.duplicates = built.duplicates;
    report.nodes = built.nodes;
    report.edges = built.edges;
    Ok((net, report))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub fn read_generic_file(path: &Path) -> Result<(TemporalNetwork, IngestReport)> {
    read_generic(open(path)?)
}

pub fn read_snap_files(
    edges: &Path,
    dates: &Path,
    opts: &IngestOptions,
) -> Result<(TemporalNetwork, IngestReport)> {
    read_snap(open(edges)?, open(dates)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(edges: &[(u32, u32, Timestamp)]) -> TemporalNetwork {
        let n = edges.iter().map(|e| e.0.max(e.1) + 1).max().unwrap_or(0) as usize;
        let edges = edges
            .iter()
            .map(|&(s, d, t)| TimedEdge {
                src: NodeId(s),
                dst: NodeId(d),
                t,
            })
            .collect();
        TemporalNetwork::from_edges(n, edges, TimeUnit::Ticks).unwrap()
    }

    #[test]
    fn generic_ingest_sorts_by_time() {
        let input = "a\tb\t3\nb\tc\t1\nc\ta\t2\n";
        let (net, report) = read_generic(input.as_bytes()).unwrap();
        assert_eq!(net.edge_count(), 3);
        assert_eq!(report.edges, 3);
        let ts: Vec<_> = net.edges().iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![1, 2, 3]);
        assert_eq!(net.time_unit(), TimeUnit::Ticks);
        // ids follow arrival order
        assert_eq!(net.label(NodeId(0)), "b");
        assert_eq!(net.label(NodeId(1)), "c");
        assert_eq!(net.arrival(NodeId(2)), 2);
    }

    #[test]
    fn generic_ingest_drops_self_loop() {
        let input = "# header\n1\t2\t1\n2\t2\t2\n2\t3\t3\n3\t1\t4\n";
        let (net, report) = read_generic(input.as_bytes()).unwrap();
        assert_eq!(net.edge_count(), 3);
        assert_eq!(report.self_loops, 1);
        assert_eq!(report.comment_lines, 1);
    }

    #[test]
    fn duplicates_keep_earliest() {
        let input = "1\t2\t5\n1\t2\t3\n2\t1\t4\n";
        let (net, report) = read_generic(input.as_bytes()).unwrap();
        assert_eq!(report.duplicates, 1);
        assert_eq!(net.edge_count(), 2);
        assert_eq!(net.edges()[0].t, 3);
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let input = "1\t2\t1\n1\t2\n";
        match read_generic(input.as_bytes()) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected malformed error, got {other:?}"),
        }
        let input = "1\t2\t1\n# c\n3\t4\tyesterday\n";
        match read_generic(input.as_bytes()) {
            Err(Error::Malformed { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected malformed error, got {other:?}"),
        }
    }

    #[test]
    fn iso_dates_become_epoch_days() {
        let input = "a\tb\t1970-01-02\nb\tc\t1992-03-01\n";
        let (net, _) = read_generic(input.as_bytes()).unwrap();
        assert_eq!(net.time_unit(), TimeUnit::Days);
        assert_eq!(net.edges()[0].t, 1);
        assert_eq!(
            days_to_date(net.edges()[1].t).unwrap(),
            NaiveDate::from_ymd_opt(1992, 3, 1).unwrap()
        );
    }

    #[test]
    fn normalized_output_reads_back() {
        let input = "x\ty\t1999-12-31\ny\tz\t2000-01-05\n";
        let (net, _) = read_generic(input.as_bytes()).unwrap();
        let mut buf = Vec::new();
        net.write_tsv(&mut buf).unwrap();
        let (again, _) = read_generic(buf.as_slice()).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn snap_adapter_stamps_with_citing_date() {
        let edges = "# FromNodeId\tToNodeId\n9201001\t9112001\n9201002\t9201001\n9999999\t9201001\n";
        let dates = "9112001\t1991-12-01\n09201001\t1992-01-10\n119201002\t1992-01-20\n";
        let opts = IngestOptions {
            strip_prefix: Some("11".into()),
            id_width: None,
        };
        let (net, report) = read_snap(edges.as_bytes(), dates.as_bytes(), &opts).unwrap();
        assert_eq!(report.missing_dates, 1);
        assert_eq!(net.edge_count(), 2);
        let jan10 = date_to_days(NaiveDate::from_ymd_opt(1992, 1, 10).unwrap());
        assert_eq!(net.edges()[0].t, jan10);
        assert_eq!(net.label(net.edges()[0].src), "9201001");
        // the cited node arrives with its first citation, not its own date
        assert_eq!(net.arrival(net.edges()[0].dst), jan10);
    }

    #[test]
    fn snap_without_prefix_option_misses_cross_listed() {
        let edges = "9201002\t9201001\n";
        let dates = "119201002\t1992-01-20\n";
        let (net, report) =
            read_snap(edges.as_bytes(), dates.as_bytes(), &IngestOptions::default()).unwrap();
        assert_eq!(net.edge_count(), 0);
        assert_eq!(report.missing_dates, 1);
    }

    #[test]
    fn snapshot_cutoff_is_strict() {
        let g = net(&[(0, 1, 5)]).snapshot_at(5, DegreeMode::Undirected);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.node_count(), 0);
    }

    #[test]
    fn snapshot_degrees_by_mode() {
        let n = net(&[(0, 1, 1), (1, 2, 2)]);
        let g = n.snapshot_at(3, DegreeMode::Undirected);
        let d: Vec<u32> = (0..3).map(|v| g.degree(NodeId(v))).collect();
        assert_eq!(d, vec![1, 2, 1]);

        let g = n.snapshot_at(3, DegreeMode::In);
        let d: Vec<u32> = (0..3).map(|v| g.degree(NodeId(v))).collect();
        assert_eq!(d, vec![0, 1, 1]);
        // undirected view is unaffected by the mode
        assert_eq!(g.undirected_degree(NodeId(1)), 2);

        let g = n.snapshot_at(3, DegreeMode::Out);
        let d: Vec<u32> = (0..3).map(|v| g.degree(NodeId(v))).collect();
        assert_eq!(d, vec![1, 1, 0]);
    }

    #[test]
    fn reciprocal_citations_are_one_undirected_edge() {
        let g = net(&[(0, 1, 1), (1, 0, 2)]).snapshot_at(10, DegreeMode::Undirected);
        assert_eq!(g.degree(NodeId(0)), 1);
        assert_eq!(g.degree(NodeId(1)), 1);
    }

    #[test]
    fn window_with_no_edges_is_empty() {
        let w = net(&[(0, 1, 1)]).window_attachments(10, 5);
        assert!(w.is_empty());
        assert_eq!(w.total_edges(), 0);
    }

    #[test]
    fn window_events_target_old_nodes() {
        let n = net(&[(0, 1, 1), (2, 0, 5), (2, 1, 5)]);
        let w = n.window_attachments(5, 1);
        let ev: Vec<_> = w.events.iter().map(|a| (a.new_node.0, a.target.0)).collect();
        assert_eq!(ev, vec![(2, 0), (2, 1)]);
    }

    #[test]
    fn window_tallies_new_new_and_old_old() {
        let n = net(&[(0, 1, 1), (2, 0, 5), (3, 2, 6), (1, 0, 7)]);
        let w = n.window_attachments(5, 3);
        assert_eq!(w.events.len(), 1);
        assert_eq!(w.new_new, 1);
        assert_eq!(w.old_old, 1);
        assert_eq!(w.total_edges(), n.edges_between(5, 8).len());
    }
}
