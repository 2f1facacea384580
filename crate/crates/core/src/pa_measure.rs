//! Empirical preferential-attachment estimators.
//!
//! For a snapshot at cutoff `t` and the attachments made during `[t, t + dt)`,
//! nodes are grouped into classes (degree `k`, coreness `c`, or the pair
//! `(c, k)`). Each class gets an attachment count `A` and a size `n`; the
//! per-node rate `A / n` is normalized over classes into `T`, and `T` is
//! accumulated in ascending class order into `kappa`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kcore::{CorenessMap, ShellStats, ShellSummary};
use crate::temporal_graph::{NodeId, Snapshot, Timestamp, WindowAttachments};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Degree,
    Coreness,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Degree => "degree",
            Axis::Coreness => "coreness",
        })
    }
}

/// Half-open observation window `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub start: Timestamp,
    pub end: Timestamp,
}

impl From<&WindowAttachments> for Window {
    fn from(w: &WindowAttachments) -> Self {
        Window {
            start: w.start,
            end: w.end,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassRow {
    pub value: u32,
    /// A(v): attachment events landing on class members.
    pub attachments: u64,
    /// n(v): class members in the snapshot.
    pub size: u64,
    /// T(v); `None` when the window has no events.
    pub rate: Option<f64>,
    /// kappa(v) = sum of T over classes <= v.
    pub cumulative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttachmentStats {
    pub axis: Axis,
    pub window: Window,
    /// Rows for every class with at least one member, ascending by value.
    pub rows: Vec<ClassRow>,
}

impl AttachmentStats {
    pub fn total_attachments(&self) -> u64 {
        self.rows.iter().map(|r| r.attachments).sum()
    }

    /// True when no attachment happened and `T` is undefined.
    pub fn is_empty(&self) -> bool {
        self.total_attachments() == 0
    }

    pub fn node_count(&self) -> u64 {
        self.rows.iter().map(|r| r.size).sum()
    }

    pub fn row(&self, value: u32) -> Option<&ClassRow> {
        self.rows
            .binary_search_by_key(&value, |r| r.value)
            .ok()
            .map(|i| &self.rows[i])
    }

    pub fn rate(&self, value: u32) -> Option<f64> {
        self.row(value).and_then(|r| r.rate)
    }

    pub fn cumulative(&self, value: u32) -> Option<f64> {
        self.row(value).and_then(|r| r.cumulative)
    }

    /// Builds the table from per-class `(value, A, n)` counts.
    pub fn from_counts(axis: Axis, window: Window, counts: BTreeMap<u32, (u64, u64)>) -> Self {
        let total_rate: f64 = counts
            .values()
            .map(|&(a, n)| a as f64 / n as f64)
            .sum();
        let defined = counts.values().any(|&(a, _)| a > 0);
        let mut running = 0.0;
        let rows = counts
            .into_iter()
            .map(|(value, (attachments, size))| {
                let (rate, cumulative) = if defined {
                    let t = (attachments as f64 / size as f64) / total_rate;
                    running += t;
                    (Some(t), Some(running))
                } else {
                    (None, None)
                };
                ClassRow {
                    value,
                    attachments,
                    size,
                    rate,
                    cumulative,
                }
            })
            .collect();
        AttachmentStats { axis, window, rows }
    }
}

fn class_counts<F>(g: &Snapshot, w: &WindowAttachments, class_of: F) -> BTreeMap<u32, (u64, u64)>
where
    F: Fn(NodeId) -> u32,
{
    let mut counts: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
    for v in g.nodes() {
        counts.entry(class_of(v)).or_default().1 += 1;
    }
    for ev in &w.events {
        debug_assert!(g.contains(ev.target), "attachment target outside snapshot");
        if g.contains(ev.target) {
            counts.entry(class_of(ev.target)).or_default().0 += 1;
        }
    }
    counts
}

/// Degree-based attachment rate T(k) and its cumulative form.
pub fn measure_degree_pa(g: &Snapshot, w: &WindowAttachments) -> AttachmentStats {
    let counts = class_counts(g, w, |v| g.degree(v));
    AttachmentStats::from_counts(Axis::Degree, w.into(), counts)
}

/// Coreness-based attachment rate T(c) and its cumulative form.
pub fn measure_coreness_pa(g: &Snapshot, cm: &CorenessMap, w: &WindowAttachments) -> AttachmentStats {
    let counts = class_counts(g, w, |v| cm.coreness(v));
    AttachmentStats::from_counts(Axis::Coreness, w.into(), counts)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridCell {
    pub attachments: u64,
    /// n_{c,k}
    pub size: u64,
    /// Unnormalized relative probability `A * N / n_{c,k}`.
    pub raw: f64,
    /// Normalized T(c, k); `None` when the window has no events.
    pub rate: Option<f64>,
}

/// Joint attachment table over (coreness, degree) classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridStats {
    pub window: Window,
    /// N(t): nodes in the snapshot.
    pub node_count: u64,
    pub cells: BTreeMap<(u32, u32), HybridCell>,
}

impl HybridStats {
    /// Builds the table from `(c, k) -> (A, n)` counts.
    pub fn from_counts(window: Window, node_count: u64, counts: BTreeMap<(u32, u32), (u64, u64)>) -> Self {
        let mut cells: BTreeMap<(u32, u32), HybridCell> = counts
            .into_iter()
            .map(|(key, (attachments, size))| {
                let raw = if size == 0 {
                    0.0
                } else {
                    attachments as f64 * node_count as f64 / size as f64
                };
                (
                    key,
                    HybridCell {
                        attachments,
                        size,
                        raw,
                        rate: None,
                    },
                )
            })
            .collect();
        let total: f64 = cells.values().map(|c| c.raw).sum();
        if total > 0.0 {
            for cell in cells.values_mut() {
                cell.rate = Some(cell.raw / total);
            }
        }
        HybridStats {
            window,
            node_count,
            cells,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cells.values().all(|c| c.attachments == 0)
    }

    pub fn rate(&self, c: u32, k: u32) -> Option<f64> {
        self.cells.get(&(c, k)).and_then(|cell| cell.rate)
    }

    /// Distinct coreness values with at least one member.
    pub fn shells(&self) -> Vec<u32> {
        let mut cs: Vec<u32> = self.cells.keys().map(|&(c, _)| c).collect();
        cs.dedup();
        cs
    }

    /// Distinct degree values with at least one member.
    pub fn degrees(&self) -> Vec<u32> {
        let mut ks: Vec<u32> = self.cells.keys().map(|&(_, k)| k).collect();
        ks.sort_unstable();
        ks.dedup();
        ks
    }

    /// ⟨k_c⟩ and friends recovered from the class sizes.
    pub fn shell_stats(&self) -> ShellStats {
        let mut shells: BTreeMap<u32, ShellSummary> = BTreeMap::new();
        let mut sums: BTreeMap<u32, u64> = BTreeMap::new();
        for (&(c, k), cell) in &self.cells {
            if cell.size == 0 {
                continue;
            }
            let s = shells.entry(c).or_insert(ShellSummary {
                size: 0,
                mean_degree: 0.0,
                min_degree: u32::MAX,
                max_degree: 0,
            });
            s.size += cell.size;
            s.min_degree = s.min_degree.min(k);
            s.max_degree = s.max_degree.max(k);
            *sums.entry(c).or_default() += k as u64 * cell.size;
        }
        for (c, s) in shells.iter_mut() {
            s.mean_degree = sums[c] as f64 / s.size as f64;
        }
        ShellStats { shells }
    }
}

/// Joint table T(c, k) with `c` and `k` read at the window cutoff.
pub fn measure_hybrid(g: &Snapshot, cm: &CorenessMap, w: &WindowAttachments) -> HybridStats {
    let counts = class_counts_2d(g, w, |v| (cm.coreness(v), g.degree(v)));
    HybridStats::from_counts(w.into(), g.node_count() as u64, counts)
}

fn class_counts_2d<F>(g: &Snapshot, w: &WindowAttachments, class_of: F) -> BTreeMap<(u32, u32), (u64, u64)>
where
    F: Fn(NodeId) -> (u32, u32),
{
    let mut counts: BTreeMap<(u32, u32), (u64, u64)> = BTreeMap::new();
    for v in g.nodes() {
        counts.entry(class_of(v)).or_default().1 += 1;
    }
    for ev in &w.events {
        debug_assert!(g.contains(ev.target), "attachment target outside snapshot");
        if g.contains(ev.target) {
            counts.entry(class_of(ev.target)).or_default().0 += 1;
        }
    }
    counts
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FixedAxis {
    /// Φ(c₀, k): one shell, free degree.
    Coreness(u32),
    /// Π(c, k₀): one degree class, free coreness.
    Degree(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Value of the free variable.
    pub value: u32,
    /// n_{c,k} of the cell.
    pub size: u64,
    /// Running sum of T over free values <= `value`.
    pub cumulative: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedCurve {
    pub fixed: FixedAxis,
    pub points: Vec<CurvePoint>,
}

fn accumulate(fixed: FixedAxis, cells: impl Iterator<Item = (u32, HybridCell)>) -> LocalizedCurve {
    let mut running = 0.0;
    let points = cells
        .map(|(value, cell)| CurvePoint {
            value,
            size: cell.size,
            cumulative: cell.rate.map(|t| {
                running += t;
                running
            }),
        })
        .collect();
    LocalizedCurve { fixed, points }
}

/// Φ(c₀, k): cumulative T(c₀, ·) over ascending degree within shell `c0`.
pub fn phi_within_shell(h: &HybridStats, c0: u32) -> Result<LocalizedCurve> {
    let cells: Vec<(u32, HybridCell)> = h
        .cells
        .range((c0, 0)..=(c0, u32::MAX))
        .filter(|(_, cell)| cell.size > 0)
        .map(|(&(_, k), &cell)| (k, cell))
        .collect();
    if cells.is_empty() {
        return Err(Error::EmptyShell(c0));
    }
    Ok(accumulate(FixedAxis::Coreness(c0), cells.into_iter()))
}

/// Π(c, k₀): cumulative T(·, k₀) over ascending coreness among nodes of degree `k0`.
pub fn pi_among_shells(h: &HybridStats, k0: u32) -> Result<LocalizedCurve> {
    let cells: Vec<(u32, HybridCell)> = h
        .cells
        .iter()
        .filter(|(&(_, k), cell)| k == k0 && cell.size > 0)
        .map(|(&(c, _), &cell)| (c, cell))
        .collect();
    if cells.is_empty() {
        return Err(Error::EmptyDegreeClass(k0));
    }
    Ok(accumulate(FixedAxis::Degree(k0), cells.into_iter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kcore::core_decomposition;
    use crate::temporal_graph::{DegreeMode, TemporalNetwork, TimeUnit, TimedEdge};

    fn network(edges: &[(u32, u32, Timestamp)]) -> TemporalNetwork {
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
    fn degree_toy_fixture() {
        // Path 0-1-2 before t=10: degrees {1, 2, 1}. New node 3 hits 0 and 1.
        let net = network(&[(0, 1, 1), (1, 2, 1), (3, 0, 10), (3, 1, 10)]);
        let g = net.snapshot_at(10, DegreeMode::Undirected);
        let w = net.window_attachments(10, 1);
        let s = measure_degree_pa(&g, &w);
        assert!((s.rate(1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.rate(2).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((s.cumulative(1).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((s.cumulative(2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(s.node_count(), 3);
    }

    #[test]
    fn single_degree_class_gets_everything() {
        let net = network(&[(0, 1, 1), (2, 3, 1), (4, 0, 5), (4, 2, 5)]);
        let g = net.snapshot_at(5, DegreeMode::Undirected);
        let s = measure_degree_pa(&g, &net.window_attachments(5, 1));
        assert_eq!(s.rows.len(), 1);
        assert_eq!(s.rate(1), Some(1.0));
        assert_eq!(s.cumulative(1), Some(1.0));
    }

    #[test]
    fn empty_window_is_flagged_not_nan() {
        let net = network(&[(0, 1, 1), (1, 2, 1)]);
        let g = net.snapshot_at(10, DegreeMode::Undirected);
        let s = measure_degree_pa(&g, &net.window_attachments(10, 5));
        assert!(s.is_empty());
        assert!(s.rows.iter().all(|r| r.rate.is_none() && r.cumulative.is_none()));
        assert_eq!(s.node_count(), 3);
    }

    #[test]
    fn coreness_toy_fixture() {
        // triangle {0,1,2} + pendant 3-0; new node 4 hits node 1 (coreness 2)
        let net = network(&[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 0, 1), (4, 1, 3)]);
        let g = net.snapshot_at(3, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let s = measure_coreness_pa(&g, &cm, &net.window_attachments(3, 1));
        assert_eq!(s.rate(2), Some(1.0));
        assert_eq!(s.rate(1), Some(0.0));
        assert_eq!(s.cumulative(1), Some(0.0));
        assert_eq!(s.cumulative(2), Some(1.0));
    }

    #[test]
    fn equal_shells_equal_rates() {
        // two disjoint triangles (coreness 2) and two pendant pairs (coreness 1);
        // one hit into each shell, shells of equal size.
        let net = network(&[
            (0, 1, 1),
            (1, 2, 1),
            (2, 0, 1),
            (3, 4, 1),
            (5, 6, 1),
            (7, 8, 1),
            (9, 0, 2),
            (9, 3, 2),
        ]);
        let g = net.snapshot_at(2, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let s = measure_coreness_pa(&g, &cm, &net.window_attachments(2, 1));
        // shell 2 has 3 nodes, shell 1 has 6; use sizes to check per-node rates
        let r1 = 1.0 / 6.0;
        let r2 = 1.0 / 3.0;
        assert!((s.rate(1).unwrap() - r1 / (r1 + r2)).abs() < 1e-12);
        assert!((s.rate(2).unwrap() - r2 / (r1 + r2)).abs() < 1e-12);
    }

    #[test]
    fn hybrid_toy_fixture() {
        let window = Window { start: 0, end: 1 };
        let mut counts = BTreeMap::new();
        counts.insert((1, 1), (0, 2));
        counts.insert((1, 2), (1, 2));
        let h = HybridStats::from_counts(window, 4, counts);
        assert!((h.cells[&(1, 2)].raw - 2.0).abs() < 1e-12);
        assert_eq!(h.rate(1, 2), Some(1.0));
        assert_eq!(h.rate(1, 1), Some(0.0));
    }

    #[test]
    fn hybrid_from_graph() {
        // path 0-1-2-3: all coreness 1, degrees 1,2,2,1. New node hits 1.
        let net = network(&[(0, 1, 1), (1, 2, 1), (2, 3, 1), (4, 1, 5)]);
        let g = net.snapshot_at(5, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let h = measure_hybrid(&g, &cm, &net.window_attachments(5, 1));
        assert_eq!(h.node_count, 4);
        assert_eq!(h.cells[&(1, 2)].raw, 2.0);
        assert_eq!(h.cells[&(1, 1)].raw, 0.0);
        assert_eq!(h.rate(1, 2), Some(1.0));
    }

    fn hybrid_with(rates: &[((u32, u32), f64)]) -> HybridStats {
        // build a table whose normalized rates equal `rates`, one member per cell
        let window = Window { start: 0, end: 1 };
        let counts = rates
            .iter()
            .map(|&(key, t)| (key, ((t * 100.0).round() as u64, 1)))
            .collect();
        HybridStats::from_counts(window, rates.len() as u64, counts)
    }

    #[test]
    fn phi_sums_within_shell() {
        let h = hybrid_with(&[((4, 1), 0.25), ((4, 3), 0.75)]);
        let phi = phi_within_shell(&h, 4).unwrap();
        assert_eq!(phi.fixed, FixedAxis::Coreness(4));
        let pts: Vec<_> = phi.points.iter().map(|p| (p.value, p.cumulative.unwrap())).collect();
        assert_eq!(pts, vec![(1, 0.25), (3, 1.0)]);
    }

    #[test]
    fn phi_single_degree_is_step() {
        let h = hybrid_with(&[((2, 5), 1.0)]);
        let phi = phi_within_shell(&h, 2).unwrap();
        assert_eq!(phi.points.len(), 1);
        assert_eq!(phi.points[0].cumulative, Some(1.0));
    }

    #[test]
    fn pi_sums_among_shells() {
        let h = hybrid_with(&[((1, 7), 0.4), ((2, 7), 0.6)]);
        let pi = pi_among_shells(&h, 7).unwrap();
        let pts: Vec<_> = pi.points.iter().map(|p| (p.value, p.cumulative.unwrap())).collect();
        assert_eq!(pts[0], (1, 0.4));
        assert!((pts[1].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pi_single_shell_is_step() {
        let h = hybrid_with(&[((3, 4), 1.0)]);
        let pi = pi_among_shells(&h, 4).unwrap();
        assert_eq!(pi.points.len(), 1);
    }

    #[test]
    fn empty_classes_error_with_value() {
        let h = hybrid_with(&[((1, 1), 1.0)]);
        match phi_within_shell(&h, 9) {
            Err(Error::EmptyShell(9)) => {}
            other => panic!("{other:?}"),
        }
        match pi_among_shells(&h, 8) {
            Err(Error::EmptyDegreeClass(8)) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shell_stats_from_hybrid_matches_kcore() {
        let net = network(&[(0, 1, 1), (1, 2, 1), (2, 0, 1), (3, 0, 1), (4, 1, 3)]);
        let g = net.snapshot_at(3, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let h = measure_hybrid(&g, &cm, &net.window_attachments(3, 1));
        assert_eq!(h.shell_stats(), crate::kcore::shell_stats(&g, &cm));
    }
}
