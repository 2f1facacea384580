//! k-core decomposition and per-shell statistics.
//!
//! Coreness is computed with the bucketed min-degree peeling of Batagelj and
//! Zaversnik, O(n + m) on the undirected view of a snapshot.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::temporal_graph::{NodeId, Snapshot};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorenessMap {
    coreness: Vec<u32>,
    max_core: u32,
    shells: BTreeMap<u32, Vec<NodeId>>,
}

impl CorenessMap {
    /// Coreness of `v`; nodes outside the snapshot report 0 and belong to no shell.
    #[inline]
    pub fn coreness(&self, v: NodeId) -> u32 {
        self.coreness[v.index()]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.coreness
    }

    pub fn max_core(&self) -> u32 {
        self.max_core
    }

    pub fn shells(&self) -> &BTreeMap<u32, Vec<NodeId>> {
        &self.shells
    }

    pub fn shell(&self, c: u32) -> &[NodeId] {
        self.shells.get(&c).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Coreness of every present node of `g` (undirected view).
pub fn core_decomposition(g: &Snapshot) -> CorenessMap {
    let n = g.id_bound();
    let coreness = peel(n, |v| g.undirected_neighbors(NodeId(v as u32)));
    let mut shells: BTreeMap<u32, Vec<NodeId>> = BTreeMap::new();
    let mut max_core = 0;
    for v in g.nodes() {
        let c = coreness[v.index()];
        max_core = max_core.max(c);
        shells.entry(c).or_default().push(v);
    }
    CorenessMap {
        coreness,
        max_core,
        shells,
    }
}

/// Core numbers of a simple undirected graph given as adjacency lists.
pub fn core_numbers(adjacency: &[Vec<u32>]) -> Vec<u32> {
    peel(adjacency.len(), |v| adjacency[v].as_slice())
}

fn peel<'a, F>(n: usize, neighbors: F) -> Vec<u32>
where
    F: Fn(usize) -> &'a [u32],
{
    if n == 0 {
        return Vec::new();
    }
    let mut deg: Vec<u32> = (0..n).map(|v| neighbors(v).len() as u32).collect();
    let max_deg = *deg.iter().max().unwrap() as usize;

    // bin[d] = first position of degree-d vertices in `vert`
    let mut bin = vec![0usize; max_deg + 1];
    for &d in &deg {
        bin[d as usize] += 1;
    }
    let mut start = 0;
    for b in bin.iter_mut() {
        let count = *b;
        *b = start;
        start += count;
    }
    let mut pos = vec![0usize; n];
    let mut vert = vec![0u32; n];
    for v in 0..n {
        let d = deg[v] as usize;
        pos[v] = bin[d];
        vert[pos[v]] = v as u32;
        bin[d] += 1;
    }
    for d in (1..=max_deg).rev() {
        bin[d] = bin[d - 1];
    }
    bin[0] = 0;

    for i in 0..n {
        let v = vert[i] as usize;
        let dv = deg[v];
        for &u in neighbors(v) {
            let u = u as usize;
            if deg[u] > dv {
                let du = deg[u] as usize;
                let pu = pos[u];
                let pw = bin[du];
                let w = vert[pw] as usize;
                if u != w {
                    pos[u] = pw;
                    pos[w] = pu;
                    vert[pu] = w as u32;
                    vert[pw] = u as u32;
                }
                bin[du] += 1;
                deg[u] -= 1;
            }
        }
    }
    deg
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellSummary {
    pub size: u64,
    pub mean_degree: f64,
    pub min_degree: u32,
    pub max_degree: u32,
}

/// Size and degree profile of every non-empty shell.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ShellStats {
    pub shells: BTreeMap<u32, ShellSummary>,
}

impl ShellStats {
    pub fn node_count(&self) -> u64 {
        self.shells.values().map(|s| s.size).sum()
    }
}

/// Per-shell size and mean degree ⟨k_c⟩, using the snapshot's degree mode.
pub fn shell_stats(g: &Snapshot, cm: &CorenessMap) -> ShellStats {
    let shells = cm
        .shells()
        .iter()
        .filter(|(_, members)| !members.is_empty())
        .map(|(&c, members)| {
            let degrees = members.iter().map(|&v| g.degree(v));
            let (mut sum, mut lo, mut hi) = (0u64, u32::MAX, 0u32);
            for d in degrees {
                sum += d as u64;
                lo = lo.min(d);
                hi = hi.max(d);
            }
            let size = members.len() as u64;
            (
                c,
                ShellSummary {
                    size,
                    mean_degree: sum as f64 / size as f64,
                    min_degree: lo,
                    max_degree: hi,
                },
            )
        })
        .collect();
    ShellStats { shells }
}

/// Writes `node,coreness,degree` for every present node.
pub fn write_coreness_csv<W, L>(out: W, g: &Snapshot, cm: &CorenessMap, label: L) -> Result<()>
where
    W: Write,
    L: Fn(NodeId) -> String,
{
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["node", "coreness", "degree"])?;
    for v in g.nodes() {
        w.write_record([
            label(v),
            cm.coreness(v).to_string(),
            g.degree(v).to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
