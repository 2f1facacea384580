//! Growth simulator with planted attachment kernels.
//!
//! One node joins per tick and links to distinct existing nodes drawn with
//! probability proportional to `e^{βc} (k + offset)^α`, where `c` and `k` are
//! the coreness and degree of the candidate before the tick.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kcore::core_numbers;
use crate::temporal_graph::{NodeId, TemporalNetwork, TimeUnit, TimedEdge};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelMode {
    DegreeOnly,
    CorenessOnly,
    Hybrid,
}

impl fmt::Display for KernelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KernelMode::DegreeOnly => "degree_only",
            KernelMode::CorenessOnly => "coreness_only",
            KernelMode::Hybrid => "hybrid",
        })
    }
}

impl FromStr for KernelMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "degree_only" | "degree" => Ok(KernelMode::DegreeOnly),
            "coreness_only" | "coreness" => Ok(KernelMode::CorenessOnly),
            "hybrid" => Ok(KernelMode::Hybrid),
            other => Err(Error::Config(format!("unknown kernel mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub mode: KernelMode,
    pub alpha: f64,
    pub beta: f64,
    /// Added to the degree before exponentiation so degree 0 has weight.
    pub degree_offset: f64,
}

impl KernelSpec {
    pub fn degree_only(alpha: f64) -> Self {
        KernelSpec {
            mode: KernelMode::DegreeOnly,
            alpha,
            beta: 0.0,
            degree_offset: 1.0,
        }
    }

    pub fn coreness_only(beta: f64) -> Self {
        KernelSpec {
            mode: KernelMode::CorenessOnly,
            alpha: 0.0,
            beta,
            degree_offset: 1.0,
        }
    }

    pub fn hybrid(alpha: f64, beta: f64) -> Self {
        KernelSpec {
            mode: KernelMode::Hybrid,
            alpha,
            beta,
            degree_offset: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::Config(format!("beta must be >= 0, got {}", self.beta)));
        }
        if !(self.degree_offset > 0.0 && self.degree_offset.is_finite()) {
            return Err(Error::Config(format!(
                "degree_offset must be > 0, got {}",
                self.degree_offset
            )));
        }
        Ok(())
    }

    fn uses_coreness(&self) -> bool {
        !matches!(self.mode, KernelMode::DegreeOnly)
    }

    /// Attachment weight of a node with coreness `c` and degree `k`.
    #[inline]
    pub fn weight(&self, c: u32, k: u32) -> f64 {
        let degree_part = || (k as f64 + self.degree_offset).powf(self.alpha);
        let core_part = || (self.beta * c as f64).exp();
        match self.mode {
            KernelMode::DegreeOnly => degree_part(),
            KernelMode::CorenessOnly => core_part(),
            KernelMode::Hybrid => core_part() * degree_part(),
        }
    }
}

pub fn kernel_weight(kernel: &KernelSpec, c: u32, k: u32) -> f64 {
    kernel.weight(c, k)
}

/// Number of links a newcomer makes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OutDegree {
    /// Exactly `m` links.
    Fixed,
    /// `m + X` links with `X` geometric on `{0, 1, ..}` of mean `extra_mean`.
    ShiftedGeometric { extra_mean: f64 },
}

impl OutDegree {
    fn draw<R: Rng>(&self, m: usize, rng: &mut R) -> usize {
        match *self {
            OutDegree::Fixed => m,
            OutDegree::ShiftedGeometric { extra_mean } => {
                if extra_mean <= 0.0 {
                    return m;
                }
                // P(X = j) = p (1 - p)^j with mean (1 - p) / p
                let p = 1.0 / (1.0 + extra_mean);
                let u: f64 = 1.0 - rng.gen::<f64>();
                m + (u.ln() / (1.0 - p).ln()).floor() as usize
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "edges", rename_all = "snake_case")]
pub enum SeedGraph {
    /// Complete graph on `m + 1` nodes.
    Clique,
    /// Explicit undirected edges over nodes `0..=max id`.
    Edges(Vec<(u32, u32)>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "n", rename_all = "snake_case")]
pub enum CorenessRefresh {
    EveryStep,
    /// Recompute every `n` ticks; weights use stale coreness in between.
    EveryNSteps(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Total node count including the seed graph.
    pub n_final: usize,
    /// Links per newcomer (the minimum when the out-degree is random).
    pub m: usize,
    pub out_degree: OutDegree,
    pub seed_graph: SeedGraph,
    pub rng_seed: u64,
    pub coreness_refresh: CorenessRefresh,
}

impl SimConfig {
    pub fn new(n_final: usize, m: usize, rng_seed: u64) -> Self {
        SimConfig {
            n_final,
            m,
            out_degree: OutDegree::Fixed,
            seed_graph: SeedGraph::Clique,
            rng_seed,
            coreness_refresh: CorenessRefresh::EveryStep,
        }
    }

    fn seed_edges(&self) -> (usize, Vec<(u32, u32)>) {
        match &self.seed_graph {
            SeedGraph::Clique => {
                let s = self.m as u32 + 1;
                let edges = (0..s).flat_map(|i| (i + 1..s).map(move |j| (i, j))).collect();
                (s as usize, edges)
            }
            SeedGraph::Edges(edges) => {
                let n = edges.iter().map(|&(a, b)| a.max(b) as usize + 1).max().unwrap_or(0);
                (n, edges.clone())
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::Config("m must be at least 1".into()));
        }
        let (seed_n, seed_edges) = self.seed_edges();
        if seed_n < self.m {
            return Err(Error::Config(format!(
                "seed graph has {seed_n} nodes, fewer than m = {}",
                self.m
            )));
        }
        if seed_edges.iter().any(|&(a, b)| a == b) {
            return Err(Error::Config("seed graph contains a self-loop".into()));
        }
        if self.n_final <= seed_n {
            return Err(Error::Config(format!(
                "n_final = {} must exceed the seed size {seed_n}",
                self.n_final
            )));
        }
        if let CorenessRefresh::EveryNSteps(0) = self.coreness_refresh {
            return Err(Error::Config("coreness refresh interval must be >= 1".into()));
        }
        if let OutDegree::ShiftedGeometric { extra_mean } = self.out_degree {
            if !(extra_mean >= 0.0 && extra_mean.is_finite()) {
                return Err(Error::Config(format!(
                    "out-degree extra_mean must be >= 0, got {extra_mean}"
                )));
            }
        }
        Ok(())
    }
}

/// Fenwick tree over node weights for O(log n) proportional sampling.
struct WeightIndex {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightIndex {
    fn new(n: usize) -> Self {
        WeightIndex {
            tree: vec![0.0; n + 1],
            weights: vec![0.0; n],
        }
    }

    fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut j = i + 1;
        while j < self.tree.len() {
            self.tree[j] += delta;
            j += j & j.wrapping_neg();
        }
    }

    /// Rebuilds the partial sums from the exact weights, clearing drift.
    fn rebuild(&mut self) {
        let n = self.weights.len();
        self.tree.iter_mut().for_each(|t| *t = 0.0);
        for i in 0..n {
            let j = i + 1;
            self.tree[j] += self.weights[i];
            let parent = j + (j & j.wrapping_neg());
            if parent <= n {
                let v = self.tree[j];
                self.tree[parent] += v;
            }
        }
    }

    fn total(&self) -> f64 {
        let mut s = 0.0;
        let mut j = self.weights.len();
        while j > 0 {
            s += self.tree[j];
            j &= j - 1;
        }
        s
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let n = self.weights.len();
        let mut target = rng.gen::<f64>() * self.total();
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        if pos < n && self.weights[pos] > 0.0 {
            return pos;
        }
        // rounding pushed us past the last positive weight
        (0..n).rev().find(|&i| self.weights[i] > 0.0).expect("no positive weight")
    }
}

/// Keeps core numbers exact as edges are inserted one at a time.
///
/// Inserting `(u, v)` can only raise nodes of core `K = min(core u, core v)`
/// that are reachable from the lower endpoint through core-`K` nodes, and each
/// by exactly one. Candidates are collected by that traversal and then peeled
/// at threshold `K`; whatever survives moves up a shell.
struct CoreMaintainer {
    stamp: Vec<u32>,
    epoch: u32,
    support: Vec<u32>,
    removed: Vec<bool>,
    members: Vec<usize>,
    queue: Vec<usize>,
}

impl CoreMaintainer {
    fn new() -> Self {
        CoreMaintainer {
            stamp: Vec::new(),
            epoch: 0,
            support: Vec::new(),
            removed: Vec::new(),
            members: Vec::new(),
            queue: Vec::new(),
        }
    }

    fn grow(&mut self, n: usize) {
        if self.stamp.len() < n {
            self.stamp.resize(n, 0);
            self.support.resize(n, 0);
            self.removed.resize(n, false);
        }
    }

    fn in_set(&self, w: usize) -> bool {
        self.stamp[w] == self.epoch
    }

    /// Call after `(u, v)` has been added to `adj`. Pushes every node whose
    /// core number changed onto `changed`.
    fn insert(&mut self, adj: &[Vec<u32>], core: &mut [u32], u: usize, v: usize, changed: &mut Vec<usize>) {
        self.grow(adj.len());
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch < 2 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 2;
        }
        let k = core[u].min(core[v]);
        self.members.clear();
        self.queue.clear();
        for r in [u, v] {
            if core[r] == k && !self.in_set(r) {
                self.stamp[r] = self.epoch;
                self.queue.push(r);
            }
        }
        // Traverse core-k nodes that have more than k neighbours at core >= k.
        while let Some(w) = self.queue.pop() {
            let mcd = adj[w].iter().filter(|&&x| core[x as usize] >= k).count() as u32;
            if mcd <= k {
                // Visited but never promotable; keep it out of the candidate set.
                self.stamp[w] = self.epoch.wrapping_sub(1);
                continue;
            }
            self.members.push(w);
            for &x in &adj[w] {
                let x = x as usize;
                if core[x] == k && self.stamp[x] != self.epoch && self.stamp[x] != self.epoch.wrapping_sub(1) {
                    self.stamp[x] = self.epoch;
                    self.queue.push(x);
                }
            }
        }
        for i in 0..self.members.len() {
            let w = self.members[i];
            self.removed[w] = false;
            self.support[w] = adj[w]
                .iter()
                .filter(|&&x| {
                    let x = x as usize;
                    core[x] > k || (core[x] == k && self.in_set(x))
                })
                .count() as u32;
            if self.support[w] <= k {
                self.queue.push(w);
                self.removed[w] = true;
            }
        }
        while let Some(w) = self.queue.pop() {
            for &x in &adj[w] {
                let x = x as usize;
                if core[x] == k && self.in_set(x) && !self.removed[x] {
                    self.support[x] -= 1;
                    if self.support[x] <= k {
                        self.removed[x] = true;
                        self.queue.push(x);
                    }
                }
            }
        }
        for &w in &self.members {
            if !self.removed[w] {
                core[w] = k + 1;
                changed.push(w);
            }
        }
        // Skip the value used for rejected nodes.
        self.epoch = self.epoch.wrapping_add(1);
    }
}

/// Runs the simulation, returning the grown network. Seed edges carry
/// timestamp 0 and the newcomer of tick `j` links at time `j`.
pub fn simulate(cfg: &SimConfig, kernel: &KernelSpec) -> Result<TemporalNetwork> {
    simulate_with_observer(cfg, kernel, |_, _, _| {})
}

/// Like [`simulate`], calling `observer(tick, coreness, degree)` with the state
/// used to weight candidates before every tick. `coreness` is empty when the
/// kernel ignores it.
pub fn simulate_with_observer<F>(cfg: &SimConfig, kernel: &KernelSpec, mut observer: F) -> Result<TemporalNetwork>
where
    F: FnMut(i64, &[u32], &[u32]),
{
    cfg.validate()?;
    kernel.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let (seed_n, seed_edges) = cfg.seed_edges();
    let n = cfg.n_final;

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); seed_n];
    let mut edges: Vec<TimedEdge> = Vec::with_capacity(seed_edges.len() + n * cfg.m);
    for &(a, b) in &seed_edges {
        if adj[a as usize].contains(&b) {
            continue;
        }
        adj[a as usize].push(b);
        adj[b as usize].push(a);
        edges.push(TimedEdge {
            src: NodeId(a),
            dst: NodeId(b),
            t: 0,
        });
    }

    let with_core = kernel.uses_coreness();
    let mut degree: Vec<u32> = adj.iter().map(|a| a.len() as u32).collect();
    let mut coreness: Vec<u32> = if with_core { core_numbers(&adj) } else { Vec::new() };
    let mut index = WeightIndex::new(n);
    for (v, &k) in degree.iter().enumerate() {
        let c = coreness.get(v).copied().unwrap_or(0);
        index.set(v, kernel.weight(c, k));
    }

    let refresh_every = match cfg.coreness_refresh {
        CorenessRefresh::EveryStep => 1,
        CorenessRefresh::EveryNSteps(k) => k,
    };
    let incremental = with_core && refresh_every == 1;
    let mut maintainer = CoreMaintainer::new();
    let mut changed: Vec<usize> = Vec::new();
    let mut targets: Vec<usize> = Vec::new();
    for (tick, new) in (seed_n..n).enumerate() {
        let tick = tick as i64 + 1;
        observer(tick, &coreness, &degree);

        let want = cfg.out_degree.draw(cfg.m, &mut rng).min(new);
        targets.clear();
        for _ in 0..want {
            let v = index.sample(&mut rng);
            index.set(v, 0.0);
            targets.push(v);
        }

        adj.push(Vec::with_capacity(want));
        degree.push(0);
        if with_core {
            coreness.push(0);
        }
        changed.clear();
        for &v in &targets {
            adj[v].push(new as u32);
            adj[new].push(v as u32);
            degree[v] += 1;
            degree[new] += 1;
            edges.push(TimedEdge {
                src: NodeId(new as u32),
                dst: NodeId(v as u32),
                t: tick,
            });
            if incremental {
                maintainer.insert(&adj, &mut coreness, new, v, &mut changed);
            }
        }

        if incremental {
            for &v in &changed {
                index.set(v, kernel.weight(coreness[v], degree[v]));
            }
        } else if with_core && (tick as usize).is_multiple_of(refresh_every) {
            let fresh = core_numbers(&adj);
            for (v, (&old, &c)) in coreness.iter().zip(&fresh).enumerate() {
                if old != c && v != new && !targets.contains(&v) {
                    index.set(v, kernel.weight(c, degree[v]));
                }
            }
            coreness = fresh;
        }
        for &v in targets.iter().chain(std::iter::once(&new)) {
            let c = coreness.get(v).copied().unwrap_or(0);
            index.set(v, kernel.weight(c, degree[v]));
        }
        if tick % 4096 == 0 {
            index.rebuild();
        }
    }

    TemporalNetwork::from_edges(n, edges, TimeUnit::Ticks)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_examples() {
        let k = KernelSpec::hybrid(0.7, 0.2);
        assert_eq!(k.weight(0, 0), 1.0);
        assert!((k.weight(1, 0) / k.weight(0, 0) - 0.2f64.exp()).abs() < 1e-12);
        for c in 0..=20 {
            for d in 0..=20 {
                let w = k.weight(c, d);
                assert!(w > 0.0);
                assert!(k.weight(c + 1, d) >= w);
                assert!(k.weight(c, d + 1) >= w);
            }
        }
    }

    #[test]
    fn kernel_modes() {
        assert_eq!(KernelSpec::degree_only(1.0).weight(9, 3), 4.0);
        assert!((KernelSpec::coreness_only(0.5).weight(2, 100) - 1f64.exp()).abs() < 1e-12);
    }

    #[test]
    fn validation() {
        assert!(SimConfig::new(10, 0, 1).validate().is_err());
        assert!(SimConfig::new(4, 3, 1).validate().is_err());
        let mut cfg = SimConfig::new(10, 3, 1);
        cfg.seed_graph = SeedGraph::Edges(vec![(0, 1)]);
        assert!(cfg.validate().is_err());
        assert!(SimConfig::new(10, 3, 1).validate().is_ok());
        assert!(KernelSpec::hybrid(-1.0, 0.2).validate().is_err());
        let mut k = KernelSpec::hybrid(1.0, 0.2);
        k.degree_offset = 0.0;
        assert!(k.validate().is_err());
    }

    #[test]
    fn weight_index_samples_proportionally() {
        let mut idx = WeightIndex::new(5);
        for (i, w) in [1.0, 0.0, 3.0, 0.0, 4.0].into_iter().enumerate() {
            idx.set(i, w);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut counts = [0usize; 5];
        for _ in 0..80_000 {
            counts[idx.sample(&mut rng)] += 1;
        }
        assert_eq!(counts[1], 0);
        assert_eq!(counts[3], 0);
        let frac = |i: usize| counts[i] as f64 / 80_000.0;
        assert!((frac(0) - 0.125).abs() < 0.01);
        assert!((frac(2) - 0.375).abs() < 0.01);
        assert!((frac(4) - 0.5).abs() < 0.01);
        idx.rebuild();
        assert!((idx.total() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn small_run_is_simple_and_ordered() {
        let mut cfg = SimConfig::new(300, 3, 11);
        cfg.out_degree = OutDegree::ShiftedGeometric { extra_mean: 2.0 };
        let net = simulate(&cfg, &KernelSpec::hybrid(0.7, 0.2)).unwrap();
        assert_eq!(net.node_count(), 300);
        let mut seen = std::collections::HashSet::new();
        for e in net.edges() {
            assert_ne!(e.src, e.dst);
            let key = (e.src.0.min(e.dst.0), e.src.0.max(e.dst.0));
            assert!(seen.insert(key), "duplicate edge {key:?}");
        }
        for v in 4..300u32 {
            assert_eq!(net.arrival(NodeId(v)), v as i64 - 3);
        }
    }

    #[test]
    fn maintained_coreness_matches_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..40 {
            let n = rng.gen_range(2..40usize);
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
            let mut core = vec![0u32; n];
            let mut maintainer = CoreMaintainer::new();
            let mut changed = Vec::new();
            for _ in 0..rng.gen_range(0..150) {
                let u = rng.gen_range(0..n);
                let v = rng.gen_range(0..n);
                if u == v || adj[u].contains(&(v as u32)) {
                    continue;
                }
                adj[u].push(v as u32);
                adj[v].push(u as u32);
                maintainer.insert(&adj, &mut core, u, v, &mut changed);
                assert_eq!(core, core_numbers(&adj));
            }
        }
    }

    #[test]
    fn observer_sees_exact_coreness() {
        let mut cfg = SimConfig::new(400, 2, 5);
        cfg.out_degree = OutDegree::ShiftedGeometric { extra_mean: 3.0 };
        let kernel = KernelSpec::hybrid(0.5, 0.3);
        let net = simulate(&cfg, &kernel).unwrap();
        let mut checked = 0;
        simulate_with_observer(&cfg, &kernel, |tick, core, _| {
            if tick % 7 != 0 {
                return;
            }
            let mut adj: Vec<Vec<u32>> = vec![Vec::new(); core.len()];
            for e in net.edges().iter().take_while(|e| e.t < tick) {
                adj[e.src.index()].push(e.dst.0);
                adj[e.dst.index()].push(e.src.0);
            }
            assert_eq!(core, core_numbers(&adj).as_slice(), "tick {tick}");
            checked += 1;
        })
        .unwrap();
        assert!(checked > 50);
    }
}
