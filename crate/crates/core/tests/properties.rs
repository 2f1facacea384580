use std::collections::BTreeMap;

use coregrowth::fitting::{fit_exponential, fit_power_law, FitOptions, FitPoint};
use coregrowth::kcore::core_numbers;
use coregrowth::pa_measure::{measure_coreness_pa, measure_degree_pa, measure_hybrid};
use coregrowth::temporal_graph::TimedEdge;
use coregrowth::*;
use proptest::prelude::*;

fn naive_coreness(adj: &[Vec<u32>]) -> Vec<u32> {
    let n = adj.len();
    let mut core = vec![0u32; n];
    for k in 1.. {
        let mut alive = vec![true; n];
        loop {
            let drop: Vec<usize> = (0..n)
                .filter(|&v| alive[v] && (adj[v].iter().filter(|&&u| alive[u as usize]).count() as u32) < k)
                .collect();
            if drop.is_empty() {
                break;
            }
            for v in drop {
                alive[v] = false;
            }
        }
        if !alive.contains(&true) {
            break;
        }
        for v in (0..n).filter(|&v| alive[v]) {
            core[v] = k;
        }
    }
    core
}

fn adjacency(n: usize, edges: &[(u32, u32)]) -> Vec<Vec<u32>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        if a != b && !adj[a as usize].contains(&b) {
            adj[a as usize].push(b);
            adj[b as usize].push(a);
        }
    }
    adj
}

fn graph() -> impl Strategy<Value = (usize, Vec<(u32, u32)>)> {
    (1usize..40).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n as u32, 0..n as u32), 0..120)))
}

/// Random temporal network: `(src, dst, t)` triples over a few ticks.
fn temporal() -> impl Strategy<Value = TemporalNetwork> {
    (2usize..30)
        .prop_flat_map(|n| prop::collection::vec((0..n as u32, 0..n as u32, 0i64..8), 1..80).prop_map(move |e| (n, e)))
        .prop_map(|(n, raw)| {
            let edges = raw
                .into_iter()
                .map(|(s, d, t)| TimedEdge {
                    src: NodeId(s),
                    dst: NodeId(d),
                    t,
                })
                .collect();
            TemporalNetwork::from_edges(n, edges, TimeUnit::Ticks).unwrap()
        })
}

proptest! {
    #[test]
    fn coreness_matches_naive((n, edges) in graph()) {
        let adj = adjacency(n, &edges);
        prop_assert_eq!(core_numbers(&adj), naive_coreness(&adj));
    }

    #[test]
    fn coreness_never_drops_when_an_edge_is_added((n, edges) in graph(), a in 0u32..40, b in 0u32..40) {
        let before = core_numbers(&adjacency(n, &edges));
        let mut more = edges.clone();
        more.push((a % n as u32, b % n as u32));
        let after = core_numbers(&adjacency(n, &more));
        for (x, y) in before.iter().zip(&after) {
            prop_assert!(y >= x && *y <= x + 1);
        }
    }

    #[test]
    fn coreness_is_label_free((n, edges) in graph(), shift in 0u32..40) {
        let perm = |v: u32| (v + shift) % n as u32;
        let relabelled: Vec<(u32, u32)> = edges.iter().map(|&(a, b)| (perm(a), perm(b))).collect();
        let base = core_numbers(&adjacency(n, &edges));
        let moved = core_numbers(&adjacency(n, &relabelled));
        for v in 0..n as u32 {
            prop_assert_eq!(base[v as usize], moved[perm(v) as usize]);
        }
    }

    #[test]
    fn snapshots_only_grow(net in temporal()) {
        let mut last = (0, 0);
        for cutoff in 0..10 {
            let g = net.snapshot_at(cutoff, DegreeMode::Undirected);
            let now = (g.node_count(), g.edge_count());
            prop_assert!(now.0 >= last.0 && now.1 >= last.1);
            last = now;
        }
    }

    #[test]
    fn window_edges_are_conserved(net in temporal(), t in 0i64..8, dt in 1i64..4) {
        let w = net.window_attachments(t, dt);
        prop_assert_eq!(w.total_edges(), net.edges_between(t, t + dt).len());
        prop_assert_eq!(w.events.len() + w.new_new + w.old_old, w.total_edges());
    }

    #[test]
    fn rates_normalize_and_curves_rise(net in temporal(), t in 1i64..8) {
        let g = net.snapshot_at(t, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let w = net.window_attachments(t, 2);
        for s in [measure_degree_pa(&g, &w), measure_coreness_pa(&g, &cm, &w)] {
            prop_assert_eq!(s.node_count(), g.node_count() as u64);
            if s.is_empty() {
                prop_assert!(s.rows.iter().all(|r| r.rate.is_none()));
                continue;
            }
            let total: f64 = s.rows.iter().map(|r| r.rate.unwrap()).sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            let kappa: Vec<f64> = s.rows.iter().map(|r| r.cumulative.unwrap()).collect();
            prop_assert!(kappa.windows(2).all(|p| p[0] <= p[1]));
        }
    }

    #[test]
    fn hybrid_table_marginalizes(net in temporal(), t in 1i64..8) {
        let g = net.snapshot_at(t, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        let w = net.window_attachments(t, 2);
        let h = measure_hybrid(&g, &cm, &w);
        let mut by_c: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
        let mut by_k: BTreeMap<u32, (u64, u64)> = BTreeMap::new();
        for (&(c, k), cell) in &h.cells {
            for (key, m) in [(c, &mut by_c), (k, &mut by_k)] {
                let e = m.entry(key).or_default();
                e.0 += cell.attachments;
                e.1 += cell.size;
            }
        }
        let marginal = |s: &AttachmentStats| -> BTreeMap<u32, (u64, u64)> {
            s.rows.iter().map(|r| (r.value, (r.attachments, r.size))).collect()
        };
        prop_assert_eq!(by_c, marginal(&measure_coreness_pa(&g, &cm, &w)));
        prop_assert_eq!(by_k, marginal(&measure_degree_pa(&g, &w)));
    }

    #[test]
    fn power_law_fit_ignores_scale(a in 0.2f64..3.0, c in 0.01f64..100.0, sx in 0.1f64..10.0) {
        let opts = FitOptions::unfiltered();
        let pts: Vec<FitPoint> = (1..12).map(|x| x as f64).map(|x| FitPoint::new(x, x.powf(a) * (1.0 + 0.1 * (x * 1.3).sin()))).collect();
        let base = fit_power_law(&pts, &opts).fitted().unwrap().clone();
        let scaled: Vec<FitPoint> = pts.iter().map(|p| FitPoint::new(p.x * sx, p.y * c)).collect();
        let moved = fit_power_law(&scaled, &opts).fitted().unwrap().clone();
        prop_assert!((base.exponent - moved.exponent).abs() < 1e-9);
        prop_assert!((base.r_squared - moved.r_squared).abs() < 1e-9);
    }

    #[test]
    fn exponential_fit_ignores_shift_and_scale(b in -1.0f64..1.0, c in 0.01f64..100.0, dx in -5.0f64..5.0) {
        let opts = FitOptions::unfiltered();
        let pts: Vec<FitPoint> = (1..12).map(|x| x as f64).map(|x| FitPoint::new(x, (b * x).exp() * (1.0 + 0.1 * x.cos().abs()))).collect();
        let base = fit_exponential(&pts, &opts).fitted().unwrap().clone();
        let moved: Vec<FitPoint> = pts.iter().map(|p| FitPoint::new(p.x + dx, p.y * c)).collect();
        let moved = fit_exponential(&moved, &opts).fitted().unwrap().clone();
        prop_assert!((base.exponent - moved.exponent).abs() < 1e-9);
    }
}
