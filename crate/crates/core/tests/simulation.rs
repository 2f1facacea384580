use coregrowth::growth_sim::{simulate_with_observer, OutDegree};
use coregrowth::*;

#[test]
fn same_seed_same_network() {
    let mut cfg = SimConfig::new(2_000, 2, 42);
    cfg.out_degree = OutDegree::ShiftedGeometric { extra_mean: 2.0 };
    let kernel = KernelSpec::hybrid(0.7, 0.2);
    let a = simulate(&cfg, &kernel).unwrap();
    let b = simulate(&cfg, &kernel).unwrap();
    assert_eq!(a.edges(), b.edges());
    cfg.rng_seed = 43;
    let c = simulate(&cfg, &kernel).unwrap();
    assert_ne!(a.edges(), c.edges());
}

#[test]
fn coreness_seen_by_kernel_is_exact() {
    let mut cfg = SimConfig::new(600, 1, 9);
    cfg.out_degree = OutDegree::ShiftedGeometric { extra_mean: 3.0 };
    let kernel = KernelSpec::coreness_only(0.3);
    let net = simulate(&cfg, &kernel).unwrap();
    let mut checked = 0;
    simulate_with_observer(&cfg, &kernel, |tick, core, _| {
        if tick % 50 != 0 {
            return;
        }
        let g = net.snapshot_at(tick, DegreeMode::Undirected);
        let cm = core_decomposition(&g);
        for v in g.nodes() {
            assert_eq!(core[v.index()], cm.coreness(v), "tick {tick} node {v}");
        }
        checked += 1;
    })
    .unwrap();
    assert!(checked >= 10);
}

#[test]
fn zero_alpha_attaches_uniformly() {
    // With m = 1 the newcomer of tick j sees nodes 0..j+1, all equally likely.
    // Bin each target by its relative position among the existing nodes and
    // compare with the exact expected bin counts.
    let net = simulate(&SimConfig::new(10_002, 1, 3), &KernelSpec::degree_only(0.0)).unwrap();
    const BINS: usize = 10;
    let mut observed = [0.0f64; BINS];
    let mut expected = [0.0f64; BINS];
    for e in net.edges().iter().filter(|e| e.t > 0) {
        let existing = e.t as usize + 1;
        observed[e.dst.index() * BINS / existing] += 1.0;
        for v in 0..existing {
            expected[v * BINS / existing] += 1.0 / existing as f64;
        }
    }
    let chi2: f64 = observed.iter().zip(&expected).map(|(o, e)| (o - e).powi(2) / e).sum();
    // 9 degrees of freedom; 27.9 is the 0.999 quantile
    assert!(chi2 < 27.9, "observed {observed:?} expected {expected:?} chi2 {chi2:.1}");
}

#[test]
fn linear_preference_gives_cubic_degree_tail() {
    let net = simulate(&SimConfig::new(20_000, 3, 17), &KernelSpec::degree_only(1.0)).unwrap();
    let mut degree = vec![0u64; net.node_count()];
    for e in net.edges() {
        degree[e.src.index()] += 1;
        degree[e.dst.index()] += 1;
    }
    // Slope of the complementary CDF is -(gamma - 1) = -2 for a k^-3 law.
    let kmax = *degree.iter().max().unwrap();
    let n = degree.len() as f64;
    let pts: Vec<FitPoint> = (6..=kmax)
        .map(|k| (k as f64, degree.iter().filter(|&&d| d >= k).count() as f64 / n))
        .filter(|&(_, p)| p * n >= 20.0)
        .map(|(k, p)| FitPoint::new(k, p))
        .collect();
    let slope = coregrowth::fitting::fit_power_law(&pts, &FitOptions::unfiltered()).exponent().unwrap();
    let tail = slope - 1.0;
    assert!((tail + 3.0).abs() <= 0.5, "density tail slope {tail}");
}

#[test]
fn constant_kernel_gives_flat_series() {
    let net = simulate(&SimConfig::new(20_000, 3, 5), &KernelSpec::degree_only(1.0)).unwrap();
    let schedule = WindowSchedule::regular(4_000, 3_000, 3_000, 17_000).unwrap();
    let series = coregrowth::pipeline::exponent_time_series(
        &net,
        &schedule,
        ExponentKind::Alpha,
        DegreeMode::Undirected,
        &FitPlan::default(),
    )
    .unwrap();
    let s = series.summary().unwrap();
    assert_eq!(s.windows_fitted, s.windows_total);
    assert!(s.std < 0.1, "alpha(t) std {}", s.std);
}
