use proptest::prelude::*;
use wsf_core::catalog::{connected_graphs, random_connected_network};
use wsf_core::electrical::SolveOptions;
use wsf_core::isoperimetry::{
    finite_hs_bound, good_subset, half_inequality, hs_resistance_bound, integral_bound,
    profile_table, BoundStatus, BoundaryVariant, GoodSubsetOptions, HsOptions, PowerProfile,
    DEFAULT_VERTEX_CAP,
};
use wsf_core::{Network, RngStream};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn profile_is_nondecreasing(seed in any::<u64>(), n in 2usize..=10) {
        let mut rng = RngStream::new(seed, 0);
        let g = random_connected_network(n, 0.3, (0.5, 2.0), &mut rng).unwrap();
        let a = if n > 2 { vec![rng.below(n)] } else { vec![] };
        let table = profile_table(&g, &a, BoundaryVariant::Edge, DEFAULT_VERTEX_CAP).unwrap();
        let total: f64 = (0..n).map(|v| g.pi(v)).sum();
        let mut prev = 0.0;
        for i in 0..=200 {
            let t = total * i as f64 / 200.0;
            let k = table.eval(t);
            prop_assert!(k >= prev);
            prev = k;
        }
    }

    #[test]
    fn integral_bound_dominates_the_series(c in 0.05f64..1.0, gamma in 0.55f64..=1.0, lift in 1.0f64..50.0) {
        let f = PowerProfile::new(c, gamma).unwrap();
        // smallest admissible pi_A is where c t^gamma = t
        let pi_a = if gamma < 1.0 { c.powf(1.0 / (1.0 - gamma)) * lift } else { lift };
        let i = integral_bound(&f, f.doubling_constant(), pi_a).unwrap();
        let hs = hs_resistance_bound(&f.into(), pi_a, &HsOptions::default()).unwrap();
        prop_assert_eq!(hs.status, BoundStatus::Converged);
        prop_assert!(i >= hs.value * (1.0 - 1e-12), "{} < {:?}", i, hs);
    }
}

#[test]
fn finite_bound_is_sound_on_random_networks() {
    let opts = SolveOptions::default();
    for seed in 0..20 {
        let mut rng = RngStream::new(seed, 0);
        let g = random_connected_network(8, 0.3, (0.5, 2.0), &mut rng).unwrap();
        let r = finite_hs_bound(&g, 0, 7, DEFAULT_VERTEX_CAP, &opts).unwrap();
        assert!(r.bound >= r.exact);
    }
}

#[test]
fn finite_bound_is_sound_on_catalog() {
    let opts = SolveOptions::default();
    for g in connected_graphs(6, 15) {
        let net = g.to_network().unwrap();
        for a in 0..g.vertices {
            for z in (0..g.vertices).filter(|&z| z != a) {
                let r = finite_hs_bound(&net, a, z, DEFAULT_VERTEX_CAP, &opts).unwrap();
                assert!(r.bound >= r.exact);
            }
        }
    }
}

/// Random wired graph: `n` interior vertices and a wired vertex attached to
/// a few of them.
fn wired_graph(seed: u64, n: usize) -> Network {
    let mut rng = RngStream::new(seed, 0);
    let g = random_connected_network(n, 0.25, (1.0, 1.0), &mut rng).unwrap();
    let mut edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, e.conductance))
        .collect();
    for v in 1..n {
        if rng.uniform() < 0.3 {
            edges.push((v, n, 1.0));
        }
    }
    edges.push((n - 1, n, 1.0));
    Network::new(n + 1, edges).unwrap().with_wired(n).unwrap()
}

#[test]
fn good_subsets_halve_the_profile_at_worst() {
    let mut tested = 0;
    for seed in 0..60 {
        let g = wired_graph(seed, 6 + (seed as usize % 6));
        let w = g.wired().unwrap();
        let ok = |v: usize| v != w && g.incident(v).iter().all(|i| i.neighbor != w);
        for k in (0..g.vertex_count()).filter(|&v| ok(v)) {
            let r = good_subset(&g, &[k], &GoodSubsetOptions::default()).unwrap();
            assert!(r.certificate.holds && r.certificate.exhaustive, "{r:?}");
            let h = half_inequality(&g, &r.vertices, DEFAULT_VERTEX_CAP).unwrap();
            assert!(h.holds, "seed {seed}, K = {{{k}}}: {h:?}");
            tested += 1;
        }
    }
    assert!(tested > 50, "{tested}");
}
