use proptest::prelude::*;
use wsf_core::catalog::random_connected_network;
use wsf_core::{Network, PiConvention, RngStream};

fn network(seed: u64, n: usize) -> Network {
    let mut rng = RngStream::new(seed, 0);
    random_connected_network(n, 0.3, (0.25, 4.0), &mut rng).unwrap()
}

fn subset(seed: u64, n: usize) -> Vec<usize> {
    let mut rng = RngStream::new(seed, 1);
    let mut k: Vec<usize> = (0..n).filter(|_| rng.uniform() < 0.4).collect();
    if k.is_empty() {
        k.push(rng.below(n));
    }
    k
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contraction_keeps_pi_outside(seed in any::<u64>(), n in 3usize..20) {
        let g = network(seed, n);
        let k = subset(seed, n);
        let (h, map) = g.contract(&k).unwrap();
        for x in (0..n).filter(|x| !k.contains(x)) {
            prop_assert!((h.pi(map[x]) - g.pi(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn modifications_keep_far_edge_mass(seed in any::<u64>(), n in 3usize..20) {
        let g = network(seed, n);
        let k = subset(seed, n);
        let far: Vec<_> = g.edges().iter().filter(|e| !k.contains(&e.tail) && !k.contains(&e.head)).collect();
        let mass: f64 = far.iter().map(|e| e.conductance).sum();
        let (h, _) = g.contract(&k).unwrap();
        let (d, _) = g.delete_vertices(&k).unwrap();
        for net in [&h, &d] {
            let kept: f64 = far.iter().map(|e| net.edge_by_id(e.id).unwrap().conductance).sum();
            prop_assert!((kept - mass).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_of_complement(seed in any::<u64>(), n in 2usize..20) {
        let g = network(seed, n);
        let k = subset(seed, n);
        let rest: Vec<usize> = (0..n).filter(|v| !k.contains(v)).collect();
        prop_assert_eq!(g.edge_boundary(&k).unwrap(), g.edge_boundary(&rest).unwrap());
        // pi(K) = 2 |E(K)| + |boundary K|
        let inner: f64 = g.edges().iter().filter(|e| k.contains(&e.tail) && k.contains(&e.head)).map(|e| e.conductance).sum();
        let pi = g.pi_of(&k, PiConvention::TailInSet).unwrap();
        prop_assert!((pi - 2.0 * inner - g.boundary_conductance(&k).unwrap()).abs() < 1e-9);
    }
}
