use wsf_core::catalog::connected_graphs;
use wsf_core::electrical::{kirchhoff_edge_probability, SolveOptions};
use wsf_core::sampling::{condition_on_edge, enumerate_spanning_trees, Forest, WilsonSampler};
use wsf_core::{Network, RngStream};

fn mask_of(f: &Forest<'_>) -> u64 {
    f.mask()
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .fold(0, |m, (p, _)| m | 1 << p)
}

fn total_variation(counts: &[u64], law: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    0.5 * counts
        .iter()
        .zip(law)
        .map(|(&c, &p)| (c as f64 / n as f64 - p).abs())
        .sum::<f64>()
}

#[test]
fn wilson_matches_enumeration_on_small_catalog() {
    let draws = 1_000_000;
    let graphs = connected_graphs(6, 5);
    assert!(graphs.len() > 20);
    for (gi, g) in graphs.iter().enumerate() {
        let edges: Vec<(usize, usize, f64)> = g
            .edges
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (a, b, ((i + gi) % 3 + 1) as f64))
            .collect();
        let net = Network::new(g.vertices, edges).unwrap();
        let law = enumerate_spanning_trees(&net).unwrap();
        let mut counts = vec![0u64; law.len()];
        let mut sampler = WilsonSampler::new(&net, gi % g.vertices).unwrap();
        let mut rng = RngStream::new(11, gi as u64);
        for _ in 0..draws {
            let t = sampler.sample(&mut rng);
            counts[law.index_of(mask_of(&t)).expect("a spanning tree")] += 1;
        }
        let probs: Vec<f64> = (0..law.len()).map(|i| law.probability(i)).collect();
        let tv = total_variation(&counts, &probs);
        assert!(tv <= 0.005, "graph {g:?}: TV {tv}");
    }
}

fn marginals(net: &Network, root: usize, draws: usize, stream: u64) -> Vec<f64> {
    let mut sampler = WilsonSampler::new(net, root).unwrap();
    let mut rng = RngStream::new(5, stream);
    let mut hits = vec![0usize; net.edge_count()];
    for _ in 0..draws {
        let t = sampler.sample(&mut rng);
        for (p, &b) in t.mask().iter().enumerate() {
            hits[p] += b as usize;
        }
    }
    hits.iter().map(|&h| h as f64 / draws as f64).collect()
}

#[test]
fn marginals_do_not_depend_on_the_root() {
    // 3x4 grid with uneven conductances
    let mut edges = Vec::new();
    for r in 0..3 {
        for c in 0..4 {
            let v = r * 4 + c;
            if c + 1 < 4 {
                edges.push((v, v + 1, 1.0 + ((v * 7) % 3) as f64));
            }
            if r + 1 < 3 {
                edges.push((v, v + 4, 1.0 + ((v * 5) % 2) as f64));
            }
        }
    }
    let net = Network::new(12, edges).unwrap();
    let draws = 100_000;
    let a = marginals(&net, 0, draws, 0);
    let b = marginals(&net, 11, draws, 1);
    for (p, (x, y)) in a.iter().zip(&b).enumerate() {
        let exact =
            kirchhoff_edge_probability(&net, net.edge(p).id, &SolveOptions::default()).unwrap();
        let sd = (2.0 * exact * (1.0 - exact) / draws as f64).sqrt();
        assert!((x - y).abs() <= 4.0 * sd, "edge {p}: {x} vs {y}");
    }
}

#[test]
fn sequential_conditioning_reproduces_the_joint_law() {
    let opts = SolveOptions::default();
    for cs in [[1.0, 1.0, 1.0], [2.0, 1.0, 1.0], [1.0, 3.0, 0.5]] {
        let tri = Network::new(3, [(0, 1, cs[0]), (1, 2, cs[1]), (2, 0, cs[2])]).unwrap();
        let law = enumerate_spanning_trees(&tri).unwrap();
        let mut counts = vec![0u64; law.len()];
        let mut rng = RngStream::new(9, 0);
        let draws = 200_000;
        for _ in 0..draws {
            let mut net = tri.clone();
            let mut mask = 0u64;
            for p in 0..3 {
                let id = tri.edge(p).id;
                let keep = match net.edge_position(id) {
                    None => false,
                    Some(q) if net.is_bridge(q) => true,
                    Some(_) => rng.uniform() < kirchhoff_edge_probability(&net, id, &opts).unwrap(),
                };
                if keep {
                    mask |= 1 << p;
                }
                if net.edge_position(id).is_some() {
                    net = condition_on_edge(&net, id, keep).unwrap();
                }
            }
            counts[law.index_of(mask).unwrap()] += 1;
        }
        let probs: Vec<f64> = (0..law.len()).map(|i| law.probability(i)).collect();
        assert!(total_variation(&counts, &probs) <= 0.005);
    }
}
