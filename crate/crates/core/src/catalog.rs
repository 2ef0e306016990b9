//! Small-graph catalogs for exhaustive checks.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;
use crate::network::Network;
use crate::rng::RngStream;

/// A simple graph on `n` vertices as an edge list with `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SimpleGraph {
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
}

impl SimpleGraph {
    pub fn to_network(&self) -> Result<Network> {
        Network::unit(self.vertices, self.edges.iter().copied())
    }

    fn adjacency(&self) -> Vec<u32> {
        let mut adj = vec![0u32; self.vertices];
        for &(a, b) in &self.edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        adj
    }

    fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        let adj = self.adjacency();
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0;
            for v in 0..self.vertices {
                if frontier >> v & 1 == 1 {
                    next |= adj[v];
                }
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == self.vertices
    }

    /// Canonical form: the lexicographically least sorted edge list over all
    /// relabellings that sort vertices by degree.
    fn canonical(&self) -> Vec<(usize, usize)> {
        let n = self.vertices;
        let adj = self.adjacency();
        let deg: Vec<u32> = adj.iter().map(|a| a.count_ones()).collect();
        let mut best: Option<Vec<(usize, usize)>> = None;
        let mut perm = Vec::with_capacity(n);
        let mut used = vec![false; n];
        canonical_search(self, &deg, &mut perm, &mut used, &mut best);
        best.unwrap_or_default()
    }
}

fn canonical_search(
    g: &SimpleGraph,
    deg: &[u32],
    perm: &mut Vec<usize>,
    used: &mut [bool],
    best: &mut Option<Vec<(usize, usize)>>,
) {
    let n = g.vertices;
    if perm.len() == n {
        // perm[new] = old
        let mut inv = vec![0; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut edges: Vec<(usize, usize)> = g
            .edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (inv[a], inv[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        edges.sort();
        if best.as_ref().is_none_or(|b| edges < *b) {
            *best = Some(edges);
        }
        return;
    }
    // new labels are handed out in order of decreasing degree
    let want = (0..n).filter(|&v| !used[v]).map(|v| deg[v]).max().unwrap();
    for v in 0..n {
        if !used[v] && deg[v] == want {
            used[v] = true;
            perm.push(v);
            canonical_search(g, deg, perm, used, best);
            perm.pop();
            used[v] = false;
        }
    }
}

/// Every connected simple graph with at most `max_vertices` vertices and at
/// most `max_edges` edges, one per isomorphism class, at least 2 vertices.
pub fn connected_graphs(max_vertices: usize, max_edges: usize) -> Vec<SimpleGraph> {
    assert!(max_vertices <= 10, "catalog is meant for tiny graphs");
    let mut out = Vec::new();
    for n in 2..=max_vertices {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .collect();
        if n - 1 > max_edges {
            break;
        }
        let mut seen = BTreeSet::new();
        // grow edge sets one edge at a time, keeping one per class
        let mut layer: Vec<Vec<(usize, usize)>> = vec![Vec::new()];
        for _ in 0..max_edges.min(pairs.len()) {
            let mut next_seen = BTreeSet::new();
            let mut next = Vec::new();
            for edges in &layer {
                for &p in &pairs {
                    if edges.contains(&p) {
                        continue;
                    }
                    let mut e = edges.clone();
                    e.push(p);
                    let g = SimpleGraph {
                        vertices: n,
                        edges: e,
                    };
                    let c = g.canonical();
                    if next_seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            for edges in &next {
                let g = SimpleGraph {
                    vertices: n,
                    edges: edges.clone(),
                };
                if g.is_connected() && seen.insert(edges.clone()) {
                    out.push(g);
                }
            }
            layer = next;
        }
    }
    out
}

/// A random connected network on `n` vertices: a random spanning tree plus
/// each further pair independently with probability `density`, conductances
/// uniform in `[lo, hi]`.
pub fn random_connected_network(
    n: usize,
    density: f64,
    (lo, hi): (f64, f64),
    rng: &mut RngStream,
) -> Result<Network> {
    let mut edges = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.below(i + 1);
        order.swap(i, j);
    }
    let mut present = BTreeSet::new();
    for i in 1..n {
        let a = order[i];
        let b = order[rng.below(i)];
        present.insert((a.min(b), a.max(b)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present.contains(&(a, b)) && rng.uniform() < density {
                present.insert((a, b));
            }
        }
    }
    for (a, b) in present {
        edges.push((a, b, lo + (hi - lo) * rng.uniform()));
    }
    Network::new(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        // connected graphs up to isomorphism on 2, 3, 4, 5 vertices: 1, 2, 6, 21
        let all = connected_graphs(5, 10);
        let count = |n| all.iter().filter(|g| g.vertices == n).count();
        assert_eq!([count(2), count(3), count(4), count(5)], [1, 2, 6, 21]);
    }

    #[test]
    fn edge_bounded_catalog() {
        let all = connected_graphs(7, 6);
        assert!(all.iter().all(|g| g.edges.len() <= 6 && g.is_connected()));
        // trees on 7 vertices: 11
        assert_eq!(all.iter().filter(|g| g.vertices == 7).count(), 11);
    }

    #[test]
    fn random_networks_are_connected() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..20 {
            let g = random_connected_network(8, 0.3, (0.5, 2.0), &mut rng).unwrap();
            assert!(g.is_connected());
            assert!(g
                .edges()
                .iter()
                .all(|e| (0.5..=2.0).contains(&e.conductance)));
        }
    }
}
