use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::determinant;
use crate::network::{EdgeId, Network};
use crate::sampling::forest::UnionFind;

/// Default limit on the number of edges for exhaustive enumeration.
pub const DEFAULT_EDGE_CAP: usize = 24;

/// The exact weighted UST law of a small network. Trees are bitmasks over
/// edge positions.
#[derive(Clone, Debug)]
pub struct SpanningDistribution {
    ids: Vec<EdgeId>,
    trees: Vec<u64>,
    weights: Vec<f64>,
    normalizer: f64,
}

impl SpanningDistribution {
    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }

    /// Edge-position bitmasks, in lexicographic order of inclusion decisions.
    pub fn masks(&self) -> &[u64] {
        &self.trees
    }

    /// `prod c(e)` per tree.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn probability(&self, i: usize) -> f64 {
        self.weights[i] / self.normalizer
    }

    pub fn tree_edges(&self, i: usize) -> Vec<EdgeId> {
        (0..self.ids.len())
            .filter(|&p| self.trees[i] >> p & 1 == 1)
            .map(|p| self.ids[p])
            .collect()
    }

    /// `P[e in T]` for the edge at `pos`.
    pub fn edge_marginal(&self, pos: usize) -> f64 {
        self.trees
            .iter()
            .zip(&self.weights)
            .filter(|(t, _)| *t >> pos & 1 == 1)
            .map(|(_, w)| w)
            .sum::<f64>()
            / self.normalizer
    }

    /// Index of the tree with the given mask.
    pub fn index_of(&self, mask: u64) -> Option<usize> {
        self.trees.iter().position(|&t| t == mask)
    }
}

/// Enumerates every spanning tree with at most [`DEFAULT_EDGE_CAP`] edges.
pub fn enumerate_spanning_trees(net: &Network) -> Result<SpanningDistribution> {
    enumerate_spanning_trees_capped(net, DEFAULT_EDGE_CAP)
}

/// Exhaustive enumeration, cross-checked against the weighted matrix-tree
/// determinant to relative accuracy `1e-8`.
pub fn enumerate_spanning_trees_capped(net: &Network, cap: usize) -> Result<SpanningDistribution> {
    let m = net.edge_count();
    let cap = cap.min(64);
    if m > cap {
        return Err(Error::ResourceLimit {
            what: "edges for spanning-tree enumeration",
            requested: m,
            limit: cap,
        });
    }
    let n = net.vertex_count();
    if !net.is_connected() {
        let (labels, _) = net.components();
        let v = (0..n).find(|&v| labels[v] != labels[0]).unwrap_or(0);
        return Err(Error::Disconnected { vertex: v, from: 0 });
    }
    let mut trees = Vec::new();
    let mut weights = Vec::new();
    if n <= 1 {
        trees.push(0);
        weights.push(1.0);
    } else {
        let mut uf = UnionFind::new(n);
        search(net, 0, n - 1, 0, 1.0, &mut uf, &mut trees, &mut weights);
    }
    let normalizer: f64 = weights.iter().sum();
    let det = matrix_tree_determinant(net);
    if (normalizer - det).abs() > 1e-8 * det.abs().max(1.0) {
        return Err(Error::Inconsistent(format!(
            "enumerated tree weight {normalizer} differs from matrix-tree determinant {det}"
        )));
    }
    Ok(SpanningDistribution {
        ids: net.edges().iter().map(|e| e.id).collect(),
        trees,
        weights,
        normalizer,
    })
}

#[allow(clippy::too_many_arguments)]
fn search(
    net: &Network,
    pos: usize,
    need: usize,
    mask: u64,
    weight: f64,
    uf: &mut UnionFind,
    trees: &mut Vec<u64>,
    weights: &mut Vec<f64>,
) {
    if need == 0 {
        trees.push(mask);
        weights.push(weight);
        return;
    }
    if net.edge_count() - pos < need {
        return;
    }
    let e = net.edge(pos);
    let saved = uf.clone();
    if uf.union(e.tail, e.head) {
        search(
            net,
            pos + 1,
            need - 1,
            mask | 1 << pos,
            weight * e.conductance,
            uf,
            trees,
            weights,
        );
        *uf = saved;
    }
    search(net, pos + 1, need, mask, weight, uf, trees, weights);
}

/// Weighted tree count: any cofactor of the weighted Laplacian.
pub fn matrix_tree_determinant(net: &Network) -> f64 {
    let n = net.vertex_count();
    if n <= 1 {
        return 1.0;
    }
    let k = n - 1;
    let mut a = vec![0.0; k * k];
    for e in net.edges() {
        let (t, h, c) = (e.tail, e.head, e.conductance);
        // drop vertex 0
        if t > 0 {
            a[(t - 1) * k + t - 1] += c;
        }
        if h > 0 {
            a[(h - 1) * k + h - 1] += c;
        }
        if t > 0 && h > 0 {
            a[(t - 1) * k + h - 1] -= c;
            a[(h - 1) * k + t - 1] -= c;
        }
    }
    determinant(a, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let tri = Network::unit(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = enumerate_spanning_trees(&tri).unwrap();
        assert_eq!(d.len(), 3);
        assert!((d.normalizer() - 3.0).abs() < 1e-12);

        let k4 = Network::unit(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap();
        let d = enumerate_spanning_trees(&k4).unwrap();
        assert_eq!(d.len(), 16);
        for p in 0..6 {
            assert!((d.edge_marginal(p) - 0.5).abs() < 1e-12);
        }

        let path = Network::new(3, [(0, 1, 2.5), (1, 2, 3.0)]).unwrap();
        let d = enumerate_spanning_trees(&path).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d.normalizer() - 7.5).abs() < 1e-12);
        assert_eq!(d.tree_edges(0), vec![EdgeId(0), EdgeId(1)]);
    }

    #[test]
    fn weighted_triangle() {
        let tri = Network::new(3, [(0, 1, 2.0), (1, 2, 1.0), (2, 0, 1.0)]).unwrap();
        let d = enumerate_spanning_trees(&tri).unwrap();
        assert!((d.normalizer() - 5.0).abs() < 1e-12);
        let i = d.index_of(0b011).unwrap();
        assert!((d.probability(i) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn multigraph_and_cap() {
        let par = Network::unit(2, [(0, 1), (0, 1), (0, 1)]).unwrap();
        assert_eq!(enumerate_spanning_trees(&par).unwrap().len(), 3);
        assert!(matches!(
            enumerate_spanning_trees_capped(&par, 2),
            Err(Error::ResourceLimit { .. })
        ));
        let g = Network::unit(3, [(0, 1)]).unwrap();
        assert!(matches!(
            enumerate_spanning_trees(&g),
            Err(Error::Disconnected { .. })
        ));
    }
}
