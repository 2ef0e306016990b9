use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::ends::maxflow::FlowGraph;
use crate::error::{invalid, Result};
use crate::network::{EdgeId, Network};
use crate::sampling::enumerate_spanning_trees_capped;

/// A finitely supported law on edge sets, as bitmasks over edge positions
/// of the original network.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeSetLaw {
    pub outcomes: Vec<(u64, f64)>,
}

impl EdgeSetLaw {
    fn from_masses(masses: BTreeMap<u64, f64>) -> Self {
        EdgeSetLaw {
            outcomes: masses.into_iter().collect(),
        }
    }

    pub fn expected_size(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|(m, p)| m.count_ones() as f64 * p)
            .sum()
    }

    /// Outcomes translated to edge ids of `net`.
    pub fn to_ids(&self, net: &Network) -> Vec<(Vec<EdgeId>, f64)> {
        self.outcomes
            .iter()
            .map(|(m, p)| {
                let ids = (0..net.edge_count())
                    .filter(|&i| m >> i & 1 == 1)
                    .map(|i| net.edge(i).id)
                    .collect();
                (ids, *p)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominationReport {
    /// Law of `T \ L(T)`, with `L(T)` the path from `x` to `y` in `T`.
    pub lower: EdgeSetLaw,
    /// Law of the UST of `G/{x, y}`.
    pub upper: EdgeSetLaw,
    /// Mass that can be moved from lower to upper outcomes along inclusion.
    pub flow: f64,
    pub feasible: bool,
    /// Witness coupling `(lower index, upper index, mass)` with each lower
    /// outcome contained in the upper one.
    pub coupling: Vec<(usize, usize, f64)>,
}

/// Decides whether the UST of `G/{x,y}` stochastically dominates
/// `T \ L(T)` for the UST `T` of `G`, by max-flow over the inclusion order.
pub fn domination_check(
    net: &Network,
    x: usize,
    y: usize,
    edge_cap: usize,
) -> Result<DominationReport> {
    let n = net.vertex_count();
    if x >= n || y >= n || x == y {
        return Err(invalid("x and y must be distinct vertices"));
    }
    let law = enumerate_spanning_trees_capped(net, edge_cap)?;

    let mut lower = BTreeMap::new();
    for (i, &mask) in law.masks().iter().enumerate() {
        let path = tree_path(net, mask, x, y);
        *lower.entry(mask & !path).or_insert(0.0) += law.probability(i);
    }

    let (hat, _) = net.contract(&[x, y])?;
    let hat_law = enumerate_spanning_trees_capped(&hat, edge_cap)?;
    let to_original: Vec<usize> = hat
        .edges()
        .iter()
        .map(|e| net.edge_position(e.id).expect("contraction keeps ids"))
        .collect();
    let mut upper = BTreeMap::new();
    for (i, &mask) in hat_law.masks().iter().enumerate() {
        let mut m = 0u64;
        for (p, &q) in to_original.iter().enumerate() {
            if mask >> p & 1 == 1 {
                m |= 1 << q;
            }
        }
        *upper.entry(m).or_insert(0.0) += hat_law.probability(i);
    }
    let lower = EdgeSetLaw::from_masses(lower);
    let upper = EdgeSetLaw::from_masses(upper);

    let (a, b) = (lower.outcomes.len(), upper.outcomes.len());
    let source = a + b;
    let sink = source + 1;
    let mut g = FlowGraph::new(a + b + 2);
    for (i, (_, p)) in lower.outcomes.iter().enumerate() {
        g.add_arc(source, i, *p);
    }
    for (j, (_, q)) in upper.outcomes.iter().enumerate() {
        g.add_arc(a + j, sink, *q);
    }
    let mut middle = Vec::new();
    for (i, (lm, _)) in lower.outcomes.iter().enumerate() {
        for (j, (um, _)) in upper.outcomes.iter().enumerate() {
            if lm & !um == 0 {
                middle.push((i, j, g.add_arc(i, a + j, f64::INFINITY)));
            }
        }
    }
    let flow = g.max_flow(source, sink);
    let coupling = middle
        .into_iter()
        .map(|(i, j, arc)| (i, j, g.flow(arc)))
        .filter(|c| c.2 > 0.0)
        .collect();
    Ok(DominationReport {
        lower,
        upper,
        flow,
        feasible: flow >= 1.0 - 1e-9,
        coupling,
    })
}

/// Edge positions on the path from `x` to `y` in the tree `mask`.
fn tree_path(net: &Network, mask: u64, x: usize, y: usize) -> u64 {
    let n = net.vertex_count();
    let mut via = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[x] = true;
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        for inc in net.incident(v) {
            if mask >> inc.edge & 1 == 1 && !seen[inc.neighbor] {
                seen[inc.neighbor] = true;
                via[inc.neighbor] = inc.edge;
                stack.push(inc.neighbor);
            }
        }
    }
    let mut path = 0u64;
    let mut v = y;
    while v != x {
        let e = via[v];
        path |= 1 << e;
        v = net.edge(e).other(v);
    }
    path
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::DEFAULT_EDGE_CAP;

    #[test]
    fn triangle() {
        // x = 0, y = 1, z = 2; edges xy, yz, xz
        let tri = Network::unit(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = domination_check(&tri, 0, 1, DEFAULT_EDGE_CAP).unwrap();
        assert!(r.feasible);
        let third = 1.0 / 3.0;
        let expect_lower = [(0b000u64, third), (0b010, third), (0b100, third)];
        for ((m, p), (em, ep)) in r.lower.outcomes.iter().zip(expect_lower) {
            assert_eq!(*m, em);
            assert!((p - ep).abs() < 1e-12);
        }
        assert_eq!(r.upper.outcomes.len(), 2);
        for (_, q) in &r.upper.outcomes {
            assert!((q - 0.5).abs() < 1e-12);
        }
        let moved: f64 = r.coupling.iter().map(|c| c.2).sum();
        assert!((moved - 1.0).abs() < 1e-12);
        for &(i, j, _) in &r.coupling {
            assert_eq!(r.lower.outcomes[i].0 & !r.upper.outcomes[j].0, 0);
        }
    }

    #[test]
    fn path_leaves_nothing() {
        let path = Network::unit(3, [(0, 1), (1, 2)]).unwrap();
        let r = domination_check(&path, 0, 2, DEFAULT_EDGE_CAP).unwrap();
        assert_eq!(r.lower.outcomes, vec![(0, 1.0)]);
        assert!(r.feasible);
        assert!(r.upper.expected_size() >= r.lower.expected_size());
    }

    #[test]
    fn rejects_equal_endpoints() {
        let path = Network::unit(2, [(0, 1)]).unwrap();
        assert!(domination_check(&path, 1, 1, DEFAULT_EDGE_CAP).is_err());
    }
}
