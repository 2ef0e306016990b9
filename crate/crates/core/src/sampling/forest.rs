use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::OnceCell;

use crate::error::{invalid, Result};
use crate::network::{EdgeId, Network};

/// Minimal union-find with path halving.
#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns `false` if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// An acyclic set of edges of a network. Every vertex is covered, possibly
/// as a singleton component.
#[derive(Clone, Debug)]
pub struct Forest<'n> {
    network: &'n Network,
    member: Vec<bool>,
    components: OnceCell<(Vec<usize>, usize)>,
}

impl<'n> Forest<'n> {
    /// Builds a forest from edge positions. Fails on a cycle.
    pub fn from_positions(network: &'n Network, positions: &[usize]) -> Result<Self> {
        let mut member = vec![false; network.edge_count()];
        let mut uf = UnionFind::new(network.vertex_count());
        for &p in positions {
            if p >= network.edge_count() {
                return Err(invalid(format!("edge position {p} out of range")));
            }
            if member[p] {
                continue;
            }
            let e = network.edge(p);
            if !uf.union(e.tail, e.head) {
                return Err(invalid(format!("edge {:?} closes a cycle", e.id)));
            }
            member[p] = true;
        }
        Ok(Forest {
            network,
            member,
            components: OnceCell::new(),
        })
    }

    pub fn from_ids(network: &'n Network, ids: &[EdgeId]) -> Result<Self> {
        let positions = ids
            .iter()
            .map(|id| {
                network
                    .edge_position(*id)
                    .ok_or_else(|| invalid(format!("edge {id:?} is not in the network")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_positions(network, &positions)
    }

    /// Trusted constructor for sampler output.
    pub(crate) fn from_mask_unchecked(network: &'n Network, member: Vec<bool>) -> Self {
        Forest {
            network,
            member,
            components: OnceCell::new(),
        }
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn contains(&self, pos: usize) -> bool {
        self.member[pos]
    }

    pub fn contains_id(&self, id: EdgeId) -> bool {
        self.network
            .edge_position(id)
            .is_some_and(|p| self.member[p])
    }

    pub fn mask(&self) -> &[bool] {
        &self.member
    }

    pub fn positions(&self) -> Vec<usize> {
        (0..self.member.len()).filter(|&p| self.member[p]).collect()
    }

    pub fn edge_ids(&self) -> Vec<EdgeId> {
        self.positions()
            .into_iter()
            .map(|p| self.network.edge(p).id)
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.member.iter().filter(|m| **m).count()
    }

    fn component_data(&self) -> &(Vec<usize>, usize) {
        self.components.get_or_init(|| {
            let n = self.network.vertex_count();
            let mut uf = UnionFind::new(n);
            for (p, e) in self.network.edges().iter().enumerate() {
                if self.member[p] {
                    uf.union(e.tail, e.head);
                }
            }
            let mut label = vec![usize::MAX; n];
            let mut count = 0;
            let mut root_label = vec![usize::MAX; n];
            for v in 0..n {
                let r = uf.find(v);
                if root_label[r] == usize::MAX {
                    root_label[r] = count;
                    count += 1;
                }
                label[v] = root_label[r];
            }
            (label, count)
        })
    }

    /// Component label of each vertex; labels are numbered by first vertex.
    pub fn component_labels(&self) -> &[usize] {
        &self.component_data().0
    }

    pub fn component_count(&self) -> usize {
        self.component_data().1
    }

    pub fn component_of(&self, v: usize) -> Vec<usize> {
        let labels = self.component_labels();
        (0..labels.len())
            .filter(|&x| labels[x] == labels[v])
            .collect()
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.component_count() <= 1
    }
}

/// A spanning tree stored as parent pointers towards `root`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    pub root: usize,
    /// Parent vertex of each vertex; `usize::MAX` at the root.
    pub parent: Vec<usize>,
    /// Position of the edge to the parent; `usize::MAX` at the root.
    pub parent_edge: Vec<usize>,
}

impl RootedTree {
    pub fn edge_mask(&self, edge_count: usize) -> Vec<bool> {
        let mut m = vec![false; edge_count];
        for &p in &self.parent_edge {
            if p != usize::MAX {
                m[p] = true;
            }
        }
        m
    }

    /// Children lists in CSR form `(offsets, children)`.
    pub fn children(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.parent.len();
        let mut count = vec![0usize; n + 1];
        for &p in &self.parent {
            if p != usize::MAX {
                count[p + 1] += 1;
            }
        }
        for i in 0..n {
            count[i + 1] += count[i];
        }
        let mut fill = count.clone();
        let mut out = vec![0; count[n]];
        for (v, &p) in self.parent.iter().enumerate() {
            if p != usize::MAX {
                out[fill[p]] = v;
                fill[p] += 1;
            }
        }
        (count, out)
    }

    /// All descendants of `v`, excluding `v`, in BFS order.
    pub fn descendants(&self, v: usize) -> Vec<usize> {
        let (off, ch) = self.children();
        let mut out = Vec::new();
        let mut head = 0;
        out.extend_from_slice(&ch[off[v]..off[v + 1]]);
        while head < out.len() {
            let x = out[head];
            head += 1;
            out.extend_from_slice(&ch[off[x]..off[x + 1]]);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_cycles() {
        let tri = Network::unit(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(Forest::from_positions(&tri, &[0, 1, 2]).is_err());
        let f = Forest::from_positions(&tri, &[0, 1]).unwrap();
        assert!(f.is_spanning_tree());
        assert_eq!(f.edge_ids(), vec![EdgeId(0), EdgeId(1)]);
        let g = Forest::from_positions(&tri, &[2]).unwrap();
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.component_of(0), vec![0, 2]);
        assert!(g.contains_id(EdgeId(2)) && !g.contains_id(EdgeId(0)));
    }

    #[test]
    fn descendants() {
        let t = RootedTree {
            root: 0,
            parent: vec![usize::MAX, 0, 1, 1, 0],
            parent_edge: vec![usize::MAX, 0, 1, 2, 3],
        };
        let mut d = t.descendants(1);
        d.sort();
        assert_eq!(d, vec![2, 3]);
        assert_eq!(t.descendants(0).len(), 4);
        assert!(t.descendants(4).is_empty());
    }
}
