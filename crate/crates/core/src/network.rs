//! Finite weighted multigraphs and the wiring/deletion operators on them.
//!
//! Edges carry a stable [`EdgeId`] that survives contraction and deletion, so
//! an edge set sampled on a derived network can be read back on the network
//! it came from. Parallel edges are never merged.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

/// An undirected edge, stored with an arbitrary but fixed orientation
/// `tail -> head`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
    pub conductance: f64,
}

impl Edge {
    pub fn touches(&self, v: usize) -> bool {
        self.tail == v || self.head == v
    }

    /// The endpoint opposite to `v`. `v` must be an endpoint.
    pub fn other(&self, v: usize) -> usize {
        if self.tail == v {
            self.head
        } else {
            self.tail
        }
    }

    pub fn resistance(&self) -> f64 {
        1.0 / self.conductance
    }
}

/// One of the two orientations of an edge. `forward` means the stored
/// orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedEdge {
    /// Position of the edge in [`Network::edges`].
    pub edge: usize,
    pub forward: bool,
    pub tail: usize,
    pub head: usize,
}

impl OrientedEdge {
    pub fn reversed(self) -> Self {
        OrientedEdge {
            edge: self.edge,
            forward: !self.forward,
            tail: self.head,
            head: self.tail,
        }
    }
}

/// How `pi(K)` is computed for a vertex set `K`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PiConvention {
    /// Sum of `c(e)` over oriented edges whose tail lies in `K`. Internal
    /// edges count twice, boundary edges once.
    #[default]
    TailInSet,
    /// Sum of `c(e)` over oriented edges with at least one endpoint in `K`.
    /// Every edge touching `K` counts twice.
    TouchesSet,
}

/// Optional coordinates for (some of) the vertices.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    dim: usize,
    coords: Vec<f64>,
    present: Vec<bool>,
}

impl Embedding {
    pub fn new(dim: usize, vertex_count: usize) -> Self {
        Embedding {
            dim,
            coords: vec![0.0; dim * vertex_count],
            present: vec![false; vertex_count],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.present.len()
    }

    pub fn is_empty(&self) -> bool {
        self.present.is_empty()
    }

    pub fn set(&mut self, v: usize, point: &[f64]) {
        assert_eq!(point.len(), self.dim, "embedding dimension mismatch");
        self.coords[v * self.dim..(v + 1) * self.dim].copy_from_slice(point);
        self.present[v] = true;
    }

    pub fn point(&self, v: usize) -> Option<&[f64]> {
        if *self.present.get(v)? {
            Some(&self.coords[v * self.dim..(v + 1) * self.dim])
        } else {
            None
        }
    }

    fn remap(&self, new_count: usize, old_to_new: impl Fn(usize) -> Option<usize>) -> Self {
        let mut out = Embedding::new(self.dim, new_count);
        for v in 0..self.len() {
            if let (Some(p), Some(nv)) = (self.point(v), old_to_new(v)) {
                out.set(nv, p);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Incidence {
    /// Position of the edge in [`Network::edges`].
    pub edge: usize,
    pub neighbor: usize,
}

/// A finite network: a multigraph without self-loops and with positive
/// edge conductances. Immutable once built.
#[derive(Clone, Debug)]
pub struct Network {
    vertex_count: usize,
    edges: Vec<Edge>,
    offsets: Vec<usize>,
    incidence: Vec<Incidence>,
    pi: Vec<f64>,
    embedding: Option<Embedding>,
    wired: Option<usize>,
}

impl Network {
    /// Builds a network from `(tail, head, conductance)` triples. Edge ids
    /// are assigned in input order.
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, (tail, head, conductance))| Edge {
                id: EdgeId(i as u32),
                tail,
                head,
                conductance,
            })
            .collect();
        Self::from_edges(vertex_count, edges)
    }

    /// Unit-conductance network from an edge list.
    pub fn unit<I>(vertex_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(vertex_count, edges.into_iter().map(|(a, b)| (a, b, 1.0)))
    }

    /// Builds a network from edges that already carry ids. Ids must be
    /// strictly increasing.
    pub fn from_edges(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.tail >= vertex_count || e.head >= vertex_count {
                return Err(invalid(format!(
                    "edge {:?} has endpoint outside 0..{vertex_count}",
                    e.id
                )));
            }
            if e.tail == e.head {
                return Err(invalid(format!("edge {:?} is a self-loop", e.id)));
            }
            if !(e.conductance > 0.0 && e.conductance.is_finite()) {
                return Err(invalid(format!(
                    "edge {:?} has non-positive or non-finite conductance {}",
                    e.id, e.conductance
                )));
            }
            if i > 0 && edges[i - 1].id >= e.id {
                return Err(invalid("edge ids must be strictly increasing"));
            }
        }

        let mut degree = vec![0usize; vertex_count];
        let mut pi = vec![0.0; vertex_count];
        for e in &edges {
            degree[e.tail] += 1;
            degree[e.head] += 1;
            pi[e.tail] += e.conductance;
            pi[e.head] += e.conductance;
        }
        let mut offsets = Vec::with_capacity(vertex_count + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..vertex_count].to_vec();
        let mut incidence = vec![
            Incidence {
                edge: 0,
                neighbor: 0
            };
            offsets[vertex_count]
        ];
        for (pos, e) in edges.iter().enumerate() {
            incidence[fill[e.tail]] = Incidence {
                edge: pos,
                neighbor: e.head,
            };
            fill[e.tail] += 1;
            incidence[fill[e.head]] = Incidence {
                edge: pos,
                neighbor: e.tail,
            };
            fill[e.head] += 1;
        }

        Ok(Network {
            vertex_count,
            edges,
            offsets,
            incidence,
            pi,
            embedding: None,
            wired: None,
        })
    }

    /// Designates `v` as the wired vertex standing in for infinity.
    pub fn with_wired(mut self, v: usize) -> Result<Self> {
        if v >= self.vertex_count {
            return Err(invalid(format!("wired vertex {v} out of range")));
        }
        self.wired = Some(v);
        Ok(self)
    }

    pub fn with_embedding(mut self, embedding: Embedding) -> Result<Self> {
        if embedding.len() != self.vertex_count {
            return Err(invalid("embedding size does not match vertex count"));
        }
        self.embedding = Some(embedding);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, pos: usize) -> &Edge {
        &self.edges[pos]
    }

    /// Position of the edge with the given id, if it is still present.
    pub fn edge_position(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn edge_by_id(&self, id: EdgeId) -> Option<&Edge> {
        self.edge_position(id).map(|p| &self.edges[p])
    }

    pub fn incident(&self, v: usize) -> &[Incidence] {
        &self.incidence[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// `pi(x)`: total conductance of the edges at `x`.
    pub fn pi(&self, v: usize) -> f64 {
        self.pi[v]
    }

    pub fn oriented(&self, pos: usize, forward: bool) -> OrientedEdge {
        let e = &self.edges[pos];
        let o = OrientedEdge {
            edge: pos,
            forward: true,
            tail: e.tail,
            head: e.head,
        };
        if forward {
            o
        } else {
            o.reversed()
        }
    }

    pub fn wired(&self) -> Option<usize> {
        self.wired
    }

    pub fn embedding(&self) -> Option<&Embedding> {
        self.embedding.as_ref()
    }

    pub fn point(&self, v: usize) -> Option<&[f64]> {
        self.embedding.as_ref().and_then(|e| e.point(v))
    }

    pub fn total_conductance(&self) -> f64 {
        self.edges.iter().map(|e| e.conductance).sum()
    }

    pub(crate) fn membership(&self, set: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.vertex_count];
        for &v in set {
            if v >= self.vertex_count {
                return Err(invalid(format!("vertex {v} out of range")));
            }
            mask[v] = true;
        }
        Ok(mask)
    }

    /// Component label of every vertex, and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let mut label = vec![usize::MAX; self.vertex_count];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..self.vertex_count {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for inc in self.incident(x) {
                    if label[inc.neighbor] == usize::MAX {
                        label[inc.neighbor] = count;
                        queue.push_back(inc.neighbor);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_count == 0 || self.components().1 == 1
    }

    /// Whether removing the edge at `pos` disconnects its endpoints.
    pub fn is_bridge(&self, pos: usize) -> bool {
        let e = self.edges[pos];
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![e.tail];
        seen[e.tail] = true;
        while let Some(x) = stack.pop() {
            for inc in self.incident(x) {
                if inc.edge == pos || seen[inc.neighbor] {
                    continue;
                }
                if inc.neighbor == e.head {
                    return false;
                }
                seen[inc.neighbor] = true;
                stack.push(inc.neighbor);
            }
        }
        true
    }

    /// `G/K`: identifies the vertices of `set` to a single vertex and drops
    /// the resulting loops. Parallel edges are kept with their own ids and
    /// conductances.
    ///
    /// The merged vertex takes the position of the smallest member of `set`;
    /// the remaining vertices keep their relative order. Returns the new
    /// network and the old-to-new vertex map.
    pub fn contract(&self, set: &[usize]) -> Result<(Network, Vec<usize>)> {
        if set.is_empty() {
            return Err(invalid("cannot contract an empty vertex set"));
        }
        let inside = self.membership(set)?;
        let rep = *set.iter().min().unwrap();
        let mut map = vec![0usize; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if inside[v] && v != rep {
                map[v] = map[rep];
            } else {
                map[v] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                let (t, h) = (map[e.tail], map[e.head]);
                (t != h).then_some(Edge {
                    id: e.id,
                    tail: t,
                    head: h,
                    conductance: e.conductance,
                })
            })
            .collect();
        let mut out = Network::from_edges(next, edges)?;
        let singleton = set.iter().all(|&v| v == rep);
        out.embedding = self
            .embedding
            .as_ref()
            .map(|emb| emb.remap(next, |v| (singleton || !inside[v]).then(|| map[v])));
        out.wired = self.wired.map(|w| map[w]);
        Ok((out, map))
    }

    /// `G \ K`: removes the vertices of `set` and every edge incident to
    /// them. Returns the new network and the old-to-new vertex map.
    pub fn delete_vertices(&self, set: &[usize]) -> Result<(Network, Vec<Option<usize>>)> {
        let removed = self.membership(set)?;
        let mut map = vec![None; self.vertex_count];
        let mut next = 0;
        for v in 0..self.vertex_count {
            if !removed[v] {
                map[v] = Some(next);
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter_map(|e| {
                Some(Edge {
                    id: e.id,
                    tail: map[e.tail]?,
                    head: map[e.head]?,
                    conductance: e.conductance,
                })
            })
            .collect();
        let mut out = Network::from_edges(next, edges)?;
        out.embedding = self
            .embedding
            .as_ref()
            .map(|emb| emb.remap(next, |v| map[v]));
        out.wired = self.wired.and_then(|w| map[w]);
        Ok((out, map))
    }

    /// `G \ F`: removes the given edges and keeps every vertex. Ids that are
    /// not present are ignored.
    pub fn delete_edges(&self, ids: &[EdgeId]) -> Network {
        let mut drop = vec![false; self.edges.len()];
        for id in ids {
            if let Some(p) = self.edge_position(*id) {
                drop[p] = true;
            }
        }
        let edges = self
            .edges
            .iter()
            .zip(&drop)
            .filter(|(_, d)| !**d)
            .map(|(e, _)| *e)
            .collect();
        let mut out =
            Network::from_edges(self.vertex_count, edges).expect("subnetwork of a valid network");
        out.embedding = self.embedding.clone();
        out.wired = self.wired;
        out
    }

    /// Positions of the edges with exactly one endpoint in `set`.
    pub fn edge_boundary(&self, set: &[usize]) -> Result<Vec<usize>> {
        let inside = self.membership(set)?;
        Ok(self.boundary_of_mask(&inside))
    }

    pub(crate) fn boundary_of_mask(&self, inside: &[bool]) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| inside[e.tail] != inside[e.head])
            .map(|(p, _)| p)
            .collect()
    }

    /// `|boundary(K)|_c`.
    pub fn boundary_conductance(&self, set: &[usize]) -> Result<f64> {
        Ok(self.mass(&self.edge_boundary(set)?))
    }

    /// `pi(K)` under the given convention.
    pub fn pi_of(&self, set: &[usize], convention: PiConvention) -> Result<f64> {
        let inside = self.membership(set)?;
        Ok(self.pi_of_mask(&inside, convention))
    }

    pub(crate) fn pi_of_mask(&self, inside: &[bool], convention: PiConvention) -> f64 {
        match convention {
            PiConvention::TailInSet => (0..self.vertex_count)
                .filter(|&v| inside[v])
                .map(|v| self.pi[v])
                .sum(),
            PiConvention::TouchesSet => {
                2.0 * self
                    .edges
                    .iter()
                    .filter(|e| inside[e.tail] || inside[e.head])
                    .map(|e| e.conductance)
                    .sum::<f64>()
            }
        }
    }

    /// `|F|_c` for a set of edge positions.
    pub fn mass(&self, edges: &[usize]) -> f64 {
        edges.iter().map(|&p| self.edges[p].conductance).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> Network {
        Network::unit(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn rejects_loops_and_bad_conductance() {
        assert!(Network::unit(2, [(1, 1)]).is_err());
        assert!(Network::new(2, [(0, 1, 0.0)]).is_err());
        assert!(Network::new(2, [(0, 1, f64::NAN)]).is_err());
        assert!(Network::unit(2, [(0, 2)]).is_err());
        assert!(Network::unit(2, [(0, 1)]).unwrap().with_wired(2).is_err());
    }

    #[test]
    fn oriented_edge_reversal() {
        let g = cycle(3);
        let e = g.oriented(1, true);
        assert_eq!(e.reversed().reversed(), e);
        assert_eq!(e.reversed().tail, e.head);
        assert_eq!(g.oriented(1, false), e.reversed());
    }

    #[test]
    fn contract_triangle_pair() {
        let g = cycle(3);
        let (h, map) = g.contract(&[0, 1]).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 2);
        assert_eq!(map[0], map[1]);
        // edge 0 joined the contracted pair and is gone
        assert!(h.edge_position(EdgeId(0)).is_none());
        assert!(h
            .edges()
            .iter()
            .all(|e| e.touches(map[0]) && e.touches(map[2])));
    }

    #[test]
    fn contract_singleton_is_identity() {
        let g = cycle(5);
        let (h, map) = g.contract(&[3]).unwrap();
        assert_eq!(map, (0..5).collect::<Vec<_>>());
        assert_eq!(h.edges(), g.edges());
    }

    #[test]
    fn contract_opposite_corners_of_square() {
        let g = cycle(4);
        let (h, _) = g.contract(&[0, 2]).unwrap();
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.total_conductance(), 4.0);
    }

    #[test]
    fn contract_empty_set_is_an_error() {
        assert!(matches!(
            cycle(3).contract(&[]),
            Err(crate::Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn delete_operations() {
        let path = Network::unit(3, [(0, 1), (1, 2)]).unwrap();
        let (h, map) = path.delete_vertices(&[1]).unwrap();
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 0);
        assert_eq!(map, vec![Some(0), None, Some(1)]);

        let (same, _) = path.delete_vertices(&[]).unwrap();
        assert_eq!(same.edges(), path.edges());
        assert_eq!(path.delete_edges(&[]).edges(), path.edges());

        let c4 = cycle(4).delete_edges(&[EdgeId(2)]);
        assert_eq!(c4.vertex_count(), 4);
        assert_eq!(c4.edge_count(), 3);
        assert!(c4.is_connected());
    }

    #[test]
    fn boundary_and_pi_on_square() {
        let g = cycle(4);
        assert_eq!(g.boundary_conductance(&[0]).unwrap(), 2.0);
        assert_eq!(g.pi_of(&[0], PiConvention::TailInSet).unwrap(), 2.0);
        assert!(g.edge_boundary(&[0, 1, 2, 3]).unwrap().is_empty());
        assert_eq!(g.boundary_conductance(&[0, 1, 2]).unwrap(), 2.0);
        assert_eq!(g.pi_of(&[0, 1, 2], PiConvention::TailInSet).unwrap(), 6.0);
        // every edge touches {0,1,2}; both orientations counted
        assert_eq!(g.pi_of(&[0, 1, 2], PiConvention::TouchesSet).unwrap(), 8.0);
        assert_eq!(g.pi_of(&[0], PiConvention::TouchesSet).unwrap(), 4.0);
    }

    #[test]
    fn bridges() {
        let g = Network::unit(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert!(!g.is_bridge(0));
        assert!(g.is_bridge(3));
        let parallel = Network::unit(2, [(0, 1), (0, 1)]).unwrap();
        assert!(!parallel.is_bridge(0));
    }

    #[test]
    fn wiring_follows_contraction() {
        let g = cycle(4).with_wired(3).unwrap();
        let (h, map) = g.contract(&[1, 3]).unwrap();
        assert_eq!(h.wired(), Some(map[1]));
        let (h, _) = g.delete_vertices(&[3]).unwrap();
        assert_eq!(h.wired(), None);
    }
}
