use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::network::{EdgeId, Network};
use crate::rng::RngStream;
use crate::sampling::forest::{Forest, RootedTree};
use crate::sampling::wilson::{WilsonSampler, WilsonWalk};

/// The free spanning forest of a finite box: the UST of the network as is.
pub fn sample_free<'n>(net: &'n Network, rng: &mut RngStream) -> Result<Forest<'n>> {
    WilsonSampler::new(net, 0).map(|mut s| s.sample(rng))
}

/// A UST of a wired network together with its wired vertex.
#[derive(Clone, Debug)]
pub struct WiredSample<'n> {
    pub tree: RootedTree,
    network: &'n Network,
}

impl<'n> WiredSample<'n> {
    pub fn wired(&self) -> usize {
        self.tree.root
    }

    pub fn forest(&self) -> Forest<'n> {
        Forest::from_mask_unchecked(self.network, self.tree.edge_mask(self.network.edge_count()))
    }

    /// Tree edges not incident to the wired vertex.
    pub fn interior_positions(&self) -> Vec<usize> {
        let w = self.wired();
        (0..self.tree.parent.len())
            .filter(|&v| v != w && self.tree.parent[v] != w)
            .map(|v| self.tree.parent_edge[v])
            .collect()
    }

    /// For every vertex, whether its component in the interior restriction
    /// is joined to the wired vertex by a tree edge. The wired vertex itself
    /// is flagged `true`.
    pub fn attached_to_wired(&self) -> Vec<bool> {
        let w = self.wired();
        let n = self.tree.parent.len();
        let mut flag = vec![false; n];
        flag[w] = true;
        // the interior component of v is the subtree of its ancestor below w
        for v in 0..n {
            if flag[v] {
                continue;
            }
            let mut path = Vec::new();
            let mut x = v;
            while !flag[x] && self.tree.parent[x] != w {
                path.push(x);
                x = self.tree.parent[x];
            }
            for p in path {
                flag[p] = true;
            }
            flag[x] = true;
        }
        flag
    }
}

/// Samples the wired law on a network with a wired vertex.
#[derive(Clone, Debug)]
pub struct WiredSampler<'n> {
    inner: WilsonSampler<'n>,
}

impl<'n> WiredSampler<'n> {
    pub fn new(net: &'n Network) -> Result<Self> {
        let w = net
            .wired()
            .ok_or_else(|| invalid("wired sampling needs a wired vertex"))?;
        Ok(WiredSampler {
            inner: WilsonSampler::new(net, w)?,
        })
    }

    pub fn sample(&mut self, rng: &mut RngStream) -> WiredSample<'n> {
        WiredSample {
            tree: self.inner.sample_rooted(rng),
            network: self.inner.network(),
        }
    }
}

pub fn sample_wired<'n>(net: &'n Network, rng: &mut RngStream) -> Result<WiredSample<'n>> {
    Ok(WiredSampler::new(net)?.sample(rng))
}

/// One draw of the law with `o` wired to the exterior, read back on the
/// original network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WsfOSample {
    /// Ids of the tree edges of the contracted network.
    pub edges: Vec<EdgeId>,
    /// Vertices of the original network joined to `o` by tree edges that
    /// avoid the wired vertex, `o` included.
    pub origin_component: Vec<usize>,
}

/// Samples the UST of `G/{o, w}` where `w` is the wired vertex of `G`.
#[derive(Clone, Debug)]
pub struct RootWiredSampler<'n> {
    original: &'n Network,
    contracted: Network,
    walk: WilsonWalk,
    origin: usize,
    /// Position in `original` of each edge of `contracted`.
    to_original: Vec<usize>,
}

impl<'n> RootWiredSampler<'n> {
    pub fn new(original: &'n Network, origin: usize) -> Result<Self> {
        let w = original
            .wired()
            .ok_or_else(|| invalid("root-wired sampling needs a wired vertex"))?;
        if origin >= original.vertex_count() || origin == w {
            return Err(invalid(format!(
                "origin {origin} must be a non-wired vertex"
            )));
        }
        let (contracted, map) = original.contract(&[origin, w])?;
        let walk = WilsonWalk::new(&contracted, map[origin])?;
        let to_original = contracted
            .edges()
            .iter()
            .map(|e| original.edge_position(e.id).expect("contraction keeps ids"))
            .collect();
        Ok(RootWiredSampler {
            original,
            contracted,
            walk,
            origin,
            to_original,
        })
    }

    pub fn contracted(&self) -> &Network {
        &self.contracted
    }

    pub fn original(&self) -> &'n Network {
        self.original
    }

    pub fn sample(&mut self, rng: &mut RngStream) -> WsfOSample {
        let mask = self.walk.sample_mask(rng);
        let mut in_tree = vec![false; self.original.edge_count()];
        let mut edges = Vec::with_capacity(self.contracted.vertex_count());
        for (p, m) in mask.iter().enumerate() {
            if *m {
                in_tree[self.to_original[p]] = true;
                edges.push(self.contracted.edge(p).id);
            }
        }
        WsfOSample {
            edges,
            origin_component: tree_component(self.original, &in_tree, self.origin),
        }
    }
}

/// Vertices reachable from `start` along edges with `in_tree[pos]`.
pub(crate) fn tree_component(net: &Network, in_tree: &[bool], start: usize) -> Vec<usize> {
    let mut seen = vec![false; net.vertex_count()];
    seen[start] = true;
    let mut out = vec![start];
    let mut head = 0;
    while head < out.len() {
        let x = out[head];
        head += 1;
        for inc in net.incident(x) {
            if in_tree[inc.edge] && !seen[inc.neighbor] {
                seen[inc.neighbor] = true;
                out.push(inc.neighbor);
            }
        }
    }
    out
}

pub fn sample_wsf_o(net: &Network, origin: usize, rng: &mut RngStream) -> Result<WsfOSample> {
    Ok(RootWiredSampler::new(net, origin)?.sample(rng))
}

/// `G/e` when `present`, `G \ e` otherwise. Edge ids are preserved, so
/// conditioning steps compose.
pub fn condition_on_edge(net: &Network, id: EdgeId, present: bool) -> Result<Network> {
    let pos = net
        .edge_position(id)
        .ok_or_else(|| invalid(format!("edge {id:?} is not in the network")))?;
    let e = *net.edge(pos);
    if present {
        Ok(net.contract(&[e.tail, e.head])?.0)
    } else {
        if net.is_bridge(pos) {
            return Err(Error::Bridge(id));
        }
        Ok(net.delete_edges(&[id]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice_box, BoundaryMode, LatticeBoxSpec};
    use crate::sampling::enumerate::enumerate_spanning_trees;

    #[test]
    fn conditioning_on_triangle() {
        let tri = Network::unit(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        let with = condition_on_edge(&tri, EdgeId(0), true).unwrap();
        assert_eq!((with.vertex_count(), with.edge_count()), (2, 2));
        let d = enumerate_spanning_trees(&with).unwrap();
        assert!((d.edge_marginal(0) - 0.5).abs() < 1e-12);
        let without = condition_on_edge(&tri, EdgeId(0), false).unwrap();
        assert_eq!(without.edge_count(), 2);
        assert!(matches!(
            condition_on_edge(&without, EdgeId(1), false),
            Err(Error::Bridge(EdgeId(1)))
        ));
    }

    #[test]
    fn wired_box_structure() {
        let b = build_lattice_box(LatticeBoxSpec::new(2, 8, BoundaryMode::Wired)).unwrap();
        let mut s = WiredSampler::new(b.network()).unwrap();
        let mut rng = RngStream::new(3, 0);
        for _ in 0..5 {
            let t = s.sample(&mut rng);
            let f = t.forest();
            assert!(f.is_spanning_tree());
            let interior = Forest::from_positions(b.network(), &t.interior_positions()).unwrap();
            assert!(interior.edge_count() < f.edge_count());
            assert!(t.attached_to_wired().iter().all(|x| *x));
        }
        let line = build_lattice_box(LatticeBoxSpec::new(1, 1, BoundaryMode::Wired)).unwrap();
        let t = sample_wired(line.network(), &mut rng).unwrap();
        assert!(t.attached_to_wired().iter().all(|x| *x));
    }

    #[test]
    fn wired_triangle_is_a_relabelled_ust() {
        let tri = Network::unit(3, [(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .with_wired(2)
            .unwrap();
        let mut rng = RngStream::new(4, 0);
        let n = 30_000;
        let mut count = [0usize; 3];
        for _ in 0..n {
            let f = sample_wired(&tri, &mut rng).unwrap().forest();
            for p in 0..3 {
                count[p] += usize::from(f.contains(p));
            }
        }
        for c in count {
            let p = c as f64 / n as f64;
            assert!((p - 2.0 / 3.0).abs() < 5.0 * (2.0 / 9.0 / n as f64).sqrt());
        }
    }

    #[test]
    fn wsf_o_component() {
        let b = build_lattice_box(LatticeBoxSpec::new(1, 5, BoundaryMode::Wired)).unwrap();
        let w = b.wired().unwrap();
        let mut s = RootWiredSampler::new(b.network(), b.origin()).unwrap();
        let mut rng = RngStream::new(9, 0);
        for _ in 0..20 {
            let x = s.sample(&mut rng);
            assert_eq!(x.edges.len(), s.contracted().vertex_count() - 1);
            assert!(x.origin_component.contains(&b.origin()));
            assert!(!x.origin_component.contains(&w));
        }
        assert!(RootWiredSampler::new(b.network(), w).is_err());
    }
}
