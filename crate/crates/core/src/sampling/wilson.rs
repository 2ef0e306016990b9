use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::network::Network;
use crate::rng::RngStream;
use crate::sampling::forest::{Forest, RootedTree};

/// Wilson's algorithm on a fixed network and root. Holds a flat copy of the
/// adjacency so the random-walk inner loop touches only two arrays, and
/// reuses its work buffers across samples.
#[derive(Clone, Debug)]
pub struct WilsonSampler<'n> {
    network: &'n Network,
    walk: WilsonWalk,
}

/// The network-independent part of the sampler.
#[derive(Clone, Debug)]
pub(crate) struct WilsonWalk {
    root: usize,
    edge_count: usize,
    offsets: Vec<usize>,
    neighbor: Vec<u32>,
    edge: Vec<u32>,
    /// Cumulative conductance within each vertex's incidence list.
    cumulative: Vec<f64>,
    /// Whether all edges at a vertex have the same conductance.
    uniform: Vec<bool>,
    in_tree: Vec<bool>,
    next: Vec<u32>,
    next_edge: Vec<u32>,
    steps: u64,
}

impl<'n> WilsonSampler<'n> {
    pub fn new(network: &'n Network, root: usize) -> Result<Self> {
        Ok(WilsonSampler {
            network,
            walk: WilsonWalk::new(network, root)?,
        })
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn root(&self) -> usize {
        self.walk.root
    }

    /// Random-walk steps taken by the most recent sample.
    pub fn last_steps(&self) -> u64 {
        self.walk.steps
    }

    /// One weighted uniform spanning tree as parent pointers to the root.
    pub fn sample_rooted(&mut self, rng: &mut RngStream) -> RootedTree {
        self.walk.sample_rooted(rng)
    }

    pub fn sample(&mut self, rng: &mut RngStream) -> Forest<'n> {
        Forest::from_mask_unchecked(self.network, self.walk.sample_mask(rng))
    }
}

impl WilsonWalk {
    pub fn new(network: &Network, root: usize) -> Result<Self> {
        let n = network.vertex_count();
        if root >= n {
            return Err(invalid("root out of range"));
        }
        if n > u32::MAX as usize || network.edge_count() > u32::MAX as usize {
            return Err(Error::ResourceLimit {
                what: "sampler vertices",
                requested: n,
                limit: u32::MAX as usize,
            });
        }
        let (labels, _) = network.components();
        if let Some(v) = (0..n).find(|&v| labels[v] != labels[root]) {
            return Err(Error::Disconnected {
                vertex: v,
                from: root,
            });
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbor = Vec::new();
        let mut edge = Vec::new();
        let mut cumulative = Vec::new();
        let mut uniform = Vec::with_capacity(n);
        offsets.push(0);
        for v in 0..n {
            let mut acc = 0.0;
            let incident = network.incident(v);
            let first = incident.first().map(|i| network.edge(i.edge).conductance);
            let mut same = true;
            for inc in incident {
                let c = network.edge(inc.edge).conductance;
                same &= Some(c) == first;
                acc += c;
                neighbor.push(inc.neighbor as u32);
                edge.push(inc.edge as u32);
                cumulative.push(acc);
            }
            uniform.push(same);
            offsets.push(neighbor.len());
        }
        Ok(WilsonWalk {
            root,
            edge_count: network.edge_count(),
            offsets,
            neighbor,
            edge,
            cumulative,
            uniform,
            in_tree: vec![false; n],
            next: vec![u32::MAX; n],
            next_edge: vec![u32::MAX; n],
            steps: 0,
        })
    }

    #[inline]
    fn step(&self, v: usize, rng: &mut RngStream) -> usize {
        let (lo, hi) = (self.offsets[v], self.offsets[v + 1]);
        if self.uniform[v] {
            lo + rng.below(hi - lo)
        } else {
            let total = self.cumulative[hi - 1];
            let u = rng.uniform() * total;
            let k = self.cumulative[lo..hi].partition_point(|&c| c <= u);
            lo + k.min(hi - lo - 1)
        }
    }

    /// Runs the algorithm, leaving `next`/`next_edge` as parent pointers.
    fn run(&mut self, rng: &mut RngStream) {
        let n = self.in_tree.len();
        self.in_tree.iter_mut().for_each(|b| *b = false);
        self.in_tree[self.root] = true;
        self.next[self.root] = u32::MAX;
        self.next_edge[self.root] = u32::MAX;
        let mut steps = 0u64;
        for start in 0..n {
            // walk until the current tree is hit; overwriting `next` erases loops
            let mut u = start;
            while !self.in_tree[u] {
                let k = self.step(u, rng);
                self.next[u] = self.neighbor[k];
                self.next_edge[u] = self.edge[k];
                u = self.neighbor[k] as usize;
                steps += 1;
            }
            let mut u = start;
            while !self.in_tree[u] {
                self.in_tree[u] = true;
                u = self.next[u] as usize;
            }
        }
        self.steps = steps;
    }

    pub fn sample_rooted(&mut self, rng: &mut RngStream) -> RootedTree {
        self.run(rng);
        let widen = |x: u32| {
            if x == u32::MAX {
                usize::MAX
            } else {
                x as usize
            }
        };
        RootedTree {
            root: self.root,
            parent: self.next.iter().map(|&x| widen(x)).collect(),
            parent_edge: self.next_edge.iter().map(|&x| widen(x)).collect(),
        }
    }

    pub fn sample_mask(&mut self, rng: &mut RngStream) -> Vec<bool> {
        self.run(rng);
        let mut mask = vec![false; self.edge_count];
        for (v, &e) in self.next_edge.iter().enumerate() {
            if v != self.root {
                mask[e as usize] = true;
            }
        }
        mask
    }
}

/// Convenience wrapper: one UST sample of `network` via Wilson's algorithm.
pub fn wilson_ust<'n>(
    network: &'n Network,
    root: usize,
    rng: &mut RngStream,
) -> Result<Forest<'n>> {
    Ok(WilsonSampler::new(network, root)?.sample(rng))
}
