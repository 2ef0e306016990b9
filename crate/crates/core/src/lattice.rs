//! Nearest-neighbour boxes `B_r = {z in Z^d : |z|_inf <= r}` with free or
//! wired boundary.
//!
//! Vertices are numbered lexicographically by coordinates (first coordinate
//! most significant). In the wired modes the exterior is a single extra
//! vertex numbered last, so every wired box is reproducible bit-for-bit.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::network::{Edge, EdgeId, Embedding, Network};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMode {
    Free,
    /// All exterior neighbours collapse onto one wired vertex; edge
    /// multiplicities are kept.
    Wired,
    /// Wired, and the origin is additionally identified with the wired
    /// vertex.
    WiredWithRoot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeBoxSpec {
    pub dim: usize,
    pub radius: usize,
    pub boundary: BoundaryMode,
    /// Upper bound on the number of vertices the builder will allocate.
    pub max_vertices: usize,
}

impl LatticeBoxSpec {
    pub const DEFAULT_MAX_VERTICES: usize = 1 << 26;

    pub fn new(dim: usize, radius: usize, boundary: BoundaryMode) -> Self {
        LatticeBoxSpec {
            dim,
            radius,
            boundary,
            max_vertices: Self::DEFAULT_MAX_VERTICES,
        }
    }

    pub fn side(&self) -> usize {
        2 * self.radius + 1
    }

    /// `(2r+1)^d`, or `None` on overflow.
    pub fn interior_count(&self) -> Option<usize> {
        let mut n: usize = 1;
        for _ in 0..self.dim {
            n = n.checked_mul(self.side())?;
        }
        Some(n)
    }
}

/// A lattice box together with its coordinate bookkeeping.
#[derive(Clone, Debug)]
pub struct LatticeBox {
    spec: LatticeBoxSpec,
    network: Network,
    interior: usize,
}

impl LatticeBox {
    pub fn spec(&self) -> &LatticeBoxSpec {
        &self.spec
    }

    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn into_network(self) -> Network {
        self.network
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn radius(&self) -> usize {
        self.spec.radius
    }

    /// Number of lattice points `(2r+1)^d`.
    pub fn interior_count(&self) -> usize {
        self.interior
    }

    pub fn wired(&self) -> Option<usize> {
        self.network.wired()
    }

    pub fn origin(&self) -> usize {
        self.interior / 2
    }

    /// Vertex index of a lattice point, if it lies in the box.
    pub fn index_of(&self, point: &[i64]) -> Option<usize> {
        if point.len() != self.spec.dim {
            return None;
        }
        let r = self.spec.radius as i64;
        let side = self.spec.side();
        let mut idx = 0usize;
        for &x in point {
            if x < -r || x > r {
                return None;
            }
            idx = idx * side + (x + r) as usize;
        }
        Some(idx)
    }

    /// Lattice coordinates of vertex `v`; `None` for the wired vertex.
    pub fn coords(&self, v: usize) -> Option<Vec<i64>> {
        let mut out = vec![0; self.spec.dim];
        self.write_coords(v, &mut out).then_some(out)
    }

    /// Allocation-free variant of [`coords`](Self::coords).
    pub fn write_coords(&self, v: usize, out: &mut [i64]) -> bool {
        if v >= self.interior {
            return false;
        }
        let side = self.spec.side();
        let r = self.spec.radius as i64;
        let mut rest = v;
        for slot in out.iter_mut().rev() {
            *slot = (rest % side) as i64 - r;
            rest /= side;
        }
        true
    }

    pub fn sup_norm(&self, v: usize) -> Option<usize> {
        let mut buf = vec![0; self.spec.dim];
        self.write_coords(v, &mut buf).then(|| {
            buf.iter()
                .map(|x| x.unsigned_abs() as usize)
                .max()
                .unwrap_or(0)
        })
    }

    /// Vertices of `B_s`, in index order.
    pub fn ball(&self, s: usize) -> Vec<usize> {
        (0..self.interior)
            .filter(|&v| self.sup_norm(v).is_some_and(|n| n <= s))
            .collect()
    }

    /// Vertices with `|z|_inf == s`.
    pub fn sphere(&self, s: usize) -> Vec<usize> {
        (0..self.interior)
            .filter(|&v| self.sup_norm(v) == Some(s))
            .collect()
    }
}

/// Builds the box described by `spec`.
pub fn build_lattice_box(spec: LatticeBoxSpec) -> Result<LatticeBox> {
    if spec.dim == 0 || spec.radius == 0 {
        return Err(invalid("lattice box needs dim >= 1 and radius >= 1"));
    }
    let interior = spec.interior_count().ok_or(Error::ResourceLimit {
        what: "lattice box vertices",
        requested: usize::MAX,
        limit: spec.max_vertices,
    })?;
    let wired = spec.boundary != BoundaryMode::Free;
    let total = interior + usize::from(wired);
    if total > spec.max_vertices {
        return Err(Error::ResourceLimit {
            what: "lattice box vertices",
            requested: total,
            limit: spec.max_vertices,
        });
    }

    let d = spec.dim;
    let r = spec.radius as i64;
    let side = spec.side();
    let mut strides = vec![1usize; d];
    for a in (0..d.saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * side;
    }
    let w = interior;

    let per_vertex = if wired { 2 * d } else { d };
    let mut edges = Vec::with_capacity(interior * per_vertex);
    let push = |edges: &mut Vec<Edge>, tail: usize, head: usize| {
        let id = EdgeId(edges.len() as u32);
        edges.push(Edge {
            id,
            tail,
            head,
            conductance: 1.0,
        });
    };

    let mut coord = vec![-r; d];
    let mut embedding = Embedding::new(d, total);
    let mut point = vec![0.0; d];
    for v in 0..interior {
        for (p, &c) in point.iter_mut().zip(&coord) {
            *p = c as f64;
        }
        embedding.set(v, &point);
        for a in 0..d {
            if wired && coord[a] == -r {
                push(&mut edges, v, w);
            }
            if coord[a] < r {
                push(&mut edges, v, v + strides[a]);
            }
            if wired && coord[a] == r {
                push(&mut edges, v, w);
            }
        }
        // odometer increment, last coordinate fastest
        for a in (0..d).rev() {
            if coord[a] < r {
                coord[a] += 1;
                break;
            }
            coord[a] = -r;
        }
    }
    if edges.len() > u32::MAX as usize {
        return Err(Error::ResourceLimit {
            what: "lattice box edges",
            requested: edges.len(),
            limit: u32::MAX as usize,
        });
    }

    let mut network = Network::from_edges(total, edges)?.with_embedding(embedding)?;
    if wired {
        network = network.with_wired(w)?;
    }
    if spec.boundary == BoundaryMode::WiredWithRoot {
        let origin = interior / 2;
        let (merged, map) = network.contract(&[origin, w])?;
        debug_assert!((0..interior).all(|v| map[v] == v));
        network = merged;
    }
    if network.vertex_count() != total - usize::from(spec.boundary == BoundaryMode::WiredWithRoot) {
        return Err(invalid(format!(
            "lattice builder produced {} vertices",
            network.vertex_count()
        )));
    }
    Ok(LatticeBox {
        spec,
        network,
        interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pow(b: usize, e: usize) -> usize {
        (0..e).fold(1, |acc, _| acc * b)
    }

    #[test]
    fn small_boxes() {
        let b = build_lattice_box(LatticeBoxSpec::new(1, 1, BoundaryMode::Free)).unwrap();
        assert_eq!(b.network().vertex_count(), 3);
        assert_eq!(b.network().edge_count(), 2);

        let b = build_lattice_box(LatticeBoxSpec::new(2, 1, BoundaryMode::Wired)).unwrap();
        let w = b.wired().unwrap();
        assert_eq!(b.network().vertex_count(), 10);
        let boundary = b.network().edges().iter().filter(|e| e.touches(w)).count();
        assert_eq!(boundary, 12);
        assert_eq!(b.network().edge_count() - boundary, 12);

        let b = build_lattice_box(LatticeBoxSpec::new(2, 1, BoundaryMode::WiredWithRoot)).unwrap();
        assert_eq!(b.network().vertex_count(), 9);
        assert_eq!(b.wired(), Some(b.origin()));
        // the origin is not adjacent to the exterior, so no loops appear
        assert_eq!(b.network().edge_count(), 24);
    }

    #[test]
    fn counts_match_closed_forms() {
        for d in 1..=3 {
            for r in 1..=4 {
                for mode in [
                    BoundaryMode::Free,
                    BoundaryMode::Wired,
                    BoundaryMode::WiredWithRoot,
                ] {
                    let b = build_lattice_box(LatticeBoxSpec::new(d, r, mode)).unwrap();
                    let side = 2 * r + 1;
                    let n = pow(side, d);
                    let inner_edges = d * pow(side, d - 1) * (side - 1);
                    let outer_edges = 2 * d * pow(side, d - 1);
                    let (nv, ne) = match mode {
                        BoundaryMode::Free => (n, inner_edges),
                        BoundaryMode::Wired => (n + 1, inner_edges + outer_edges),
                        BoundaryMode::WiredWithRoot => (n, inner_edges + outer_edges),
                    };
                    assert_eq!(b.network().vertex_count(), nv, "d={d} r={r} {mode:?}");
                    assert_eq!(b.network().edge_count(), ne, "d={d} r={r} {mode:?}");
                }
            }
        }
    }

    #[test]
    fn coordinates_round_trip() {
        let b = build_lattice_box(LatticeBoxSpec::new(3, 2, BoundaryMode::Wired)).unwrap();
        for v in 0..b.interior_count() {
            let c = b.coords(v).unwrap();
            assert_eq!(b.index_of(&c), Some(v));
            let p = b.network().point(v).unwrap();
            assert!(p.iter().zip(&c).all(|(x, y)| *x == *y as f64));
        }
        assert_eq!(b.coords(b.origin()).unwrap(), vec![0, 0, 0]);
        assert!(b.coords(b.wired().unwrap()).is_none());
        assert_eq!(b.sphere(2).len(), 125 - 27);
    }

    #[test]
    fn vertex_limit() {
        let mut spec = LatticeBoxSpec::new(3, 10, BoundaryMode::Wired);
        spec.max_vertices = 1000;
        assert!(matches!(
            build_lattice_box(spec),
            Err(Error::ResourceLimit { .. })
        ));
    }

    #[test]
    fn pi_is_two_d_in_wired_box() {
        let b = build_lattice_box(LatticeBoxSpec::new(3, 2, BoundaryMode::Wired)).unwrap();
        for v in 0..b.interior_count() {
            assert_eq!(b.network().pi(v), 6.0);
        }
    }
}
