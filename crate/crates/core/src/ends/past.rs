use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{invalid, Result};
use crate::network::Network;
use crate::sampling::RootedTree;

/// The past of a vertex in a wired spanning tree.
#[derive(Clone, Debug, PartialEq)]
pub struct PastSummary {
    /// The past `Q`: vertices of the finite components of `T \ x`.
    pub vertices: Vec<usize>,
    /// Euclidean diameter of `Q`, 0 when `Q` is empty.
    pub euclidean_diameter: f64,
    /// Sup-norm diameter of `Q`.
    pub sup_diameter: f64,
    /// Largest tree distance within a component of `Q`.
    pub graph_diameter: usize,
    /// Whether `Q` contains a vertex adjacent to the wired vertex, i.e. the
    /// truncation may have cut `Q` short.
    pub reached_boundary: bool,
}

/// Past of `x` in a spanning tree rooted at the wired vertex.
///
/// Removing `x` splits the tree into the part containing the root, which
/// stands for the infinite direction, and the subtrees of the children of
/// `x`. The past is the union of the latter.
pub fn past_of(net: &Network, tree: &RootedTree, x: usize) -> Result<PastSummary> {
    let w = net
        .wired()
        .ok_or_else(|| invalid("past_of needs a wired network"))?;
    if x >= net.vertex_count() || x == w {
        return Err(invalid("past_of needs a non-wired vertex"));
    }
    if tree.root != w || tree.parent.len() != net.vertex_count() {
        return Err(invalid(
            "tree must be a spanning tree rooted at the wired vertex",
        ));
    }
    let vertices = tree.descendants(x);
    let reached_boundary = vertices
        .iter()
        .any(|&v| net.incident(v).iter().any(|i| i.neighbor == w));
    let graph_diameter = tree_diameter(tree, &vertices, x);
    let (euclidean_diameter, sup_diameter) = match net.embedding() {
        Some(emb) if !vertices.is_empty() => {
            let d = emb.dim();
            let mut pts = Vec::with_capacity(vertices.len() * d);
            for &v in &vertices {
                let p = emb
                    .point(v)
                    .ok_or_else(|| invalid("past contains a vertex without coordinates"))?;
                pts.extend_from_slice(p);
            }
            (euclidean_diameter(&pts, d), sup_diameter(&pts, d))
        }
        _ => (0.0, 0.0),
    };
    Ok(PastSummary {
        vertices,
        euclidean_diameter,
        sup_diameter,
        graph_diameter,
        reached_boundary,
    })
}

/// Diameter in the tree metric of the subtree `past` (all descendants of
/// `x`), measured within `past` only.
fn tree_diameter(tree: &RootedTree, past: &[usize], x: usize) -> usize {
    if past.len() <= 1 {
        return 0;
    }
    // the two deepest branches below each vertex; subtrees of different
    // children of x are separate components and are never joined
    let n = tree.parent.len();
    let mut best = vec![0usize; n];
    let mut second = vec![0usize; n];
    let mut diameter = 0;
    // descendants are in BFS order, so reversing visits children first
    for &v in past.iter().rev() {
        diameter = diameter.max(best[v] + second[v]);
        let p = tree.parent[v];
        if p == x {
            continue;
        }
        let h = best[v] + 1;
        if h > best[p] {
            second[p] = best[p];
            best[p] = h;
        } else if h > second[p] {
            second[p] = h;
        }
    }
    diameter
}

fn sup_diameter(pts: &[f64], d: usize) -> f64 {
    (0..d)
        .map(|a| {
            let (lo, hi) = pts
                .iter()
                .skip(a)
                .step_by(d)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| {
                    (l.min(x), h.max(x))
                });
            hi - lo
        })
        .fold(0.0, f64::max)
}

/// Exact Euclidean diameter of a point cloud (flat, `d` coordinates each).
///
/// Along any axis-parallel line the farthest point of a collinear group from
/// any fixed point is one of the group's two ends, so interior points of
/// every fibre can be dropped before the quadratic pass.
pub fn euclidean_diameter(pts: &[f64], d: usize) -> f64 {
    let n = pts.len().checked_div(d).unwrap_or(0);
    if n < 2 {
        return 0.0;
    }
    let mut keep: Vec<usize> = (0..n).collect();
    if n > 64 {
        for axis in 0..d {
            keep = fibre_extremes(pts, d, keep, axis);
        }
    }
    let mut best = 0.0f64;
    for (i, &a) in keep.iter().enumerate() {
        let pa = &pts[a * d..(a + 1) * d];
        for &b in &keep[i + 1..] {
            let pb = &pts[b * d..(b + 1) * d];
            let s: f64 = pa.iter().zip(pb).map(|(x, y)| (x - y) * (x - y)).sum();
            best = best.max(s);
        }
    }
    libm::sqrt(best)
}

fn fibre_extremes(pts: &[f64], d: usize, mut idx: Vec<usize>, axis: usize) -> Vec<usize> {
    let key = |i: usize, j: usize| -> Ordering {
        for a in (0..d).filter(|&a| a != axis) {
            match pts[i * d + a].total_cmp(&pts[j * d + a]) {
                Ordering::Equal => {}
                o => return o,
            }
        }
        Ordering::Equal
    };
    idx.sort_by(|&i, &j| key(i, j).then(pts[i * d + axis].total_cmp(&pts[j * d + axis])));
    let mut out = Vec::new();
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && key(idx[start], idx[end]) == Ordering::Equal {
            end += 1;
        }
        out.push(idx[start]);
        if end - start > 1 {
            out.push(idx[end - 1]);
        }
        start = end;
    }
    out
}
