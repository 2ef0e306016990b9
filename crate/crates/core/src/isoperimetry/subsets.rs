use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::network::Network;

/// Default limit on the vertex count for exhaustive subset searches.
pub const DEFAULT_VERTEX_CAP: usize = 16;

/// Neighbour masks of a network with at most 64 vertices.
pub(crate) fn neighbour_masks(net: &Network, cap: usize) -> Result<Vec<u64>> {
    let n = net.vertex_count();
    if n > cap.min(64) {
        return Err(Error::ResourceLimit {
            what: "vertices for exhaustive subset search",
            requested: n,
            limit: cap.min(64),
        });
    }
    let mut nb = vec![0u64; n];
    for e in net.edges() {
        nb[e.tail] |= 1 << e.head;
        nb[e.head] |= 1 << e.tail;
    }
    Ok(nb)
}

/// Calls `visit` once for every nonempty connected vertex set inside
/// `allowed`. Sets are extended only by vertices larger than their smallest
/// member and outside the current neighbourhood, so each set is produced
/// exactly once.
pub(crate) fn for_each_connected(nb: &[u64], allowed: u64, mut visit: impl FnMut(u64)) {
    for v in 0..nb.len() {
        if allowed >> v & 1 == 0 {
            continue;
        }
        let above = allowed & !((2u64 << v) - 1);
        let ext = nb[v] & above;
        extend(nb, above, 1 << v, ext, nb[v] | 1 << v, &mut visit);
    }
}

fn extend(
    nb: &[u64],
    above: u64,
    set: u64,
    mut ext: u64,
    closed: u64,
    visit: &mut impl FnMut(u64),
) {
    visit(set);
    while ext != 0 {
        let w = ext.trailing_zeros() as usize;
        ext &= ext - 1;
        let fresh = nb[w] & above & !closed;
        extend(nb, above, set | 1 << w, ext | fresh, closed | nb[w], visit);
    }
}

pub(crate) fn mask_of(set: &[usize], n: usize) -> Result<u64> {
    let mut m = 0u64;
    for &v in set {
        if v >= n {
            return Err(invalid(format!("vertex {v} out of range")));
        }
        m |= 1 << v;
    }
    Ok(m)
}

pub(crate) fn mask_vertices(mask: u64) -> Vec<usize> {
    (0..64).filter(|&v| mask >> v & 1 == 1).collect()
}

/// `|boundary(K)|_c` and `pi(K)` for a vertex mask.
pub(crate) fn boundary_and_pi(net: &Network, mask: u64) -> (f64, f64) {
    let mut boundary = 0.0;
    let mut pi = 0.0;
    for e in net.edges() {
        let (a, b) = (mask >> e.tail & 1 == 1, mask >> e.head & 1 == 1);
        if a != b {
            boundary += e.conductance;
            pi += e.conductance;
        } else if a {
            pi += 2.0 * e.conductance;
        }
    }
    (boundary, pi)
}
