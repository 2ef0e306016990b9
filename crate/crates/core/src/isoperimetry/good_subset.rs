use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::isoperimetry::profile::{profile_table, BoundaryVariant, StepProfile};
use crate::isoperimetry::subsets::{for_each_connected, mask_of, mask_vertices, neighbour_masks};
use crate::network::Network;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GoodSubsetOptions {
    pub cap: usize,
    /// Complements up to this size are checked exhaustively.
    pub exhaustive_limit: usize,
    /// Random sets `U` checked when the complement is larger.
    pub samples: usize,
    pub seed: u64,
}

impl Default for GoodSubsetOptions {
    fn default() -> Self {
        GoodSubsetOptions {
            cap: super::DEFAULT_VERTEX_CAP,
            exhaustive_limit: 16,
            samples: 4096,
            seed: 0,
        }
    }
}

/// Check of `|boundary' U|_c >= |boundary U|_c / 2` for sets `U` outside
/// `W(K)`, where `boundary'` is taken in `G \ W(K)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certificate {
    pub checked: usize,
    pub exhaustive: bool,
    /// Smallest observed `|boundary' U| / |boundary U|`.
    pub worst_ratio: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodSubset {
    /// `W(K)`, sorted.
    pub vertices: Vec<usize>,
    pub boundary: f64,
    pub certificate: Certificate,
}

/// `W(K)`: a connected set containing `K` and its outer vertex boundary with
/// least boundary conductance, among sets avoiding the wired vertex. Ties go
/// to fewer vertices, then to the lexicographically smaller vertex list.
pub fn good_subset(net: &Network, k: &[usize], opts: &GoodSubsetOptions) -> Result<GoodSubset> {
    let w = net
        .wired()
        .ok_or_else(|| invalid("good subsets are taken in a wired network"))?;
    let n = net.vertex_count();
    let nb = neighbour_masks(net, opts.cap)?;
    let km = mask_of(k, n)?;
    if km == 0 {
        return Err(invalid("K must be nonempty"));
    }
    if !is_connected_mask(&nb, km) {
        return Err(invalid("K must be connected"));
    }
    let mut closure = km;
    for v in mask_vertices(km) {
        closure |= nb[v];
    }
    if closure >> w & 1 == 1 {
        return Err(invalid(
            "K or its vertex boundary contains the wired vertex",
        ));
    }
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let allowed = all & !(1 << w);
    let mut best: Option<(f64, u64)> = None;
    for_each_connected(&nb, allowed, |l| {
        if l & closure != closure {
            return;
        }
        let b = boundary(net, l);
        let better = match best {
            None => true,
            Some((bb, bl)) => {
                b < bb
                    || (b == bb
                        && (l.count_ones() < bl.count_ones()
                            || (l.count_ones() == bl.count_ones() && lex_less(l, bl))))
            }
        };
        if better {
            best = Some((b, l));
        }
    });
    let (b, wm) = best.expect("the closure itself is a candidate");
    let certificate = certify(net, wm, allowed & !wm, b, opts);
    Ok(GoodSubset {
        vertices: mask_vertices(wm),
        boundary: b,
        certificate,
    })
}

fn is_connected_mask(nb: &[u64], m: u64) -> bool {
    let mut seen = 1u64 << m.trailing_zeros();
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = nb[v] & m & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == m
}

/// Lexicographic order of the sorted vertex lists of two masks of equal size.
fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && a >> diff.trailing_zeros() & 1 == 1
}

fn boundary(net: &Network, m: u64) -> f64 {
    net.edges()
        .iter()
        .filter(|e| (m >> e.tail & 1) != (m >> e.head & 1))
        .map(|e| e.conductance)
        .sum()
}

fn certify(
    net: &Network,
    wm: u64,
    outside: u64,
    w_boundary: f64,
    opts: &GoodSubsetOptions,
) -> Certificate {
    let free = mask_vertices(outside);
    let mut worst = f64::INFINITY;
    let mut holds = true;
    let mut checked = 0;
    let mut check = |u: u64| {
        let (mut full, mut kept) = (0.0, 0.0);
        for e in net.edges() {
            let (a, b) = (u >> e.tail & 1 == 1, u >> e.head & 1 == 1);
            if a == b {
                continue;
            }
            full += e.conductance;
            let other = if a { e.head } else { e.tail };
            if wm >> other & 1 == 0 {
                kept += e.conductance;
            }
        }
        checked += 1;
        if full > 0.0 {
            worst = worst.min(kept / full);
            // rounding slack scaled to the sums involved
            if 2.0 * kept < full - 1e-9 * (full + w_boundary) {
                holds = false;
            }
        }
    };
    let exhaustive = free.len() <= opts.exhaustive_limit;
    if exhaustive {
        for bits in 1u64..(1u64 << free.len()) {
            check(scatter(bits, &free));
        }
    } else {
        let mut rng = RngStream::new(opts.seed, 0);
        for &v in &free {
            check(1 << v);
        }
        for _ in 0..opts.samples {
            let mut u = 0;
            for &v in &free {
                if rng.uniform() < 0.5 {
                    u |= 1 << v;
                }
            }
            if u != 0 {
                check(u);
            }
        }
    }
    Certificate {
        checked,
        exhaustive,
        worst_ratio: worst,
        holds,
    }
}

fn scatter(bits: u64, onto: &[usize]) -> u64 {
    onto.iter()
        .enumerate()
        .filter(|(i, _)| bits >> i & 1 == 1)
        .fold(0, |m, (_, &v)| m | 1 << v)
}

/// Comparison of `kappa(G \ W, t)` with `kappa(G, t) / 2`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfInequality {
    pub whole: StepProfile,
    pub reduced: StepProfile,
    /// Break points at which both profiles were compared.
    pub points: usize,
    /// Smallest `kappa(G \ W, t) / kappa(G, t)` over the break points.
    pub worst_ratio: f64,
    pub holds: bool,
}

/// Checks `kappa(G \ W, t) >= kappa(G, t) / 2` for every `t` by comparing
/// both exact step profiles at all of their break points.
pub fn half_inequality(net: &Network, w_set: &[usize], cap: usize) -> Result<HalfInequality> {
    let wired = net
        .wired()
        .ok_or_else(|| invalid("the comparison is made in a wired network"))?;
    if w_set.contains(&wired) {
        return Err(invalid("W contains the wired vertex"));
    }
    let whole = profile_table(net, &[], BoundaryVariant::Edge, cap)?;
    let (reduced_net, _) = net.delete_vertices(w_set)?;
    let reduced = profile_table(&reduced_net, &[], BoundaryVariant::Edge, cap)?;
    let mut ts: Vec<f64> = whole
        .breaks()
        .iter()
        .chain(reduced.breaks())
        .copied()
        .collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    let mut worst = f64::INFINITY;
    let mut holds = true;
    for &t in &ts {
        let (g, r) = (whole.eval(t), reduced.eval(t));
        if r == f64::INFINITY {
            continue;
        }
        if g == f64::INFINITY {
            return Err(Error::Inconsistent(format!(
                "reduced profile finite at t = {t} where the full one is not"
            )));
        }
        worst = worst.min(r / g);
        if 2.0 * r < g * (1.0 - 1e-12) {
            holds = false;
        }
    }
    Ok(HalfInequality {
        whole,
        reduced,
        points: ts.len(),
        worst_ratio: worst,
        holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Unit 4-cycle 0-1-2-3 with a pendant path 2-4 and wired vertex 5
    /// attached to 4 and 3.
    fn ring() -> Network {
        Network::unit(6, [(0, 1), (1, 2), (2, 3), (3, 0), (2, 4), (4, 5), (3, 5)])
            .unwrap()
            .with_wired(5)
            .unwrap()
    }

    #[test]
    fn single_vertex_in_ring() {
        let g = ring();
        let r = good_subset(&g, &[0], &GoodSubsetOptions::default()).unwrap();
        // closure {0,1,3}: boundary 1-2, 3-2, 3-5 = 3; adding 2 gives 2-4, 3-5
        assert_eq!(r.vertices, vec![0, 1, 2, 3]);
        assert_eq!(r.boundary, 2.0);
        assert!(r.certificate.exhaustive && r.certificate.holds);
        assert_eq!(r.certificate.checked, 1);
        let h = half_inequality(&g, &r.vertices, 16).unwrap();
        assert!(h.holds, "{h:?}");
    }

    #[test]
    fn rejects_bad_k() {
        let g = ring();
        let o = GoodSubsetOptions::default();
        assert!(good_subset(&g, &[3], &o).is_err());
        assert!(good_subset(&g, &[0, 2], &o).is_err());
        assert!(good_subset(&g, &[], &o).is_err());
        let plain = Network::unit(2, [(0, 1)]).unwrap();
        assert!(good_subset(&plain, &[0], &o).is_err());
    }

    #[test]
    fn lexicographic_ties() {
        assert!(lex_less(0b0011, 0b0101));
        assert!(!lex_less(0b0101, 0b0011));
        assert!(!lex_less(0b0101, 0b0101));
    }

    #[test]
    fn certificate_detects_non_minimal_sets() {
        // W = {0} in a star whose leaves only reach w through one edge each:
        // U = {1,2,3} has all three edges into W
        let g = Network::unit(5, [(0, 1), (0, 2), (0, 3), (1, 4)])
            .unwrap()
            .with_wired(4)
            .unwrap();
        let c = certify(&g, 0b0001, 0b1110, 3.0, &GoodSubsetOptions::default());
        assert!(!c.holds);
        assert_eq!(c.worst_ratio, 0.0);
    }
}
