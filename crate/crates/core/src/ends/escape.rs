use alloc::format;
use alloc::vec;

use crate::electrical::{solve_dirichlet, Fixed, SolveOptions};
use crate::error::{invalid, Result};
use crate::network::{EdgeId, Network};

/// Exact conditional inclusion probability of an edge leaving the explored
/// set, together with the two elementary bounds on it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EscapeReport {
    /// `c(e) / EC(v, S + wired; H)` with `H = G \ removed`.
    pub probability: f64,
    /// `c(e) / pi_H(v)`; at least `1/(2d)` on a unit lattice.
    pub lower_bound: f64,
    /// `EC(v, wired; H \ S)`.
    pub alpha: f64,
    /// `c(e) / (c(e) + alpha)`.
    pub upper_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Checks `c/pi_H(v) <= P[e in F] <= c/(c + alpha)` for the edge `e = uv`
/// with `u` in `s` and `v` outside, in the network with `removed` deleted
/// and `s` wired together with the exterior.
pub fn escape_probability_bound_check(
    net: &Network,
    s: &[usize],
    removed: &[EdgeId],
    e: EdgeId,
    opts: &SolveOptions,
) -> Result<EscapeReport> {
    let w = net
        .wired()
        .ok_or_else(|| invalid("escape check needs a wired network"))?;
    let in_s = net.membership(s)?;
    if in_s[w] {
        return Err(invalid("explored set contains the wired vertex"));
    }
    let pos = net
        .edge_position(e)
        .ok_or_else(|| invalid(format!("edge {e:?} is not in the network")))?;
    let edge = *net.edge(pos);
    let v = match (in_s[edge.tail], in_s[edge.head]) {
        (true, false) => edge.head,
        (false, true) => edge.tail,
        _ => return Err(invalid("edge must have exactly one endpoint in the set")),
    };
    if v == w {
        return Err(invalid("edge must not lead to the wired vertex"));
    }
    let mut alive = vec![true; net.edge_count()];
    for id in removed {
        if let Some(p) = net.edge_position(*id) {
            alive[p] = false;
        }
    }
    if !alive[pos] {
        return Err(invalid("edge is among the removed edges"));
    }
    let opts = opts.ignoring_isolated();
    let c = edge.conductance;

    let mut fixed = vec![Fixed::Free; net.vertex_count()];
    for &x in s {
        fixed[x] = Fixed::Zero;
    }
    fixed[w] = Fixed::Zero;
    fixed[v] = Fixed::One;
    let ec = solve_dirichlet(net, Some(&alive), &fixed, &opts)?.energy;
    let probability = (c / ec).min(1.0);

    let pi_h: f64 = net
        .incident(v)
        .iter()
        .filter(|i| alive[i.edge])
        .map(|i| net.edge(i.edge).conductance)
        .sum();
    let lower_bound = c / pi_h;

    // H \ S: drop every edge touching S
    let mut outside = alive.clone();
    for (p, ed) in net.edges().iter().enumerate() {
        if in_s[ed.tail] || in_s[ed.head] {
            outside[p] = false;
        }
    }
    let mut fixed = vec![Fixed::Free; net.vertex_count()];
    fixed[w] = Fixed::Zero;
    fixed[v] = Fixed::One;
    let alpha = solve_dirichlet(net, Some(&outside), &fixed, &opts)?.energy;
    let upper_bound = c / (c + alpha);

    let slack = 1e-9;
    Ok(EscapeReport {
        probability,
        lower_bound,
        alpha,
        upper_bound,
        lower_holds: probability >= lower_bound - slack,
        upper_holds: probability <= upper_bound + slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ends::exploration::{ExplorationOptions, Explorer};
    use crate::lattice::{build_lattice_box, BoundaryMode, LatticeBoxSpec};
    use crate::rng::RngStream;

    #[test]
    fn fresh_box_first_edge() {
        let b = build_lattice_box(LatticeBoxSpec::new(3, 3, BoundaryMode::Wired)).unwrap();
        let o = b.origin();
        let e = b.network().incident(o)[0].edge;
        let id = b.network().edge(e).id;
        let r =
            escape_probability_bound_check(b.network(), &[o], &[], id, &SolveOptions::default())
                .unwrap();
        assert!(r.alpha > 0.0);
        assert!(r.upper_bound < 1.0);
        assert!(r.lower_holds && r.upper_holds);
        assert!(r.probability >= 1.0 / 6.0);
    }

    #[test]
    fn wired_triangle() {
        // a - v - w - a, S = {a}; edge a-v
        let g = Network::unit(3, [(0, 1), (1, 2), (2, 0)])
            .unwrap()
            .with_wired(2)
            .unwrap();
        let r = escape_probability_bound_check(&g, &[0], &[], EdgeId(0), &SolveOptions::default())
            .unwrap();
        // EC(v, {a, w}) = 2
        assert!((r.probability - 0.5).abs() < 1e-12);
        assert!((r.alpha - 1.0).abs() < 1e-12);
        assert!((r.upper_bound - 0.5).abs() < 1e-12);
        assert!((r.lower_bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn bounds_along_explorations() {
        for (d, r) in [(2, 8), (3, 6)] {
            let b = build_lattice_box(LatticeBoxSpec::new(d, r, BoundaryMode::Wired)).unwrap();
            let mut checked = 0;
            let mut seed = 0;
            while checked < 50 {
                let mut ex = Explorer::new(&b, b.origin(), ExplorationOptions::default()).unwrap();
                let mut rng = RngStream::new(seed, 0);
                seed += 1;
                while let Some((pos, _)) = ex.next_edge() {
                    let e = b.network().edge(pos);
                    let inside = ex.component();
                    if inside.contains(&e.tail) != inside.contains(&e.head) {
                        let rep = escape_probability_bound_check(
                            b.network(),
                            inside,
                            ex.removed(),
                            e.id,
                            &SolveOptions::default(),
                        )
                        .unwrap();
                        assert!(rep.lower_holds && rep.upper_holds, "{rep:?}");
                        assert!(rep.probability >= 1.0 / (2 * d) as f64 - 1e-9);
                        assert!((rep.probability - ex.probability(pos).unwrap()).abs() < 1e-9);
                        checked += 1;
                    }
                    ex.step(&mut rng).unwrap();
                }
            }
        }
    }
}
