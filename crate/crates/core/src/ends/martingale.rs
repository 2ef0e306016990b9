use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::electrical::{kirchhoff_at, solve_dirichlet, Fixed, SolveOptions};
use crate::error::{invalid, Error, Result};
use crate::network::{EdgeId, Network};
use crate::sampling::{condition_on_edge, tree_component};

/// Largest `|E_1|` accepted by [`martingale_check_exact`].
pub const MAX_EXACT_EDGES: usize = 16;

/// One configuration of `F` on `E_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct MartingaleRow {
    /// Presence of each `E_0` edge, in the order given.
    pub present: Vec<bool>,
    /// Probability of this configuration.
    pub probability: f64,
    pub m0: f64,
    /// `E[M_1 | F on E_0]`.
    pub expected_m1: f64,
}

impl MartingaleRow {
    pub fn discrepancy(&self) -> f64 {
        (self.expected_m1 - self.m0).abs()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MartingaleReport {
    pub rows: Vec<MartingaleRow>,
    /// Configurations of positive probability where some `E_1` edge misses
    /// `S_0`; the identity is not claimed for them.
    pub skipped: usize,
    pub max_discrepancy: f64,
}

/// A configuration reached by conditioning edge by edge, with the law of
/// the rest of the tree given by `network`.
struct Branch {
    network: Network,
    present: Vec<bool>,
    probability: f64,
}

/// Splits `start` over every configuration of `edges`, using Kirchhoff's
/// formula in the successively contracted/deleted network.
fn branch_over(start: Branch, edges: &[EdgeId], opts: &SolveOptions) -> Result<Vec<Branch>> {
    let mut out = vec![start];
    for &id in edges {
        let mut next = Vec::with_capacity(out.len() * 2);
        for b in out {
            let p_in = match b.network.edge_position(id) {
                // already a loop: both ends joined by present edges
                None => 0.0,
                Some(pos) if b.network.is_bridge(pos) => 1.0,
                Some(pos) => kirchhoff_at(&b.network, pos, None, opts)?,
            };
            if p_in > 0.0 {
                let mut present = b.present.clone();
                present.push(true);
                next.push(Branch {
                    network: condition_on_edge(&b.network, id, true)?,
                    present,
                    probability: b.probability * p_in,
                });
            }
            if p_in < 1.0 {
                let mut present = b.present;
                present.push(false);
                let network = if b.network.edge_position(id).is_some() {
                    condition_on_edge(&b.network, id, false)?
                } else {
                    b.network
                };
                next.push(Branch {
                    network,
                    present,
                    probability: b.probability * (1.0 - p_in),
                });
            }
        }
        out = next;
    }
    Ok(out)
}

/// `EC(S, w; G \ E)` where `S` is the component of `o` in the present edges.
fn conductance_after(
    net: &Network,
    origin: usize,
    edges: &[usize],
    present: &[bool],
    opts: &SolveOptions,
) -> Result<(f64, Vec<bool>)> {
    let w = net.wired().expect("checked");
    let mut alive = vec![true; net.edge_count()];
    let mut in_tree = vec![false; net.edge_count()];
    for (&p, &on) in edges.iter().zip(present) {
        alive[p] = false;
        in_tree[p] = on;
    }
    let s = tree_component(net, &in_tree, origin);
    let mut in_s = vec![false; net.vertex_count()];
    let mut fixed = vec![Fixed::Free; net.vertex_count()];
    for &v in &s {
        in_s[v] = true;
        fixed[v] = Fixed::Zero;
    }
    fixed[w] = Fixed::One;
    let ec = solve_dirichlet(net, Some(&alive), &fixed, &opts.ignoring_isolated())?.energy;
    Ok((ec, in_s))
}

/// Exact check of `E[M_1 | F on E_0] = M_0` for the forest with `origin`
/// wired to the exterior, where `M_i = EC(S_i, w; G \ E_i)` and `S_i` is
/// the component of the origin in `F` restricted to `E_i`.
///
/// Only configurations in which every edge of `E_1` touches `S_0` are
/// checked. Edges at the wired vertex are not admissible: revealing one of
/// them is not a step of the exploration.
pub fn martingale_check_exact(
    net: &Network,
    origin: usize,
    e0: &[EdgeId],
    e1: &[EdgeId],
    opts: &SolveOptions,
) -> Result<MartingaleReport> {
    let w = net
        .wired()
        .ok_or_else(|| invalid("martingale check needs a wired network"))?;
    if origin >= net.vertex_count() || origin == w {
        return Err(invalid("origin must be a non-wired vertex"));
    }
    if e1.len() > MAX_EXACT_EDGES {
        return Err(Error::ResourceLimit {
            what: "edges in E1",
            requested: e1.len(),
            limit: MAX_EXACT_EDGES,
        });
    }
    let mut e1_pos = Vec::with_capacity(e1.len());
    for (i, id) in e1.iter().enumerate() {
        let p = net
            .edge_position(*id)
            .ok_or_else(|| invalid(format!("edge {id:?} is not in the network")))?;
        if net.edge(p).touches(w) {
            return Err(invalid(format!("edge {id:?} touches the wired vertex")));
        }
        if e1[..i].contains(id) {
            return Err(invalid(format!("edge {id:?} listed twice")));
        }
        e1_pos.push(p);
    }
    if let Some(id) = e0.iter().find(|id| !e1.contains(id)) {
        return Err(invalid(format!("edge {id:?} is in E0 but not in E1")));
    }
    // order E1 as E0 followed by the new edges
    let fresh: Vec<EdgeId> = e1.iter().copied().filter(|id| !e0.contains(id)).collect();
    let mut order: Vec<EdgeId> = e0.to_vec();
    order.extend_from_slice(&fresh);
    let order_pos: Vec<usize> = order
        .iter()
        .map(|id| net.edge_position(*id).unwrap())
        .collect();

    let (hat, _) = net.contract(&[origin, w])?;
    let root = Branch {
        network: hat,
        present: Vec::new(),
        probability: 1.0,
    };
    let mut rows = Vec::new();
    let mut skipped = 0;
    let mut max_discrepancy: f64 = 0.0;
    for b0 in branch_over(root, e0, opts)? {
        let (m0, in_s0) =
            conductance_after(net, origin, &order_pos[..e0.len()], &b0.present, opts)?;
        let admissible = order_pos.iter().all(|&p| {
            let e = net.edge(p);
            in_s0[e.tail] || in_s0[e.head]
        });
        if !admissible {
            skipped += 1;
            continue;
        }
        let present0 = b0.present.clone();
        let p0 = b0.probability;
        let start = Branch {
            probability: 1.0,
            ..b0
        };
        let mut expected = 0.0;
        for b1 in branch_over(start, &fresh, opts)? {
            let (m1, _) = conductance_after(net, origin, &order_pos, &b1.present, opts)?;
            expected += b1.probability * m1;
        }
        let row = MartingaleRow {
            present: present0,
            probability: p0,
            m0,
            expected_m1: expected,
        };
        max_discrepancy = max_discrepancy.max(row.discrepancy());
        rows.push(row);
    }
    Ok(MartingaleReport {
        rows,
        skipped,
        max_discrepancy,
    })
}
