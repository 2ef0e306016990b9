use alloc::vec;
use alloc::vec::Vec;

use crate::electrical::{solve_dirichlet, Fixed, SolveOptions};
use crate::error::{invalid, Result};
use crate::lattice::LatticeBox;
use crate::rng::RngStream;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConditionOptions {
    /// Vertices sampled next to the removed set, and as many again from the
    /// rest of the box.
    pub vertex_samples: usize,
    /// Number of sphere shells per box, spread between the removed set and
    /// the boundary.
    pub shells: usize,
    pub seed: u64,
    pub solve: SolveOptions,
    /// Last-to-first ratio of the vertex minima below which they are reported
    /// as not bounded below.
    pub decay_threshold: f64,
}

impl Default for ConditionOptions {
    fn default() -> Self {
        ConditionOptions {
            vertex_samples: 4,
            shells: 3,
            seed: 0,
            solve: SolveOptions::default(),
            decay_threshold: 0.5,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShellConductance {
    pub radius: usize,
    pub pi: f64,
    /// `EC(shell, wired; box \ V_n)`.
    pub conductance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoxDiagnostics {
    pub radius: usize,
    pub removed: usize,
    pub sampled: usize,
    /// `min_v EC(v, wired; box \ V_n)` over the sampled `v`.
    pub min_vertex_conductance: f64,
    pub shells: Vec<ShellConductance>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub boxes: Vec<BoxDiagnostics>,
    /// The vertex minima do not decay by more than the threshold factor.
    pub vertex_bounded_below: bool,
    /// Within every box, shell conductance increases with `pi`.
    pub shells_increasing: bool,
}

/// Numerical look at the two conditions on an exhaustion: vertex
/// conductances to the exterior staying bounded below after removing `V_n`,
/// and conductances of large sets growing with their size. A plausibility
/// report on finite boxes, not a proof.
pub fn condition_diagnostics(
    boxes: &[(&LatticeBox, &[usize])],
    opts: &ConditionOptions,
) -> Result<ConditionReport> {
    let mut rows = Vec::with_capacity(boxes.len());
    for (i, &(lattice, removed)) in boxes.iter().enumerate() {
        let mut rng = RngStream::new(opts.seed, i as u64);
        rows.push(one_box(lattice, removed, &mut rng, opts)?);
    }
    let first = rows.first().map(|r| r.min_vertex_conductance);
    let last = rows.last().map(|r| r.min_vertex_conductance);
    let vertex_bounded_below = match (first, last) {
        (Some(f), Some(l)) => l > 0.0 && l >= opts.decay_threshold * f,
        _ => true,
    };
    let shells_increasing = rows.iter().all(|r| {
        r.shells
            .windows(2)
            .all(|p| p[1].pi <= p[0].pi || p[1].conductance > p[0].conductance)
    });
    Ok(ConditionReport {
        boxes: rows,
        vertex_bounded_below,
        shells_increasing,
    })
}

fn one_box(
    lattice: &LatticeBox,
    removed: &[usize],
    rng: &mut RngStream,
    opts: &ConditionOptions,
) -> Result<BoxDiagnostics> {
    let net = lattice.network();
    let w = lattice
        .wired()
        .ok_or_else(|| invalid("diagnostics need wired boxes"))?;
    let n = net.vertex_count();
    let gone = net.membership(removed)?;
    if gone[w] {
        return Err(invalid("the removed set contains the wired vertex"));
    }
    let alive: Vec<bool> = net
        .edges()
        .iter()
        .map(|e| !gone[e.tail] && !gone[e.head])
        .collect();

    let mut next_to = Vec::new();
    let mut rest = Vec::new();
    for v in 0..n {
        if gone[v] || v == w {
            continue;
        }
        if net.incident(v).iter().any(|inc| gone[inc.neighbor]) {
            next_to.push(v);
        } else {
            rest.push(v);
        }
    }
    let mut sample = pick(&mut next_to, opts.vertex_samples, rng);
    sample.extend(pick(&mut rest, opts.vertex_samples, rng));

    let solve = opts.solve.ignoring_isolated();
    let conductance = |set: &[usize]| -> Result<f64> {
        let mut fixed = vec![Fixed::Free; n];
        for &v in set {
            fixed[v] = Fixed::Zero;
        }
        fixed[w] = Fixed::One;
        Ok(solve_dirichlet(net, Some(&alive), &fixed, &solve)?.energy)
    };
    let mut min_vertex = f64::INFINITY;
    for &v in &sample {
        min_vertex = min_vertex.min(conductance(&[v])?);
    }

    let inner = removed
        .iter()
        .filter_map(|&v| lattice.sup_norm(v))
        .max()
        .map_or(0, |s| s + 1);
    let r = lattice.radius();
    let mut radii: Vec<usize> = (0..opts.shells)
        .map(|j| {
            if opts.shells == 1 {
                r
            } else {
                inner + (r.saturating_sub(inner)) * j / (opts.shells - 1)
            }
        })
        .filter(|&s| s <= r)
        .collect();
    radii.dedup();
    let mut shells = Vec::new();
    for s in radii {
        let shell: Vec<usize> = lattice
            .sphere(s)
            .into_iter()
            .filter(|&v| !gone[v])
            .collect();
        if shell.is_empty() {
            continue;
        }
        let pi = shell.iter().map(|&v| net.pi(v)).sum();
        shells.push(ShellConductance {
            radius: s,
            pi,
            conductance: conductance(&shell)?,
        });
    }
    Ok(BoxDiagnostics {
        radius: r,
        removed: removed.len(),
        sampled: sample.len(),
        min_vertex_conductance: min_vertex,
        shells,
    })
}

/// Up to `k` distinct entries of `from`, chosen uniformly.
fn pick(from: &mut [usize], k: usize, rng: &mut RngStream) -> Vec<usize> {
    let k = k.min(from.len());
    for i in 0..k {
        let j = i + rng.below(from.len() - i);
        from.swap(i, j);
    }
    from[..k].to_vec()
}
