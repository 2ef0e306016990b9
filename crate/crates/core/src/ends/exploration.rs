use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use crate::electrical::{solve_dirichlet, Fixed, SolveOptions};
use crate::error::{invalid, Result};
use crate::lattice::{BoundaryMode, LatticeBox};
use crate::network::{EdgeId, Network};
use crate::rng::RngStream;

/// How the next edge is chosen among the unexamined edges touching `S_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeRule {
    /// Smallest `r` with `e` inside `B_r`, ties broken by the sorted
    /// endpoint coordinates, then the axis, then the edge id.
    BallMin,
    /// As `BallMin`, except that whenever the smallest available radius
    /// exceeds every radius used so far, the edge carrying the largest unit
    /// current from `S_n` to the wired vertex is taken instead.
    MaxCurrent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExplorationOutcome {
    /// No unexamined edge touches `S_n`: the component of the origin is
    /// finite and contained in the box.
    Finite,
    /// `S_n` reached a vertex next to the wired vertex.
    ReachedBoundary,
    StepLimit,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplorationOptions {
    pub rule: EdgeRule,
    pub max_steps: usize,
    /// Stop as soon as `S_n` contains a vertex adjacent to the wired vertex.
    pub stop_at_boundary: bool,
    pub solve: SolveOptions,
}

impl Default for ExplorationOptions {
    fn default() -> Self {
        ExplorationOptions {
            rule: EdgeRule::BallMin,
            max_steps: usize::MAX,
            stop_at_boundary: true,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExplorationStep {
    pub edge: EdgeId,
    pub in_forest: bool,
    /// Conditional probability that `edge` is in the forest.
    pub probability: f64,
    /// `|S_{n+1}|`.
    pub s_size: usize,
    /// `M_{n+1}`.
    pub m: f64,
    /// Smallest `r` with the edge inside `B_r`.
    pub radius: usize,
    /// Whether the max-current rule chose this edge.
    pub by_current: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExplorationTrace {
    /// Radius of the box the trace ran in.
    pub box_radius: usize,
    /// `M_0 = EC(o, wired)`.
    pub m0: f64,
    pub steps: Vec<ExplorationStep>,
    pub outcome: ExplorationOutcome,
    /// The final `S_n`.
    pub component: Vec<usize>,
}

impl ExplorationTrace {
    /// `M_{n+1} - M_n` for every step.
    pub fn increments(&self) -> Vec<f64> {
        let mut prev = self.m0;
        self.steps
            .iter()
            .map(|s| {
                let d = s.m - prev;
                prev = s.m;
                d
            })
            .collect()
    }
}

/// Step-by-step exploration of the component of the origin in the forest
/// with the origin wired to the exterior. Edges are revealed one at a time
/// with their exact conditional probabilities, so no forest is sampled in
/// advance.
#[derive(Clone, Debug)]
pub struct Explorer<'b> {
    lattice: &'b LatticeBox,
    net: &'b Network,
    wired: usize,
    opts: ExplorationOptions,
    rank: Vec<usize>,
    radius: Vec<usize>,
    boundary_layer: Vec<bool>,
    in_s: Vec<bool>,
    s: Vec<usize>,
    touches_boundary: bool,
    examined: Vec<bool>,
    alive: Vec<bool>,
    removed: Vec<EdgeId>,
    /// Candidates keyed by rank.
    candidates: BTreeSet<(usize, usize)>,
    m: f64,
    voltage: Vec<f64>,
    level: usize,
    steps: usize,
}

impl<'b> Explorer<'b> {
    pub fn new(lattice: &'b LatticeBox, origin: usize, opts: ExplorationOptions) -> Result<Self> {
        if lattice.spec().boundary != BoundaryMode::Wired {
            return Err(invalid("exploration needs a wired box"));
        }
        let net = lattice.network();
        let wired = lattice.wired().expect("wired box");
        if origin >= lattice.interior_count() {
            return Err(invalid("origin must be an interior vertex"));
        }
        let d = lattice.dim();
        let m_edges = net.edge_count();
        let mut radius = vec![usize::MAX; m_edges];
        let mut keyed = Vec::new();
        let mut a = vec![0i64; d];
        let mut b = vec![0i64; d];
        for (p, e) in net.edges().iter().enumerate() {
            if e.touches(wired) {
                continue;
            }
            lattice.write_coords(e.tail, &mut a);
            lattice.write_coords(e.head, &mut b);
            let r = lattice
                .sup_norm(e.tail)
                .unwrap()
                .max(lattice.sup_norm(e.head).unwrap());
            let axis = (0..d).find(|&k| a[k] != b[k]).unwrap_or(0);
            let (lo, hi) = if a <= b {
                (a.clone(), b.clone())
            } else {
                (b.clone(), a.clone())
            };
            radius[p] = r;
            keyed.push((r, lo, hi, axis, e.id, p));
        }
        keyed.sort();
        let mut rank = vec![usize::MAX; m_edges];
        for (k, item) in keyed.iter().enumerate() {
            rank[item.5] = k;
        }
        let boundary_layer = (0..net.vertex_count())
            .map(|v| v != wired && net.incident(v).iter().any(|i| i.neighbor == wired))
            .collect();
        let mut ex = Explorer {
            lattice,
            net,
            wired,
            opts,
            rank,
            radius,
            boundary_layer,
            in_s: vec![false; net.vertex_count()],
            s: Vec::new(),
            touches_boundary: false,
            examined: vec![false; m_edges],
            alive: vec![true; m_edges],
            removed: Vec::new(),
            candidates: BTreeSet::new(),
            m: 0.0,
            voltage: Vec::new(),
            level: 0,
            steps: 0,
        };
        ex.add_to_s(origin);
        ex.m = ex.solve_m()?;
        Ok(ex)
    }

    fn add_to_s(&mut self, v: usize) {
        self.in_s[v] = true;
        self.s.push(v);
        self.touches_boundary |= self.boundary_layer[v];
        for inc in self.net.incident(v) {
            if !self.examined[inc.edge] && self.rank[inc.edge] != usize::MAX {
                self.candidates.insert((self.rank[inc.edge], inc.edge));
            }
        }
    }

    /// `EC(S, w; G \ E_n)`; keeps the voltage for the max-current rule.
    fn solve_m(&mut self) -> Result<f64> {
        let mut fixed = vec![Fixed::Free; self.net.vertex_count()];
        for &v in &self.s {
            fixed[v] = Fixed::Zero;
        }
        fixed[self.wired] = Fixed::One;
        let sol = solve_dirichlet(
            self.net,
            Some(&self.alive),
            &fixed,
            &self.opts.solve.ignoring_isolated(),
        )?;
        if self.opts.rule == EdgeRule::MaxCurrent {
            self.voltage = sol.values;
        }
        Ok(sol.energy)
    }

    pub fn lattice(&self) -> &'b LatticeBox {
        self.lattice
    }

    /// The current `S_n`, in order of discovery.
    pub fn component(&self) -> &[usize] {
        &self.s
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Examined edges, i.e. `E_n`.
    pub fn examined(&self) -> Vec<EdgeId> {
        (0..self.examined.len())
            .filter(|&p| self.examined[p])
            .map(|p| self.net.edge(p).id)
            .collect()
    }

    /// Examined edges that turned out not to be in the forest.
    pub fn removed(&self) -> &[EdgeId] {
        &self.removed
    }

    /// Why the exploration is over, or `None` if another step is possible.
    pub fn outcome(&self) -> Option<ExplorationOutcome> {
        if self.opts.stop_at_boundary && self.touches_boundary {
            Some(ExplorationOutcome::ReachedBoundary)
        } else if self.candidates.is_empty() {
            Some(if self.touches_boundary {
                ExplorationOutcome::ReachedBoundary
            } else {
                ExplorationOutcome::Finite
            })
        } else if self.steps >= self.opts.max_steps {
            Some(ExplorationOutcome::StepLimit)
        } else {
            None
        }
    }

    /// The edge the next step will examine, and whether the max-current
    /// rule picked it.
    pub fn next_edge(&self) -> Option<(usize, bool)> {
        if self.outcome().is_some() {
            return None;
        }
        let &(_, first) = self.candidates.first()?;
        if self.opts.rule == EdgeRule::MaxCurrent
            && self.steps > 0
            && self.radius[first] > self.level
        {
            let mut best = (f64::NEG_INFINITY, first);
            for &(_, p) in &self.candidates {
                let e = self.net.edge(p);
                let current = (e.conductance * (self.voltage[e.head] - self.voltage[e.tail])).abs();
                if current > best.0 {
                    best = (current, p);
                }
            }
            return Some((best.1, true));
        }
        Some((first, false))
    }

    /// `P[e in F | F_n]` for a candidate edge at `pos`.
    pub fn probability(&self, pos: usize) -> Result<f64> {
        let e = self.net.edge(pos);
        let (u, v) = if self.in_s[e.tail] {
            (e.tail, e.head)
        } else {
            (e.head, e.tail)
        };
        if !self.in_s[u] {
            return Err(invalid("edge does not touch the explored component"));
        }
        if self.in_s[v] {
            return Ok(0.0);
        }
        let mut fixed = vec![Fixed::Free; self.net.vertex_count()];
        for &x in &self.s {
            fixed[x] = Fixed::Zero;
        }
        fixed[self.wired] = Fixed::Zero;
        fixed[v] = Fixed::One;
        let ec = solve_dirichlet(
            self.net,
            Some(&self.alive),
            &fixed,
            &self.opts.solve.ignoring_isolated(),
        )?
        .energy;
        Ok((e.conductance / ec).min(1.0))
    }

    /// Examines one edge. Returns `None` once the exploration is over.
    pub fn step(&mut self, rng: &mut RngStream) -> Result<Option<ExplorationStep>> {
        let Some((pos, by_current)) = self.next_edge() else {
            return Ok(None);
        };
        let p = self.probability(pos)?;
        let in_forest = rng.uniform() < p;
        self.candidates.remove(&(self.rank[pos], pos));
        self.examined[pos] = true;
        self.alive[pos] = false;
        self.level = self.level.max(self.radius[pos]);
        let e = *self.net.edge(pos);
        if in_forest {
            let v = if self.in_s[e.tail] { e.head } else { e.tail };
            self.add_to_s(v);
        } else {
            self.removed.push(e.id);
        }
        self.m = self.solve_m()?;
        self.steps += 1;
        Ok(Some(ExplorationStep {
            edge: e.id,
            in_forest,
            probability: p,
            s_size: self.s.len(),
            m: self.m,
            radius: self.radius[pos],
            by_current,
        }))
    }

    pub fn run(mut self, rng: &mut RngStream) -> Result<ExplorationTrace> {
        let m0 = self.m;
        let mut steps = Vec::new();
        while let Some(s) = self.step(rng)? {
            steps.push(s);
        }
        Ok(ExplorationTrace {
            box_radius: self.lattice.radius(),
            m0,
            steps,
            outcome: self.outcome().expect("finished"),
            component: self.s,
        })
    }
}

/// Runs one exploration from `origin` to completion.
pub fn exploration_process(
    lattice: &LatticeBox,
    origin: usize,
    rng: &mut RngStream,
    opts: ExplorationOptions,
) -> Result<ExplorationTrace> {
    Explorer::new(lattice, origin, opts)?.run(rng)
}
