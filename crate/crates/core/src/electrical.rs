//! Potentials, flows, and the Dirichlet problem.
//!
//! Sign conventions: for an edge stored as `tail -> head`,
//! `grad f(e) = c(e) (f(head) - f(tail))`, a [`Flow`] value is the amount
//! sent from tail to head, and `div theta(x)` is the net amount leaving `x`.
//! With these, `(grad f, theta)_r + sum_x f(x) div theta(x) = 0`.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::linalg::{cholesky_solve, conjugate_gradient, Csr};
use crate::network::{EdgeId, Network, OrientedEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    /// Dense Cholesky up to `direct_limit` unknowns, conjugate gradient above.
    Auto,
    Direct,
    ConjugateGradient,
}

/// What to do with vertices whose component contains no boundary vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IsolatedPolicy {
    /// Fail with [`Error::NoUniqueSolution`].
    Reject,
    /// Give them potential 0. They carry no current and no energy.
    Ignore,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub method: SolveMethod,
    /// Relative residual `|b - Ax| / |b|` at which CG stops.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub direct_limit: usize,
    pub isolated: IsolatedPolicy,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: SolveMethod::Auto,
            tolerance: 1e-10,
            max_iterations: 100_000,
            direct_limit: 256,
            isolated: IsolatedPolicy::Reject,
        }
    }
}

impl SolveOptions {
    pub fn ignoring_isolated(mut self) -> Self {
        self.isolated = IsolatedPolicy::Ignore;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0) {
            return Err(invalid("solver tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveStats {
    /// `Direct` or `ConjugateGradient`; never `Auto`.
    pub method: SolveMethod,
    pub unknowns: usize,
    pub iterations: usize,
    /// Relative residual of the final grounded system.
    pub residual: f64,
}

/// A function on the vertices of a network.
#[derive(Clone, Debug)]
pub struct Potential<'n> {
    network: &'n Network,
    values: Vec<f64>,
}

impl<'n> Potential<'n> {
    pub fn new(network: &'n Network, values: Vec<f64>) -> Result<Self> {
        if values.len() != network.vertex_count() {
            return Err(invalid(format!(
                "potential has {} values for {} vertices",
                values.len(),
                network.vertex_count()
            )));
        }
        Ok(Potential { network, values })
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn value(&self, v: usize) -> f64 {
        self.values[v]
    }

    /// `grad f` on the edge at `pos`, in its stored orientation.
    pub fn gradient(&self, pos: usize) -> f64 {
        let e = self.network.edge(pos);
        e.conductance * (self.values[e.head] - self.values[e.tail])
    }

    pub fn gradient_oriented(&self, e: OrientedEdge) -> f64 {
        let g = self.gradient(e.edge);
        if e.forward {
            g
        } else {
            -g
        }
    }

    /// `grad f` as a flow.
    pub fn gradient_flow(&self) -> Flow<'n> {
        Flow {
            network: self.network,
            values: (0..self.network.edge_count())
                .map(|p| self.gradient(p))
                .collect(),
        }
    }

    /// Dirichlet energy `D(f) = sum_e c(e) (f(head) - f(tail))^2`.
    pub fn energy(&self) -> f64 {
        self.network
            .edges()
            .iter()
            .map(|e| {
                let d = self.values[e.head] - self.values[e.tail];
                e.conductance * d * d
            })
            .sum()
    }

    /// `sum_{y ~ x} c(x,y) (f(y) - f(x))`.
    pub fn laplacian(&self, x: usize) -> f64 {
        self.network
            .incident(x)
            .iter()
            .map(|inc| {
                self.network.edge(inc.edge).conductance
                    * (self.values[inc.neighbor] - self.values[x])
            })
            .sum()
    }
}

/// An antisymmetric edge function, stored once per edge in the edge's
/// `tail -> head` orientation.
#[derive(Clone, Debug)]
pub struct Flow<'n> {
    network: &'n Network,
    values: Vec<f64>,
}

impl<'n> Flow<'n> {
    pub fn new(network: &'n Network, values: Vec<f64>) -> Result<Self> {
        if values.len() != network.edge_count() {
            return Err(invalid(format!(
                "flow has {} values for {} edges",
                values.len(),
                network.edge_count()
            )));
        }
        Ok(Flow { network, values })
    }

    pub fn zero(network: &'n Network) -> Self {
        Flow {
            network,
            values: vec![0.0; network.edge_count()],
        }
    }

    pub fn network(&self) -> &'n Network {
        self.network
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Flow along the edge at `pos` in its stored orientation.
    pub fn value(&self, pos: usize) -> f64 {
        self.values[pos]
    }

    pub fn oriented(&self, e: OrientedEdge) -> f64 {
        if e.forward {
            self.values[e.edge]
        } else {
            -self.values[e.edge]
        }
    }

    pub fn scaled(mut self, factor: f64) -> Self {
        self.values.iter_mut().for_each(|v| *v *= factor);
        self
    }

    /// Net flow out of `x`.
    pub fn divergence(&self, x: usize) -> f64 {
        self.network
            .incident(x)
            .iter()
            .map(|inc| {
                let e = self.network.edge(inc.edge);
                if e.tail == x {
                    self.values[inc.edge]
                } else {
                    -self.values[inc.edge]
                }
            })
            .sum()
    }

    /// `(theta, theta')_r`, one term per undirected edge.
    pub fn inner(&self, other: &Flow<'_>) -> f64 {
        self.network
            .edges()
            .iter()
            .zip(self.values.iter().zip(&other.values))
            .map(|(e, (a, b))| a * b / e.conductance)
            .sum()
    }

    pub fn energy(&self) -> f64 {
        self.inner(self)
    }
}

/// Result of a Dirichlet solve with `f = 0` on `A` and `f = 1` on `B`.
#[derive(Clone, Debug)]
pub struct Voltage<'n> {
    pub potential: Potential<'n>,
    /// `EC(A, B) = D(f)`.
    pub conductance: f64,
    pub stats: SolveStats,
}

impl Voltage<'_> {
    pub fn resistance(&self) -> f64 {
        1.0 / self.conductance
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Fixed {
    Free,
    Zero,
    One,
}

pub(crate) struct Dirichlet {
    pub values: Vec<f64>,
    pub energy: f64,
    pub stats: SolveStats,
}

/// Solves the 0/1 Dirichlet problem on the edges with `alive[pos]` (all
/// edges when `alive` is `None`).
pub(crate) fn solve_dirichlet(
    net: &Network,
    alive: Option<&[bool]>,
    fixed: &[Fixed],
    opts: &SolveOptions,
) -> Result<Dirichlet> {
    opts.validate()?;
    let n = net.vertex_count();
    let is_alive = |pos: usize| alive.is_none_or(|a| a[pos]);

    // vertices reachable from the boundary through live edges
    let mut reached = vec![false; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if fixed[v] != Fixed::Free {
            reached[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(x) = queue.pop_front() {
        for inc in net.incident(x) {
            if is_alive(inc.edge) && !reached[inc.neighbor] {
                reached[inc.neighbor] = true;
                queue.push_back(inc.neighbor);
            }
        }
    }

    let mut index = vec![usize::MAX; n];
    let mut unknowns = Vec::new();
    for v in 0..n {
        if fixed[v] != Fixed::Free {
            continue;
        }
        if !reached[v] {
            if opts.isolated == IsolatedPolicy::Reject {
                return Err(Error::NoUniqueSolution { vertex: v });
            }
            continue;
        }
        index[v] = unknowns.len();
        unknowns.push(v);
    }
    let m = unknowns.len();

    let mut values: Vec<f64> = fixed
        .iter()
        .map(|f| if *f == Fixed::One { 1.0 } else { 0.0 })
        .collect();

    let mut stats = SolveStats {
        method: SolveMethod::Direct,
        unknowns: m,
        iterations: 0,
        residual: 0.0,
    };

    if m > 0 {
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for (i, &v) in unknowns.iter().enumerate() {
            cols.push(i);
            vals.push(0.0);
            let diag_slot = vals.len() - 1;
            for inc in net.incident(v) {
                if !is_alive(inc.edge) {
                    continue;
                }
                let c = net.edge(inc.edge).conductance;
                diag[i] += c;
                match fixed[inc.neighbor] {
                    Fixed::One => rhs[i] += c,
                    Fixed::Zero => {}
                    Fixed::Free => {
                        cols.push(index[inc.neighbor]);
                        vals.push(-c);
                    }
                }
            }
            vals[diag_slot] = diag[i];
            row_ptr.push(cols.len());
        }
        let csr = Csr {
            n: m,
            row_ptr,
            cols,
            vals,
        };

        let direct = match opts.method {
            SolveMethod::Direct => true,
            SolveMethod::ConjugateGradient => false,
            SolveMethod::Auto => m <= opts.direct_limit,
        };
        let mut x = vec![0.0; m];
        let mut solved = false;
        if direct {
            let mut dense = vec![0.0; m * m];
            for i in 0..m {
                for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
                    dense[i * m + csr.cols[k]] += csr.vals[k];
                }
            }
            x.copy_from_slice(&rhs);
            solved = cholesky_solve(&mut dense, m, &mut x);
            if solved {
                stats.residual = relative_residual(&csr, &rhs, &x);
            } else if opts.method == SolveMethod::Direct {
                return Err(Error::NotConverged {
                    iterations: 0,
                    residual: f64::INFINITY,
                });
            } else {
                x.iter_mut().for_each(|v| *v = 0.0);
            }
        }
        if !solved {
            let out = conjugate_gradient(
                &csr,
                &diag,
                &rhs,
                &mut x,
                opts.tolerance,
                opts.max_iterations,
            )?;
            stats.method = SolveMethod::ConjugateGradient;
            stats.iterations = out.iterations;
            stats.residual = out.residual;
        }
        for (i, &v) in unknowns.iter().enumerate() {
            values[v] = x[i];
        }
    }

    let energy = net
        .edges()
        .iter()
        .enumerate()
        .filter(|(p, _)| is_alive(*p))
        .map(|(_, e)| {
            let d = values[e.head] - values[e.tail];
            e.conductance * d * d
        })
        .sum();
    Ok(Dirichlet {
        values,
        energy,
        stats,
    })
}

fn relative_residual(a: &Csr, b: &[f64], x: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.n];
    a.mul(x, &mut ax);
    let num: f64 = ax.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
    let den: f64 = b.iter().map(|q| q * q).sum();
    if den == 0.0 {
        libm::sqrt(num)
    } else {
        libm::sqrt(num / den)
    }
}

fn boundary_labels(net: &Network, a: &[usize], b: &[usize]) -> Result<Vec<Fixed>> {
    if a.is_empty() || b.is_empty() {
        return Err(invalid("both boundary sets must be nonempty"));
    }
    let n = net.vertex_count();
    let mut fixed = vec![Fixed::Free; n];
    for &v in a {
        if v >= n {
            return Err(invalid(format!("vertex {v} out of range")));
        }
        fixed[v] = Fixed::Zero;
    }
    for &v in b {
        if v >= n {
            return Err(invalid(format!("vertex {v} out of range")));
        }
        if fixed[v] == Fixed::Zero {
            return Err(invalid(format!("vertex {v} lies in both boundary sets")));
        }
        fixed[v] = Fixed::One;
    }
    Ok(fixed)
}

/// The harmonic function with `f = 0` on `a`, `f = 1` on `b`.
pub fn harmonic_voltage<'n>(
    net: &'n Network,
    a: &[usize],
    b: &[usize],
    opts: &SolveOptions,
) -> Result<Voltage<'n>> {
    let fixed = boundary_labels(net, a, b)?;
    let sol = solve_dirichlet(net, None, &fixed, opts)?;
    Ok(Voltage {
        potential: Potential {
            network: net,
            values: sol.values,
        },
        conductance: sol.energy,
        stats: sol.stats,
    })
}

pub fn effective_conductance(
    net: &Network,
    a: &[usize],
    b: &[usize],
    opts: &SolveOptions,
) -> Result<f64> {
    Ok(harmonic_voltage(net, a, b, opts)?.conductance)
}

/// `1 / EC(a, b)`; infinite when no edge path joins the sets.
pub fn effective_resistance(
    net: &Network,
    a: &[usize],
    b: &[usize],
    opts: &SolveOptions,
) -> Result<f64> {
    Ok(1.0 / effective_conductance(net, a, b, opts)?)
}

/// The unit current flow from `a` to `b`, i.e. `grad f / EC`.
pub fn unit_current_flow<'n>(
    net: &'n Network,
    a: &[usize],
    b: &[usize],
    opts: &SolveOptions,
) -> Result<Flow<'n>> {
    let v = harmonic_voltage(net, a, b, opts)?;
    if v.conductance == 0.0 {
        return Err(invalid("no current can flow between disconnected sets"));
    }
    let ec = v.conductance;
    Ok(v.potential.gradient_flow().scaled(1.0 / ec))
}

fn wired_of(net: &Network, a: &[usize]) -> Result<usize> {
    let w = net
        .wired()
        .ok_or_else(|| invalid("network has no wired vertex"))?;
    if a.contains(&w) {
        return Err(invalid("source set contains the wired vertex"));
    }
    Ok(w)
}

/// `EC(a, wired vertex)`: the finite-volume stand-in for `EC(a, infinity)`.
pub fn conductance_to_wired(net: &Network, a: &[usize], opts: &SolveOptions) -> Result<f64> {
    let w = wired_of(net, a)?;
    effective_conductance(net, a, &[w], opts)
}

/// `EC(a, wired)` along a sequence of wired lattice boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct ConductanceSequence {
    pub dim: usize,
    pub radii: Vec<usize>,
    pub values: Vec<f64>,
}

impl ConductanceSequence {
    /// `|v_last - v_prev| / v_last` for the two largest radii.
    pub fn relative_gap(&self) -> Option<f64> {
        let k = self.values.len();
        (k >= 2).then(|| (self.values[k - 2] - self.values[k - 1]).abs() / self.values[k - 1])
    }

    /// Two-radius extrapolation assuming `EC(r) = EC + C r^{2-d}`, which is
    /// the Green-function decay for `d >= 3`. `None` in lower dimensions.
    pub fn richardson_estimate(&self) -> Option<f64> {
        let k = self.values.len();
        if self.dim < 3 || k < 2 {
            return None;
        }
        let p = (self.dim - 2) as f64;
        let (r1, r2) = (
            self.radii[k - 2] as f64 + 1.0,
            self.radii[k - 1] as f64 + 1.0,
        );
        let (w1, w2) = (libm::pow(r1, p), libm::pow(r2, p));
        Some((w2 * self.values[k - 1] - w1 * self.values[k - 2]) / (w2 - w1))
    }

    pub fn is_nonincreasing(&self, slack: f64) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
    }
}

/// Runs [`conductance_to_wired`] on wired boxes of increasing radius for the
/// lattice points `set`.
pub fn lattice_conductance_sequence(
    dim: usize,
    radii: &[usize],
    set: &[Vec<i64>],
    opts: &SolveOptions,
) -> Result<ConductanceSequence> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(invalid("radii must be strictly increasing"));
    }
    let mut values = Vec::with_capacity(radii.len());
    for &r in radii {
        let b = crate::lattice::build_lattice_box(crate::lattice::LatticeBoxSpec::new(
            dim,
            r,
            crate::lattice::BoundaryMode::Wired,
        ))?;
        let a = set
            .iter()
            .map(|p| {
                b.index_of(p).ok_or_else(|| {
                    invalid(format!("point {p:?} lies outside the box of radius {r}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(conductance_to_wired(b.network(), &a, opts)?);
    }
    Ok(ConductanceSequence {
        dim,
        radii: radii.to_vec(),
        values,
    })
}

/// `P[e in T] = c(e) ER(tail, head)` for the edge with id `id`.
pub fn kirchhoff_edge_probability(net: &Network, id: EdgeId, opts: &SolveOptions) -> Result<f64> {
    let pos = net
        .edge_position(id)
        .ok_or_else(|| invalid(format!("edge {id:?} is not in the network")))?;
    kirchhoff_at(net, pos, None, opts)
}

/// Kirchhoff probability for the edge at `pos` in the subnetwork of live
/// edges. Bridges return exactly 1.
pub(crate) fn kirchhoff_at(
    net: &Network,
    pos: usize,
    alive: Option<&[bool]>,
    opts: &SolveOptions,
) -> Result<f64> {
    let e = *net.edge(pos);
    let mut fixed = vec![Fixed::Free; net.vertex_count()];
    fixed[e.tail] = Fixed::Zero;
    fixed[e.head] = Fixed::One;
    // remove the edge itself to test for a bridge and get EC of the rest
    let mut mask: Vec<bool> = match alive {
        Some(a) => a.to_vec(),
        None => vec![true; net.edge_count()],
    };
    mask[pos] = false;
    let opts = opts.ignoring_isolated();
    let rest = solve_dirichlet(net, Some(&mask), &fixed, &opts)?.energy;
    if rest == 0.0 {
        return Ok(1.0);
    }
    Ok(e.conductance / (e.conductance + rest))
}

/// `g(x) = pi(v) ER(v, w) (1 - h(x))`, where `h` is the voltage from `v`
/// (0) to the wired vertex (1). `-grad g / pi(v)` is the unit current from
/// `v` to the wired vertex, so on a unit lattice the normalisation is
/// `-grad g / 2d`.
pub fn green_function<'n>(
    net: &'n Network,
    v: usize,
    opts: &SolveOptions,
) -> Result<Potential<'n>> {
    let w = wired_of(net, &[v])?;
    let volt = harmonic_voltage(net, &[v], &[w], opts)?;
    let scale = net.pi(v) / volt.conductance;
    let values = volt
        .potential
        .values
        .iter()
        .map(|h| scale * (1.0 - h))
        .collect();
    Ok(Potential {
        network: net,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{build_lattice_box, BoundaryMode, LatticeBoxSpec};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn cycle4() -> Network {
        Network::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    fn k4() -> Network {
        Network::unit(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    #[test]
    fn voltage_examples() {
        let path = Network::unit(3, [(0, 1), (1, 2)]).unwrap();
        let o = SolveOptions::default();
        let v = harmonic_voltage(&path, &[0], &[2], &o).unwrap();
        assert!(close(v.potential.value(1), 0.5, 1e-12));
        assert!(close(v.resistance(), 2.0, 1e-12));

        let v = harmonic_voltage(&path, &[0, 1], &[2], &o).unwrap();
        assert_eq!(v.potential.values(), &[0.0, 0.0, 1.0]);
        assert_eq!(v.stats.unknowns, 0);

        let c = cycle4();
        let v = harmonic_voltage(&c, &[0], &[2], &o).unwrap();
        assert!(close(v.potential.value(1), 0.5, 1e-12));
        assert!(close(v.potential.value(3), 0.5, 1e-12));
    }

    #[test]
    fn resistance_examples() {
        let o = SolveOptions::default();
        let par = Network::unit(2, [(0, 1), (0, 1)]).unwrap();
        assert!(close(
            effective_resistance(&par, &[0], &[1], &o).unwrap(),
            0.5,
            1e-12
        ));
        assert!(close(
            effective_resistance(&k4(), &[0], &[1], &o).unwrap(),
            0.5,
            1e-12
        ));
    }

    #[test]
    fn unit_current_examples() {
        let o = SolveOptions::default();
        let par = Network::unit(2, [(0, 1), (0, 1)]).unwrap();
        let f = unit_current_flow(&par, &[0], &[1], &o).unwrap();
        assert!(close(f.value(0), 0.5, 1e-12) && close(f.value(1), 0.5, 1e-12));

        let c = cycle4();
        let f = unit_current_flow(&c, &[0], &[2], &o).unwrap();
        assert!(close(f.divergence(0), 1.0, 1e-12));
        assert!(close(f.divergence(1), 0.0, 1e-12));
        assert!(close(f.energy(), 1.0, 1e-12));
        for p in 0..4 {
            assert!(close(f.value(p).abs(), 0.5, 1e-12));
        }
    }

    #[test]
    fn disconnected_handling() {
        let g = Network::unit(4, [(0, 1), (2, 3)]).unwrap();
        let o = SolveOptions::default();
        assert!(matches!(
            harmonic_voltage(&g, &[0], &[1], &o),
            Err(Error::NoUniqueSolution { vertex: 2 })
        ));
        let v = harmonic_voltage(&g, &[0], &[1], &o.ignoring_isolated()).unwrap();
        assert!(close(v.conductance, 1.0, 1e-12));
        assert!(
            effective_resistance(&g, &[0, 2], &[1], &o.ignoring_isolated())
                .is_ok_and(|r| close(r, 1.0, 1e-12))
        );
        assert!(harmonic_voltage(&g, &[0], &[0], &o).is_err());
        assert!(harmonic_voltage(&g, &[], &[0], &o).is_err());
    }

    #[test]
    fn kirchhoff_examples() {
        let o = SolveOptions::default();
        let tri = Network::unit(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        for e in tri.edges() {
            assert!(close(
                kirchhoff_edge_probability(&tri, e.id, &o).unwrap(),
                2.0 / 3.0,
                1e-12
            ));
        }
        for e in k4().edges() {
            assert!(close(
                kirchhoff_edge_probability(&k4(), e.id, &o).unwrap(),
                0.5,
                1e-12
            ));
        }
        let bridge = Network::unit(4, [(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(
            kirchhoff_edge_probability(&bridge, EdgeId(3), &o).unwrap(),
            1.0
        );
        assert!(kirchhoff_edge_probability(&bridge, EdgeId(9), &o).is_err());
    }

    #[test]
    fn direct_and_cg_agree_on_a_box() {
        let b = build_lattice_box(LatticeBoxSpec::new(2, 6, BoundaryMode::Wired)).unwrap();
        let w = b.wired().unwrap();
        let mut d = SolveOptions::default();
        d.method = SolveMethod::Direct;
        let mut c = SolveOptions::default();
        c.method = SolveMethod::ConjugateGradient;
        let ed = conductance_to_wired(b.network(), &[b.origin()], &d).unwrap();
        let ec = conductance_to_wired(b.network(), &[b.origin()], &c).unwrap();
        assert!(close(ed, ec, 1e-9 * ed));
        assert!(conductance_to_wired(b.network(), &[w], &d).is_err());
    }

    #[test]
    fn one_dimensional_series_law() {
        for r in [1, 3, 10] {
            let b = build_lattice_box(LatticeBoxSpec::new(1, r, BoundaryMode::Wired)).unwrap();
            let ec =
                conductance_to_wired(b.network(), &[b.origin()], &SolveOptions::default()).unwrap();
            assert!(close(ec, 2.0 / (r as f64 + 1.0), 1e-12));
        }
    }

    #[test]
    fn all_interior_gives_boundary_mass() {
        let b = build_lattice_box(LatticeBoxSpec::new(2, 2, BoundaryMode::Wired)).unwrap();
        let all: Vec<usize> = (0..b.interior_count()).collect();
        let ec = conductance_to_wired(b.network(), &all, &SolveOptions::default()).unwrap();
        assert!(close(ec, 20.0, 1e-12));
    }

    #[test]
    fn transient_sequence() {
        let s = lattice_conductance_sequence(
            3,
            &[4, 8, 16],
            &[vec![0, 0, 0]],
            &SolveOptions::default(),
        )
        .unwrap();
        assert!(s.is_nonincreasing(1e-9));
        // EC(0, infinity) in Z^3 is about 1 / 0.2527 = 3.957
        assert!(s.values[2] > 3.9);
        let est = s.richardson_estimate().unwrap();
        assert!(close(est, 3.957, 0.05), "{est}");
        assert!(s.relative_gap().unwrap() < 0.05);
    }

    #[test]
    fn green_function_is_a_unit_flow_potential() {
        let b = build_lattice_box(LatticeBoxSpec::new(2, 4, BoundaryMode::Wired)).unwrap();
        let net = b.network();
        let o = b.origin();
        let g = green_function(net, o, &SolveOptions::default()).unwrap();
        let theta = g.gradient_flow().scaled(-1.0 / 4.0);
        assert!(close(theta.divergence(o), 1.0, 1e-9));
        for x in 0..b.interior_count() {
            if x != o {
                assert!(close(theta.divergence(x), 0.0, 1e-9));
            }
        }
        assert_eq!(g.value(b.wired().unwrap()), 0.0);
    }

    #[test]
    fn green_function_envelope_in_three_dimensions() {
        let b = build_lattice_box(LatticeBoxSpec::new(3, 16, BoundaryMode::Wired)).unwrap();
        let g = green_function(b.network(), b.origin(), &SolveOptions::default()).unwrap();
        let at = |k: i64| g.value(b.index_of(&[k, 0, 0]).unwrap());
        let mut prev = f64::INFINITY;
        let envelope = at(2) * 2.0;
        for k in 2..=8 {
            let v = at(k);
            assert!(v < prev);
            assert!(v * k as f64 <= 1.5 * envelope);
            prev = v;
        }
    }
}
