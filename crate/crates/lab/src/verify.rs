//! Exact validation suites over built-in graph catalogs.
//!
//! Every suite produces one [`Record`] per instance. A failing instance is
//! listed with a command that reruns it alone.

use serde::Serialize;
use wsf_core::catalog::{connected_graphs, random_connected_network};
use wsf_core::electrical::{
    effective_conductance, effective_resistance, Flow, Potential, SolveOptions,
};
use wsf_core::ends::domination_check;
use wsf_core::ends::martingale_check_exact;
use wsf_core::isoperimetry::{
    finite_hs_bound, good_subset, half_inequality, hs_resistance_bound, GoodSubsetOptions,
    HsOptions, PowerProfile, DEFAULT_VERTEX_CAP,
};
use wsf_core::sampling::DEFAULT_EDGE_CAP;
use wsf_core::{EdgeId, Network, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Martingale,
    Domination,
    Bounds,
    ElectricalIdentities,
    GoodSubset,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Martingale,
        Suite::Domination,
        Suite::Bounds,
        Suite::ElectricalIdentities,
        Suite::GoodSubset,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Martingale => "martingale",
            Suite::Domination => "domination",
            Suite::Bounds => "bounds",
            Suite::ElectricalIdentities => "electrical-identities",
            Suite::GoodSubset => "good-subset",
        }
    }
}

/// One instance. Columns of the verify CSV.
///
/// `value` is the checked quantity and `reference` what it is compared
/// with: discrepancy vs 0 (martingale), transported mass vs 1 (domination),
/// bound vs exact resistance (bounds; the closed-form linear profile case
/// records its error vs 0), residual vs 0 (electrical identities), smallest
/// profile ratio vs 1/2 (good subset).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Record {
    pub suite: &'static str,
    pub instance: String,
    pub value: f64,
    pub reference: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Failure {
    pub instance: String,
    pub detail: String,
    pub reproduce: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub instances: usize,
    /// Largest discrepancy or residual, or smallest slack, depending on the
    /// suite; see [`Record`].
    pub worst: f64,
    pub failures: Vec<Failure>,
    pub passed: bool,
    #[serde(skip)]
    pub records: Vec<Record>,
}

struct Collector<'f> {
    suite: Suite,
    filter: Option<&'f str>,
    records: Vec<Record>,
    failures: Vec<Failure>,
}

impl Collector<'_> {
    fn wants(&self, instance: &str) -> bool {
        self.filter.is_none_or(|f| f == instance)
    }

    fn push(
        &mut self,
        instance: String,
        value: f64,
        reference: f64,
        passed: bool,
        detail: impl FnOnce() -> String,
    ) {
        if !passed {
            self.failures.push(Failure {
                reproduce: format!("wsf-lab verify {} --instance {instance}", self.suite.name()),
                instance: instance.clone(),
                detail: detail(),
            });
        }
        self.records.push(Record {
            suite: self.suite.name(),
            instance,
            value,
            reference,
            passed,
        });
    }

    fn error(&mut self, instance: String, e: wsf_core::Error) {
        self.push(instance, f64::NAN, f64::NAN, false, || e.to_string());
    }
}

/// Runs `suite`, restricted to the instance named `filter` if given.
pub fn verify_suite(suite: Suite, filter: Option<&str>) -> SuiteReport {
    let mut c = Collector {
        suite,
        filter,
        records: Vec::new(),
        failures: Vec::new(),
    };
    match suite {
        Suite::Martingale => martingale(&mut c),
        Suite::Domination => domination(&mut c),
        Suite::Bounds => bounds(&mut c),
        Suite::ElectricalIdentities => electrical(&mut c),
        Suite::GoodSubset => good_subsets(&mut c),
    }
    let worst = match suite {
        Suite::Martingale | Suite::ElectricalIdentities => {
            c.records.iter().map(|r| r.value).fold(0.0, f64::max)
        }
        Suite::Domination | Suite::GoodSubset => c
            .records
            .iter()
            .map(|r| r.value)
            .fold(f64::INFINITY, f64::min),
        Suite::Bounds => c
            .records
            .iter()
            .map(|r| r.value - r.reference)
            .fold(f64::INFINITY, f64::min),
    };
    SuiteReport {
        suite: suite.name(),
        instances: c.records.len(),
        worst,
        passed: c.failures.is_empty() && !c.records.is_empty(),
        failures: c.failures,
        records: c.records,
    }
}

pub const MARTINGALE_TOL: f64 = 1e-9;

/// Every wired catalog graph with at most six edges, every origin, every
/// pair `E0 <= E1` of interior edge sets.
fn martingale(c: &mut Collector<'_>) {
    let opts = SolveOptions::default();
    for (gi, g) in connected_graphs(7, 6).into_iter().enumerate() {
        for w in 0..g.vertices {
            for o in (0..g.vertices).filter(|&o| o != w) {
                let name = format!("g{gi}:w{w}:o{o}");
                if !c.wants(&name) {
                    continue;
                }
                let net = match g.to_network().and_then(|n| n.with_wired(w)) {
                    Ok(n) => n,
                    Err(e) => {
                        c.error(name, e);
                        continue;
                    }
                };
                match martingale_over_pairs(&net, o, &opts) {
                    Ok(d) => c.push(name, d, 0.0, d <= MARTINGALE_TOL, || {
                        format!("{g:?}: discrepancy {d:e}")
                    }),
                    Err(e) => c.error(name, e),
                }
            }
        }
    }
}

fn martingale_over_pairs(net: &Network, o: usize, opts: &SolveOptions) -> wsf_core::Result<f64> {
    let w = net.wired().expect("wired network");
    let inner: Vec<EdgeId> = net
        .edges()
        .iter()
        .filter(|e| !e.touches(w))
        .map(|e| e.id)
        .collect();
    let pick = |m: u32| -> Vec<EdgeId> {
        (0..inner.len())
            .filter(|i| m >> i & 1 == 1)
            .map(|i| inner[i])
            .collect()
    };
    let mut worst: f64 = 0.0;
    for m1 in 0u32..(1 << inner.len()) {
        let e1 = pick(m1);
        // E0 runs over the subsets of E1
        let mut m0 = m1;
        loop {
            let r = martingale_check_exact(net, o, &pick(m0), &e1, opts)?;
            worst = worst.max(r.max_discrepancy);
            if m0 == 0 {
                break;
            }
            m0 = (m0 - 1) & m1;
        }
    }
    Ok(worst)
}

/// Every connected simple graph on at most four vertices, every ordered pair.
fn domination(c: &mut Collector<'_>) {
    for (gi, g) in connected_graphs(4, 6).into_iter().enumerate() {
        for x in 0..g.vertices {
            for y in (0..g.vertices).filter(|&y| y != x) {
                let name = format!("g{gi}:x{x}:y{y}");
                if !c.wants(&name) {
                    continue;
                }
                match g
                    .to_network()
                    .and_then(|n| domination_check(&n, x, y, DEFAULT_EDGE_CAP))
                {
                    Ok(r) => {
                        let (lo, hi) = (r.lower.expected_size(), r.upper.expected_size());
                        let ok = r.feasible && hi >= lo - 1e-12;
                        c.push(name, r.flow, 1.0, ok, || {
                            format!("{g:?}: flow {}, E|lower| {lo}, E|upper| {hi}", r.flow)
                        });
                    }
                    Err(e) => c.error(name, e),
                }
            }
        }
    }
}

/// Bound against exact resistance on random and catalog networks, and the
/// closed form for the linear profile.
fn bounds(c: &mut Collector<'_>) {
    let opts = SolveOptions::default();
    let check = |c: &mut Collector<'_>, name: String, net: &Network, a: usize, z: usize| {
        match finite_hs_bound(net, a, z, DEFAULT_VERTEX_CAP, &opts) {
            Ok(r) => c.push(name, r.bound, r.exact, r.bound >= r.exact, || {
                format!("bound {} below exact {}", r.bound, r.exact)
            }),
            Err(e) => c.error(name, e),
        }
    };
    for seed in 0..20u64 {
        let name = format!("random:{seed}");
        if c.wants(&name) {
            let mut rng = RngStream::new(seed, 0);
            match random_connected_network(8, 0.3, (0.5, 2.0), &mut rng) {
                Ok(g) => check(c, name, &g, 0, 7),
                Err(e) => c.error(name, e),
            }
        }
    }
    for (gi, g) in connected_graphs(6, 15).into_iter().enumerate() {
        let Ok(net) = g.to_network() else { continue };
        for a in 0..g.vertices {
            for z in (0..g.vertices).filter(|&z| z != a) {
                let name = format!("catalog:g{gi}:a{a}:z{z}");
                if c.wants(&name) {
                    check(c, name, &net, a, z);
                }
            }
        }
    }
    let name = "linear-profile".to_string();
    if c.wants(&name) {
        let linear = PowerProfile::new(1.0, 1.0)
            .and_then(|p| hs_resistance_bound(&p.into(), 1.0, &HsOptions::default()));
        match linear {
            Ok(b) => c.push(
                name,
                (b.value - 6.0).abs(),
                0.0,
                (b.value - 6.0).abs() <= 1e-12,
                || format!("linear profile from s0 = 1 gave {}", b.value),
            ),
            Err(e) => c.error(name, e),
        }
    }
}

pub const IDENTITY_TOL: f64 = 1e-9;
pub const LAW_TOL: f64 = 1e-10;

fn electrical(c: &mut Collector<'_>) {
    let opts = SolveOptions::default();
    for seed in 0..100u64 {
        let n = 2 + (seed as usize * 37) % 49;
        let mut rng = RngStream::new(seed, 0);
        let g = match random_connected_network(n, 0.1, (0.25, 4.0), &mut rng) {
            Ok(g) => g,
            Err(e) => {
                c.error(format!("ibp:{seed}"), e);
                continue;
            }
        };
        let name = format!("ibp:{seed}");
        if c.wants(&name) {
            let f = Potential::new(&g, (0..n).map(|_| rng.uniform() * 4.0 - 2.0).collect());
            let theta = Flow::new(
                &g,
                (0..g.edge_count())
                    .map(|_| rng.uniform() * 4.0 - 2.0)
                    .collect(),
            );
            match f.and_then(|f| theta.map(|t| (f, t))) {
                Ok((f, theta)) => {
                    let lhs = f.gradient_flow().inner(&theta);
                    let rhs: f64 = (0..n).map(|v| f.value(v) * theta.divergence(v)).sum();
                    let res = (lhs + rhs).abs();
                    c.push(name, res, 0.0, res <= IDENTITY_TOL, || {
                        format!("{lhs} + {rhs} != 0")
                    });
                }
                Err(e) => c.error(name, e),
            }
        }
        let name = format!("reciprocity:{seed}");
        if c.wants(&name) {
            let (a, b) = ([0], [n - 1]);
            let r = effective_conductance(&g, &a, &b, &opts)
                .and_then(|ec| effective_resistance(&g, &a, &b, &opts).map(|er| (ec, er)));
            match r {
                Ok((ec, er)) => {
                    let res = (ec * er - 1.0).abs();
                    c.push(name, res, 0.0, res <= IDENTITY_TOL, || {
                        format!("EC {ec} * ER {er} != 1")
                    });
                }
                Err(e) => c.error(name, e),
            }
        }
    }
    for k in 1..=12usize {
        let cs: Vec<f64> = (0..k).map(|i| 0.5 + (i % 4) as f64).collect();
        let name = format!("series:{k}");
        if c.wants(&name) {
            let path = Network::new(k + 1, (0..k).map(|i| (i, i + 1, cs[i])));
            let expected: f64 = cs.iter().map(|c| 1.0 / c).sum();
            match path.and_then(|p| effective_resistance(&p, &[0], &[k], &opts)) {
                Ok(er) => {
                    let res = (er - expected).abs() / expected;
                    c.push(name, res, 0.0, res <= LAW_TOL, || {
                        format!("ER {er}, expected {expected}")
                    });
                }
                Err(e) => c.error(name, e),
            }
        }
        let name = format!("parallel:{k}");
        if c.wants(&name) {
            let bundle = Network::new(2, cs.iter().map(|&c| (0, 1, c)));
            let expected: f64 = cs.iter().sum();
            match bundle.and_then(|p| effective_conductance(&p, &[0], &[1], &opts)) {
                Ok(ec) => {
                    let res = (ec - expected).abs() / expected;
                    c.push(name, res, 0.0, res <= LAW_TOL, || {
                        format!("EC {ec}, expected {expected}")
                    });
                }
                Err(e) => c.error(name, e),
            }
        }
    }
}

/// Random graph on `n` interior vertices plus a wired vertex attached to a
/// few of them.
pub fn random_wired_graph(seed: u64, n: usize) -> wsf_core::Result<Network> {
    let mut rng = RngStream::new(seed, 0);
    let g = random_connected_network(n, 0.25, (1.0, 1.0), &mut rng)?;
    let mut edges: Vec<(usize, usize, f64)> = g
        .edges()
        .iter()
        .map(|e| (e.tail, e.head, e.conductance))
        .collect();
    for v in 1..n {
        if rng.uniform() < 0.3 {
            edges.push((v, n, 1.0));
        }
    }
    edges.push((n - 1, n, 1.0));
    Network::new(n + 1, edges)?.with_wired(n)
}

/// Single-vertex `K` away from the wired vertex, on wired graphs with up
/// to twelve vertices.
fn good_subsets(c: &mut Collector<'_>) {
    let opts = GoodSubsetOptions::default();
    for seed in 0..60u64 {
        let n = 6 + (seed as usize % 6);
        let g = match random_wired_graph(seed, n) {
            Ok(g) => g,
            Err(e) => {
                c.error(format!("wired:{seed}"), e);
                continue;
            }
        };
        let w = n;
        for k in 0..n {
            if g.incident(k).iter().any(|i| i.neighbor == w) {
                continue;
            }
            let name = format!("wired:{seed}:k{k}");
            if !c.wants(&name) {
                continue;
            }
            let r = good_subset(&g, &[k], &opts)
                .and_then(|s| half_inequality(&g, &s.vertices, DEFAULT_VERTEX_CAP).map(|h| (s, h)));
            match r {
                Ok((s, h)) => {
                    let ok = s.certificate.holds && h.holds;
                    c.push(name, h.worst_ratio, 0.5, ok, || {
                        format!(
                            "W = {:?}: certificate {:?}, ratio {}",
                            s.vertices, s.certificate, h.worst_ratio
                        )
                    });
                }
                Err(e) => c.error(name, e),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filters_to_one_instance() {
        let r = verify_suite(Suite::Bounds, Some("random:3"));
        assert_eq!(r.instances, 1);
        assert!(r.passed);
        let r = verify_suite(Suite::Bounds, Some("no-such-instance"));
        assert_eq!(r.instances, 0);
        assert!(!r.passed);
    }

    #[test]
    fn failures_carry_a_reproduction_command() {
        let mut c = Collector {
            suite: Suite::Domination,
            filter: None,
            records: Vec::new(),
            failures: Vec::new(),
        };
        c.push("g1:x0:y1".into(), 0.5, 1.0, false, || "infeasible".into());
        assert_eq!(
            c.failures[0].reproduce,
            "wsf-lab verify domination --instance g1:x0:y1"
        );
    }
}
