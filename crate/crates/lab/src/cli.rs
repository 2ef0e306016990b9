//! The `wsf-lab` command line.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on usage
//! or IO errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use wsf_core::electrical::{harmonic_voltage, SolveMethod, SolveOptions};
use wsf_core::isoperimetry::{
    hs_resistance_bound, integral_bound, profile_table, BoundStatus, BoundaryVariant, HsOptions,
    PowerProfile, Profile, StepProfile, DEFAULT_VERTEX_CAP,
};
use wsf_core::sampling::{RootWiredSampler, WilsonSampler};
use wsf_core::{build_lattice_box, BoundaryMode, Network, RngStream};

use crate::config::{
    parse_lattice, Boundary, ExperimentConfig, ExperimentKind, LatticeConfig, Rule,
};
use crate::driver::{Driver, WORKERS_ENV};
use crate::explore::explore_experiment;
use crate::format::read_graph;
use crate::kirchhoff::kirchhoff_validation;
use crate::one_end::one_end_experiment;
use crate::output::{emit_csv, sibling, write_json};
use crate::tail::tail_experiment;
use crate::verify::{verify_suite, Suite};

#[derive(Debug, Parser)]
#[command(
    name = "wsf-lab",
    version,
    about = "Spanning forest experiments and exact checks"
)]
pub struct Cli {
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample spanning trees or forests and report the component of the root.
    Sample(SampleArgs),
    /// Effective resistance and conductance between two vertex sets.
    Resistance(ResistanceArgs),
    /// Isoperimetric profile of a graph file.
    Profile(ProfileArgs),
    /// Resistance bound from an isoperimetric profile.
    Bound(BoundArgs),
    /// Edge-by-edge exploration traces and the martingale check.
    Explore(ExperimentArgs),
    /// Tail of the diameter of the past of the origin.
    Tail(ExperimentArgs),
    /// Reach of the component of the origin with the origin wired.
    OneEnd(ExperimentArgs),
    /// Sampled edge frequencies against Kirchhoff's formula.
    Kirchhoff(KirchhoffArgs),
    /// Run an exact validation suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false, id = "source")]
pub struct Source {
    /// Edge-list file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Lattice box `d,r[,free|wired|wired-with-root]`.
    #[arg(long, value_parser = parse_lattice)]
    pub lattice: Option<LatticeConfig>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub source: Source,
    /// Root vertex: a token of the graph file, or the origin of the lattice.
    #[arg(long)]
    pub root: Option<String>,
    #[arg(long, default_value_t = 1)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ResistanceArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Comma-separated vertex tokens.
    #[arg(long)]
    pub source_set: String,
    #[arg(long, required_unless_present = "wired", conflicts_with = "wired")]
    pub target_set: Option<String>,
    /// Use the wired vertex of the graph as the target.
    #[arg(long)]
    pub wired: bool,
    /// Relative residual at which the iterative solver stops.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum VariantArg {
    Edge,
    Infinite,
}

#[derive(Debug, Args)]
pub struct ProfileArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Anchor set `A`, comma-separated tokens.
    #[arg(long, default_value = "")]
    pub set: String,
    #[arg(long, value_enum, default_value = "edge")]
    pub variant: VariantArg,
    /// Comma-separated `t` values; without it the exact table is printed.
    #[arg(long, value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    /// Largest number of vertices for subset enumeration.
    #[arg(long, default_value_t = DEFAULT_VERTEX_CAP)]
    pub cap: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    /// `zd:D` for `c t^{(D-1)/D}`, or `cubic` for `c t^{2/3}`.
    #[arg(long, conflicts_with = "table", required_unless_present = "table")]
    pub preset: Option<String>,
    /// Constant `c` of the preset.
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    /// CSV with columns `t,kappa`, as printed by `profile`.
    #[arg(long)]
    pub table: Option<PathBuf>,
    #[arg(long)]
    pub s0: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON config; flags given alongside override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = parse_lattice)]
    pub lattice: Option<LatticeConfig>,
    /// Samples, or traces for `explore`.
    #[arg(long, visible_alias = "traces")]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub fit_window: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub rule: Option<RuleArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum RuleArg {
    BallMin,
    MaxCurrent,
}

#[derive(Debug, Args)]
pub struct KirchhoffArgs {
    #[command(flatten)]
    pub source: Source,
    #[arg(long, default_value_t = 100_000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    /// Rerun a single instance by name.
    #[arg(long)]
    pub instance: Option<String>,
    /// CSV of every instance.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses the process arguments and runs the command.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// `Ok(passed)`, or an error for bad input.
pub fn run(cli: Cli) -> anyhow::Result<bool> {
    let workers = cli.workers;
    match cli.command {
        Command::Sample(a) => sample(a),
        Command::Resistance(a) => resistance(a),
        Command::Profile(a) => profile(a),
        Command::Bound(a) => bound(a),
        Command::Explore(a) => experiment(ExperimentKind::Martingale, a, workers),
        Command::Tail(a) => experiment(ExperimentKind::Tail, a, workers),
        Command::OneEnd(a) => experiment(ExperimentKind::OneEnd, a, workers),
        Command::Kirchhoff(a) => kirchhoff(a, workers),
        Command::Verify(a) => verify(a),
    }
}

fn load_graph(path: &Path) -> anyhow::Result<crate::format::GraphFile> {
    read_graph(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Serialize)]
struct SampleRow {
    sample: usize,
    /// Space-separated edge ids.
    edges: String,
    origin_component_size: usize,
}

fn join_ids(ids: impl IntoIterator<Item = u32>) -> String {
    ids.into_iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Component of `start` in the forest, ignoring edges at the wired vertex.
fn component_size(net: &Network, mask: &[bool], start: usize) -> usize {
    let w = net.wired();
    let mut seen = vec![false; net.vertex_count()];
    seen[start] = true;
    let mut stack = vec![start];
    let mut size = 1;
    while let Some(x) = stack.pop() {
        for inc in net.incident(x) {
            if mask[inc.edge] && Some(inc.neighbor) != w && !seen[inc.neighbor] {
                seen[inc.neighbor] = true;
                size += 1;
                stack.push(inc.neighbor);
            }
        }
    }
    size
}

fn sample(a: SampleArgs) -> anyhow::Result<bool> {
    let (net, root, with_root) = match (&a.source.graph, a.source.lattice) {
        (Some(path), _) => {
            let g = load_graph(path)?;
            let root = match &a.root {
                Some(t) => g.vertex(t).ok_or_else(|| anyhow!("unknown vertex `{t}`"))?,
                None => 0,
            };
            (g.network, root, false)
        }
        (None, Some(l)) => {
            if a.root.is_some() {
                bail!("--root applies to graph files; lattices are rooted at the origin");
            }
            let with_root = l.boundary == Boundary::WiredWithRoot;
            let mode = if with_root {
                BoundaryMode::Wired
            } else {
                l.boundary.into()
            };
            let b = build_lattice_box(wsf_core::LatticeBoxSpec::new(l.dim, l.radius, mode))?;
            let o = b.origin();
            (b.into_network(), o, with_root)
        }
        (None, None) => unreachable!("clap requires a source"),
    };
    if Some(root) == net.wired() && with_root {
        bail!("the root must not be the wired vertex");
    }
    let mut rows = Vec::with_capacity(a.samples);
    if with_root {
        let mut s = RootWiredSampler::new(&net, root)?;
        for i in 0..a.samples {
            let mut rng = RngStream::new(a.seed, i as u64);
            let t = s.sample(&mut rng);
            rows.push(SampleRow {
                sample: i,
                edges: join_ids(t.edges.iter().map(|e| e.0)),
                origin_component_size: t.origin_component.len(),
            });
        }
    } else {
        let mut s = WilsonSampler::new(&net, net.wired().unwrap_or(root))?;
        for i in 0..a.samples {
            let mut rng = RngStream::new(a.seed, i as u64);
            let t = s.sample(&mut rng);
            rows.push(SampleRow {
                sample: i,
                edges: join_ids(t.edge_ids().into_iter().map(|e| e.0)),
                origin_component_size: component_size(&net, t.mask(), root),
            });
        }
    }
    emit_csv(a.out.as_deref(), &rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct ResistanceRow {
    er: f64,
    ec: f64,
    method: &'static str,
    iterations: usize,
    residual: f64,
}

fn resistance(a: ResistanceArgs) -> anyhow::Result<bool> {
    let g = load_graph(&a.graph)?;
    let src = g.vertices(&a.source_set).map_err(|e| anyhow!(e))?;
    let dst = match (&a.target_set, a.wired) {
        (Some(t), _) => g.vertices(t).map_err(|e| anyhow!(e))?,
        (None, _) => vec![g
            .network
            .wired()
            .ok_or_else(|| anyhow!("--wired needs an @wired line"))?],
    };
    let opts = SolveOptions {
        tolerance: a.tol,
        ..SolveOptions::default()
    };
    let v = harmonic_voltage(&g.network, &src, &dst, &opts)?;
    let row = ResistanceRow {
        er: v.resistance(),
        ec: v.conductance,
        method: match v.stats.method {
            SolveMethod::Direct => "direct",
            _ => "cg",
        },
        iterations: v.stats.iterations,
        residual: v.stats.residual,
    };
    emit_csv(a.out.as_deref(), &[row])?;
    Ok(true)
}

#[derive(Serialize, Deserialize)]
struct ProfileRow {
    t: f64,
    kappa: f64,
}

fn profile(a: ProfileArgs) -> anyhow::Result<bool> {
    let g = load_graph(&a.graph)?;
    let set = g.vertices(&a.set).map_err(|e| anyhow!(e))?;
    let variant = match a.variant {
        VariantArg::Edge => BoundaryVariant::Edge,
        VariantArg::Infinite => BoundaryVariant::Infinite,
    };
    let table = profile_table(&g.network, &set, variant, a.cap)?;
    let rows: Vec<ProfileRow> = match a.t_grid {
        Some(ts) => ts
            .into_iter()
            .map(|t| ProfileRow {
                t,
                kappa: table.eval(t),
            })
            .collect(),
        None => table
            .breaks()
            .iter()
            .zip(table.values())
            .map(|(&t, &kappa)| ProfileRow { t, kappa })
            .collect(),
    };
    emit_csv(a.out.as_deref(), &rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct BoundRow {
    s0: f64,
    value: f64,
    partial_sum: f64,
    tail: f64,
    steps: usize,
    status: &'static str,
    integral_bound: Option<f64>,
}

fn parse_preset(p: &str, scale: f64) -> anyhow::Result<PowerProfile> {
    let profile = match p.split_once(':') {
        Some(("zd", d)) => PowerProfile::lattice(
            d.parse()
                .with_context(|| format!("bad dimension in `{p}`"))?,
            scale,
        ),
        None if p == "cubic" => PowerProfile::cubic_growth(scale),
        _ => bail!("unknown preset `{p}`; expected `zd:D` or `cubic`"),
    };
    Ok(profile?)
}

fn read_table(path: &Path) -> anyhow::Result<StepProfile> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let rows = r
        .deserialize::<ProfileRow>()
        .map(|row| row.map(|p| (p.t, p.kappa)))
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(StepProfile::new(rows, f64::INFINITY)?)
}

fn bound(a: BoundArgs) -> anyhow::Result<bool> {
    let (profile, power): (Profile, Option<PowerProfile>) = match (&a.preset, &a.table) {
        (Some(p), _) => {
            let f = parse_preset(p, a.scale)?;
            (f.into(), Some(f))
        }
        (None, Some(t)) => (read_table(t)?.into(), None),
        (None, None) => unreachable!("clap requires a profile"),
    };
    let b = hs_resistance_bound(&profile, a.s0, &HsOptions::default())?;
    let row = BoundRow {
        s0: a.s0,
        value: b.value,
        partial_sum: b.partial_sum,
        tail: b.tail,
        steps: b.steps,
        status: match b.status {
            BoundStatus::Converged => "converged",
            BoundStatus::Divergent => "divergent",
            BoundStatus::LowerEstimateOnly => "lower-estimate-only",
        },
        integral_bound: power.and_then(|f| integral_bound(&f, f.doubling_constant(), a.s0).ok()),
    };
    emit_csv(a.out.as_deref(), &[row])?;
    Ok(true)
}

fn experiment_config(
    kind: ExperimentKind,
    a: ExperimentArgs,
    workers: Option<usize>,
) -> anyhow::Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let cfg = ExperimentConfig::load(path)?;
            if cfg.experiment != kind {
                bail!(
                    "{} describes a {:?} experiment",
                    path.display(),
                    cfg.experiment
                );
            }
            cfg
        }
        None => {
            let missing = |f: &str| anyhow!("--{f} is required without --config");
            ExperimentConfig::new(
                kind,
                a.lattice.ok_or_else(|| missing("lattice"))?,
                a.samples.ok_or_else(|| missing("samples"))?,
                a.seed.ok_or_else(|| missing("seed"))?,
            )
        }
    };
    if a.config.is_some() {
        if let Some(l) = a.lattice {
            cfg.lattice = l;
        }
        if let Some(n) = a.samples {
            cfg.samples = n;
        }
        if let Some(s) = a.seed {
            cfg.seed = s;
        }
    }
    if let Some(r) = a.radii {
        cfg.radii = r;
    }
    if let Some(w) = a.fit_window {
        let [lo, hi] = w[..] else {
            bail!("--fit-window takes two values `lo,hi`");
        };
        cfg.fit_window = Some((lo, hi));
    }
    if let Some(r) = a.rule {
        cfg.rule = match r {
            RuleArg::BallMin => Rule::BallMin,
            RuleArg::MaxCurrent => Rule::MaxCurrent,
        };
    }
    if a.out.is_some() {
        cfg.out = a.out;
    }
    if workers.is_some() {
        cfg.workers = workers;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn experiment(
    kind: ExperimentKind,
    a: ExperimentArgs,
    workers: Option<usize>,
) -> anyhow::Result<bool> {
    let cfg = experiment_config(kind, a, workers)?;
    let outcome = run_experiment(&cfg)?;
    for line in &outcome.summary {
        eprintln!("{line}");
    }
    Ok(outcome.passed)
}

/// Verdict and human-readable summary lines of an experiment run.
#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub passed: bool,
    pub summary: Vec<String>,
}

/// Runs a configured experiment, writing its CSV to `cfg.out` (stdout if
/// unset). Tail runs also write `<stem>.survival.csv` and
/// `<stem>.summary.json` next to `cfg.out`.
pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentOutcome> {
    let driver = Driver::new(cfg.workers)?;
    let out = cfg.out.as_deref();
    let mut summary = Vec::new();
    let passed = match cfg.experiment {
        ExperimentKind::Tail => {
            let run = tail_experiment(cfg, &driver)?;
            emit_csv(out, &run.records)?;
            if let Some(p) = out {
                emit_csv(Some(&sibling(p, "survival.csv")), &run.survival_rows())?;
                write_json(&sibling(p, "summary.json"), &run.reports)?;
            }
            for r in &run.reports {
                if let Some(w) = &r.warning {
                    summary.push(format!("warning: {w}"));
                }
                summary.push(format!(
                    "tail d={} r={}: exponent {:.4} (threshold {:.4}) over [{}, {}], contamination {:.2}% -> {}",
                    r.dim,
                    r.radius,
                    r.exponent,
                    r.threshold,
                    r.fit_window.0,
                    r.fit_window.1,
                    100.0 * r.contamination,
                    verdict(r.passed)
                ));
            }
            run.passed()
        }
        ExperimentKind::OneEnd => {
            let rep = one_end_experiment(cfg, &driver)?;
            emit_csv(out, &rep.rows)?;
            for r in &rep.rows {
                summary.push(format!(
                    "one-end r={}: P[reach r/2] = {:.4} +- {:.4}",
                    r.radius, r.probability, r.std_error
                ));
            }
            summary.push(format!(
                "strictly decreasing -> {}",
                verdict(rep.strictly_decreasing)
            ));
            rep.strictly_decreasing
        }
        ExperimentKind::Martingale => {
            let run = explore_experiment(cfg, &driver)?;
            emit_csv(out, &run.rows)?;
            let r = &run.report;
            summary.push(format!(
                "explore: {} traces, {} steps, z(total) {:.3}, z(pooled) {:.3} -> {}",
                r.traces,
                r.steps,
                r.z_total,
                r.z_pooled,
                verdict(r.passed)
            ));
            r.passed
        }
        ExperimentKind::Kirchhoff => {
            let b = build_lattice_box(cfg.lattice.spec(cfg.lattice.radius))?;
            let rep = kirchhoff_validation(b.network(), cfg.samples, cfg.seed, &driver)?;
            emit_csv(out, &rep.edges)?;
            summary.push(kirchhoff_summary(&rep));
            rep.passed
        }
    };
    Ok(ExperimentOutcome { passed, summary })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn kirchhoff_summary(rep: &crate::kirchhoff::KirchhoffReport) -> String {
    let tv = rep.tree_tv.map_or("n/a".to_string(), |t| format!("{t:.5}"));
    format!(
        "kirchhoff: {} draws, max |z| {:.3}, tree TV {tv} -> {}",
        rep.draws,
        rep.max_abs_z,
        verdict(rep.passed)
    )
}

fn kirchhoff(a: KirchhoffArgs, workers: Option<usize>) -> anyhow::Result<bool> {
    if a.draws == 0 {
        bail!("--draws must be at least 1");
    }
    let net = match (&a.source.graph, a.source.lattice) {
        (Some(p), _) => load_graph(p)?.network,
        (None, Some(l)) => build_lattice_box(l.spec(l.radius))?.into_network(),
        (None, None) => unreachable!("clap requires a source"),
    };
    let rep = kirchhoff_validation(&net, a.draws, a.seed, &Driver::new(workers)?)?;
    emit_csv(a.out.as_deref(), &rep.edges)?;
    eprintln!("{}", kirchhoff_summary(&rep));
    Ok(rep.passed)
}

fn verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let rep = verify_suite(a.suite, a.instance.as_deref());
    if let (Some(name), 0) = (&a.instance, rep.instances) {
        bail!("suite {} has no instance named `{name}`", rep.suite);
    }
    if let Some(p) = &a.out {
        emit_csv(Some(p), &rep.records)?;
    }
    println!("{}", serde_json::to_string_pretty(&rep)?);
    for f in &rep.failures {
        eprintln!(
            "FAIL {}: {}\n  reproduce: {}",
            f.instance, f.detail, f.reproduce
        );
    }
    eprintln!(
        "verify {}: {} instances, worst {:e} -> {}",
        rep.suite,
        rep.instances,
        rep.worst,
        verdict(rep.passed)
    );
    Ok(rep.passed)
}
