//! Monte Carlo check that `M_n = EC(S_n, wired)` has mean-zero increments
//! along the edge-by-edge exploration of the component of the origin.
//!
//! Two statistics are reported. The trace statistic is the z-score of the
//! mean total increment `M_end - M_0` over independent traces. The pooled
//! statistic is `sum dM / sqrt(sum dM^2)` over all steps of all traces,
//! which is approximately standard normal because martingale increments
//! are uncorrelated.

use serde::Serialize;
use wsf_core::ends::{ExplorationOptions, ExplorationOutcome, ExplorationTrace, Explorer};
use wsf_core::{build_lattice_box, RngStream};

use crate::config::ExperimentConfig;
use crate::driver::Driver;

/// Largest accepted `|z|`.
pub const Z_LIMIT: f64 = 4.0;

/// One step. Columns of the explore CSV; row `n = 0` carries `M_0` and
/// leaves the edge fields empty.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRow {
    pub trace: usize,
    pub n: usize,
    pub edge: Option<u32>,
    pub in_forest: Option<bool>,
    pub probability: Option<f64>,
    pub m: f64,
    pub s_size: usize,
    pub radius: Option<usize>,
    pub by_current: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MartingaleMcReport {
    pub traces: usize,
    pub steps: usize,
    pub reached_boundary: usize,
    pub finite: usize,
    pub mean_total: f64,
    pub std_error_total: f64,
    pub z_total: f64,
    pub z_pooled: f64,
    pub passed: bool,
}

pub struct ExploreRun {
    pub rows: Vec<StepRow>,
    pub report: MartingaleMcReport,
}

pub fn explore_experiment(cfg: &ExperimentConfig, driver: &Driver) -> anyhow::Result<ExploreRun> {
    let lattice = build_lattice_box(cfg.lattice.spec(cfg.lattice.radius))?;
    let opts = ExplorationOptions {
        rule: cfg.rule.into(),
        ..ExplorationOptions::default()
    };
    let traces = driver.map(
        cfg.samples,
        || (),
        |_, i| {
            let mut rng = RngStream::new(cfg.seed, i as u64);
            Explorer::new(&lattice, lattice.origin(), opts)?.run(&mut rng)
        },
    )?;
    let mut rows = Vec::new();
    for (i, t) in traces.iter().enumerate() {
        rows.push(StepRow {
            trace: i,
            n: 0,
            edge: None,
            in_forest: None,
            probability: None,
            m: t.m0,
            s_size: 1,
            radius: None,
            by_current: None,
        });
        for (n, s) in t.steps.iter().enumerate() {
            rows.push(StepRow {
                trace: i,
                n: n + 1,
                edge: Some(s.edge.0),
                in_forest: Some(s.in_forest),
                probability: Some(s.probability),
                m: s.m,
                s_size: s.s_size,
                radius: Some(s.radius),
                by_current: Some(s.by_current),
            });
        }
    }
    Ok(ExploreRun {
        rows,
        report: martingale_statistics(&traces),
    })
}

pub fn martingale_statistics(traces: &[ExplorationTrace]) -> MartingaleMcReport {
    let totals: Vec<f64> = traces
        .iter()
        .map(|t| t.steps.last().map_or(0.0, |s| s.m) - t.m0)
        .collect();
    let n = totals.len() as f64;
    let mean = totals.iter().sum::<f64>() / n;
    let var = totals.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    let se = (var / n).sqrt();
    let z_total = if se > 0.0 { mean / se } else { 0.0 };
    let (sum, sq) = traces
        .iter()
        .flat_map(|t| t.increments())
        .fold((0.0, 0.0), |(s, q), d| (s + d, q + d * d));
    let z_pooled = if sq > 0.0 { sum / sq.sqrt() } else { 0.0 };
    MartingaleMcReport {
        traces: traces.len(),
        steps: traces.iter().map(|t| t.steps.len()).sum(),
        reached_boundary: traces
            .iter()
            .filter(|t| t.outcome == ExplorationOutcome::ReachedBoundary)
            .count(),
        finite: traces
            .iter()
            .filter(|t| t.outcome == ExplorationOutcome::Finite)
            .count(),
        mean_total: mean,
        std_error_total: se,
        z_total,
        z_pooled,
        passed: z_total.abs() <= Z_LIMIT && z_pooled.abs() <= Z_LIMIT,
    }
}
