//! Diameter of the past of the origin in the wired forest of `Z^d` boxes.
//!
//! For each radius `r` and sample `i` a wired spanning tree of the box is
//! drawn from stream `(seed, stream_id(r index, i))` and the past of the
//! origin is measured. A sample is *contaminated* when its past touches the
//! wired vertex; such a past has Euclidean diameter at least `r - 1` and is
//! counted as exceeding every `t` in the survival function.

use serde::Serialize;
use wsf_core::ends::past_of;
use wsf_core::sampling::WiredSampler;
use wsf_core::{build_lattice_box, RngStream};

use crate::config::ExperimentConfig;
use crate::driver::Driver;

/// Stream of sample `i` at the `k`-th radius.
pub fn stream_id(k: usize, i: usize) -> u64 {
    ((k as u64) << 40) | i as u64
}

/// `1/2 - 1/d`.
pub fn beta(dim: usize) -> f64 {
    0.5 - 1.0 / dim as f64
}

/// Slack allowed below `beta(d)` when checking the fitted exponent.
pub const EXPONENT_SLACK: f64 = 0.05;
/// Contamination above which the acceptance check fails.
pub const CONTAMINATION_LIMIT: f64 = 0.10;
/// Contamination above which a warning is issued.
pub const CONTAMINATION_WARNING: f64 = 0.20;

/// One sample. Columns of the main tail CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PastRecord {
    pub radius: usize,
    pub sample: usize,
    pub euclidean_diameter: f64,
    pub sup_diameter: f64,
    pub graph_diameter: usize,
    pub past_size: usize,
    pub contaminated: bool,
}

/// One point of `P[diam > t]`. Columns of the `.survival.csv` file; `dim`
/// and `beta` repeat on every row so the file is self-describing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub radius: usize,
    pub dim: usize,
    pub beta: f64,
    pub t: f64,
    pub survival: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailReport {
    pub dim: usize,
    pub radius: usize,
    pub samples: usize,
    pub contaminated: usize,
    pub contamination: f64,
    /// Euclidean diameters of the uncontaminated samples, ascending.
    #[serde(skip)]
    pub diameters: Vec<f64>,
    pub survival: Vec<(f64, f64)>,
    pub fit_window: (f64, f64),
    pub fit_points: usize,
    pub slope: f64,
    /// `-slope`.
    pub exponent: f64,
    pub beta: f64,
    pub threshold: f64,
    pub passed: bool,
    pub warning: Option<String>,
}

#[derive(Clone, Debug)]
pub struct TailRun {
    pub records: Vec<PastRecord>,
    pub reports: Vec<TailReport>,
}

impl TailRun {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn survival_rows(&self) -> Vec<SurvivalRow> {
        self.reports
            .iter()
            .flat_map(|r| {
                r.survival.iter().map(|&(t, s)| SurvivalRow {
                    radius: r.radius,
                    dim: r.dim,
                    beta: r.beta,
                    t,
                    survival: s,
                })
            })
            .collect()
    }
}

pub fn tail_experiment(cfg: &ExperimentConfig, driver: &Driver) -> anyhow::Result<TailRun> {
    let mut records = Vec::new();
    let mut reports = Vec::new();
    for (k, r) in cfg.radii().into_iter().enumerate() {
        let lattice = build_lattice_box(cfg.lattice.spec(r))?;
        let net = lattice.network();
        let origin = lattice.origin();
        let proto = WiredSampler::new(net)?;
        let batch = driver.map(
            cfg.samples,
            || proto.clone(),
            |sampler, i| {
                let mut rng = RngStream::new(cfg.seed, stream_id(k, i));
                let s = sampler.sample(&mut rng);
                let past = past_of(net, &s.tree, origin)?;
                Ok::<_, wsf_core::Error>(PastRecord {
                    radius: r,
                    sample: i,
                    euclidean_diameter: past.euclidean_diameter,
                    sup_diameter: past.sup_diameter,
                    graph_diameter: past.graph_diameter,
                    past_size: past.vertices.len(),
                    contaminated: past.reached_boundary,
                })
            },
        )?;
        let window = cfg.fit_window.unwrap_or((2.0, r as f64 / 3.0));
        reports.push(summarize(cfg.lattice.dim, r, &batch, window));
        records.extend(batch);
    }
    Ok(TailRun { records, reports })
}

/// Points `lo = x_0 < ... < x_{n-1} = hi`, evenly spaced in `ln`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// `P[diam > t]` with contaminated samples counted as infinite.
fn survival_at(sorted: &[f64], contaminated: usize, total: usize, t: f64) -> f64 {
    let above = sorted.len() - sorted.partition_point(|&d| d <= t);
    (above + contaminated) as f64 / total as f64
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

pub const FIT_POINTS: usize = 16;
pub const SURVIVAL_POINTS: usize = 48;

pub fn summarize(
    dim: usize,
    radius: usize,
    batch: &[PastRecord],
    window: (f64, f64),
) -> TailReport {
    let total = batch.len();
    let contaminated = batch.iter().filter(|p| p.contaminated).count();
    let mut diameters: Vec<f64> = batch
        .iter()
        .filter(|p| !p.contaminated)
        .map(|p| p.euclidean_diameter)
        .collect();
    diameters.sort_by(f64::total_cmp);
    let diagonal = 2.0 * radius as f64 * (dim as f64).sqrt();
    let survival = log_grid(1.0, diagonal, SURVIVAL_POINTS)
        .into_iter()
        .map(|t| (t, survival_at(&diameters, contaminated, total, t)))
        .collect();
    let pts: Vec<(f64, f64)> = log_grid(window.0, window.1, FIT_POINTS)
        .into_iter()
        .map(|t| (t, survival_at(&diameters, contaminated, total, t)))
        .filter(|&(_, s)| s > 0.0)
        .map(|(t, s)| (t.ln(), s.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        ols_slope(&pts)
    } else {
        f64::NAN
    };
    let contamination = contaminated as f64 / total as f64;
    let b = beta(dim);
    let threshold = b - EXPONENT_SLACK;
    let exponent = -slope;
    let warning = (contamination > CONTAMINATION_WARNING).then(|| {
        format!(
            "contamination {:.1}% at r = {radius}: the box is too small for the window [{}, {}]",
            100.0 * contamination,
            window.0,
            window.1
        )
    });
    TailReport {
        dim,
        radius,
        samples: total,
        contaminated,
        contamination,
        diameters,
        survival,
        fit_window: window,
        fit_points: pts.len(),
        slope,
        exponent,
        beta: b,
        threshold,
        passed: exponent >= threshold && contamination < CONTAMINATION_LIMIT,
        warning,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(d: f64, contaminated: bool) -> PastRecord {
        PastRecord {
            radius: 16,
            sample: 0,
            euclidean_diameter: d,
            sup_diameter: d,
            graph_diameter: d as usize,
            past_size: 1,
            contaminated,
        }
    }

    #[test]
    fn betas() {
        assert!((beta(3) - 1.0 / 6.0).abs() < 1e-15);
        assert_eq!(beta(4), 0.25);
        assert!((beta(5) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn recovers_an_exact_power_law() {
        // P[D > t] = t^{-1/2} for D = U^{-2}
        let n = 100_000;
        let batch: Vec<PastRecord> = (0..n)
            .map(|i| record(((i as f64 + 0.5) / n as f64).powi(-2), false))
            .collect();
        let rep = summarize(3, 64, &batch, (2.0, 20.0));
        assert!((rep.exponent - 0.5).abs() < 0.01, "{}", rep.exponent);
        assert!(rep.passed);
    }

    #[test]
    fn survival_is_nonincreasing_and_counts_contamination() {
        let batch: Vec<PastRecord> = (0..40)
            .map(|i| record((i % 7) as f64, i % 10 == 0))
            .collect();
        let rep = summarize(3, 16, &batch, (2.0, 5.0));
        assert_eq!(rep.contaminated, 4);
        assert_eq!(rep.diameters.len() + rep.contaminated, rep.samples);
        assert!(rep.survival.windows(2).all(|w| w[1].1 <= w[0].1));
        assert_eq!(rep.survival.last().unwrap().1, 0.1);
        assert!(!rep.passed);
    }

    #[test]
    fn heavy_contamination_warns() {
        let batch: Vec<PastRecord> = (0..10).map(|i| record(1.0, i < 3)).collect();
        assert!(summarize(3, 16, &batch, (2.0, 5.0)).warning.is_some());
    }
}
