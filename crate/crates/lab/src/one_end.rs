//! How far the component of the origin reaches when the origin is wired to
//! the exterior.
//!
//! For each radius `r` the forest of the box with the origin joined to the
//! wired vertex is sampled, and a sample *reaches* when the component of the
//! origin contains a vertex of sup-norm at least `r / 2`.

use serde::Serialize;
use wsf_core::sampling::RootWiredSampler;
use wsf_core::{build_lattice_box, RngStream};

use crate::config::ExperimentConfig;
use crate::driver::Driver;
use crate::tail::stream_id;

/// One radius. Columns of the one-end CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReachRow {
    pub dim: usize,
    pub radius: usize,
    pub samples: usize,
    pub reached: usize,
    pub probability: f64,
    pub std_error: f64,
    pub mean_component_size: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneEndReport {
    pub rows: Vec<ReachRow>,
    pub strictly_decreasing: bool,
}

pub fn one_end_experiment(cfg: &ExperimentConfig, driver: &Driver) -> anyhow::Result<OneEndReport> {
    let mut rows = Vec::new();
    for (k, r) in cfg.radii().into_iter().enumerate() {
        let lattice = build_lattice_box(cfg.lattice.spec(r))?;
        let proto = RootWiredSampler::new(lattice.network(), lattice.origin())?;
        let target = r / 2;
        let draws = driver.map(
            cfg.samples,
            || proto.clone(),
            |sampler, i| {
                let mut rng = RngStream::new(cfg.seed, stream_id(k, i));
                let s = sampler.sample(&mut rng);
                let reached = s
                    .origin_component
                    .iter()
                    .any(|&v| lattice.sup_norm(v).is_some_and(|n| n >= target));
                Ok::<_, wsf_core::Error>((reached, s.origin_component.len()))
            },
        )?;
        let n = draws.len();
        let reached = draws.iter().filter(|d| d.0).count();
        let p = reached as f64 / n as f64;
        rows.push(ReachRow {
            dim: cfg.lattice.dim,
            radius: r,
            samples: n,
            reached,
            probability: p,
            std_error: (p * (1.0 - p) / n as f64).sqrt(),
            mean_component_size: draws.iter().map(|d| d.1 as f64).sum::<f64>() / n as f64,
        });
    }
    let strictly_decreasing = rows.windows(2).all(|w| w[1].probability < w[0].probability);
    Ok(OneEndReport {
        rows,
        strictly_decreasing,
    })
}
