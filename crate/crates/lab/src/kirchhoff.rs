//! Sampled edge frequencies against `P[e in T] = c(e) ER(e-, e+)`.
//!
//! Draws are split into chunks of [`CHUNK`] trees; chunk `j` uses stream
//! `(seed, j)`, so the counts do not depend on the number of workers.
//! When the network has few enough spanning trees to enumerate, the total
//! variation distance between the sampled and exact tree laws is reported
//! too.

use std::collections::HashMap;

use serde::Serialize;
use wsf_core::electrical::{kirchhoff_edge_probability, SolveOptions};
use wsf_core::sampling::{enumerate_spanning_trees, WilsonSampler};
use wsf_core::{Network, RngStream};

use crate::driver::Driver;

pub const CHUNK: usize = 10_000;
/// Largest accepted `|z|`.
pub const Z_LIMIT: f64 = 5.0;
/// Tree laws with more outcomes than this are not tabulated.
pub const MAX_TREES: usize = 1 << 16;

/// One edge. Columns of the Kirchhoff CSV.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeZ {
    pub edge: u32,
    pub tail: usize,
    pub head: usize,
    pub probability: f64,
    pub frequency: f64,
    pub z: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KirchhoffReport {
    pub draws: usize,
    pub edges: Vec<EdgeZ>,
    pub max_abs_z: f64,
    /// Total variation between sampled and exact tree laws, when enumerated.
    pub tree_tv: Option<f64>,
    pub passed: bool,
}

/// `(freq - p) / sqrt(p (1 - p) / n)`; 0 or infinite when `p` is 0 or 1.
pub fn z_score(p: f64, freq: f64, n: usize) -> f64 {
    let var = p * (1.0 - p) / n as f64;
    if var > 0.0 {
        (freq - p) / var.sqrt()
    } else if freq == p {
        0.0
    } else {
        f64::INFINITY
    }
}

struct Counts {
    edges: Vec<u64>,
    trees: Vec<u64>,
}

pub fn kirchhoff_validation(
    net: &Network,
    draws: usize,
    seed: u64,
    driver: &Driver,
) -> anyhow::Result<KirchhoffReport> {
    let opts = SolveOptions::default();
    let exact: Vec<f64> = net
        .edges()
        .iter()
        .map(|e| kirchhoff_edge_probability(net, e.id, &opts))
        .collect::<Result<_, _>>()?;
    let law = enumerate_spanning_trees(net)
        .ok()
        .filter(|l| l.len() <= MAX_TREES);
    let index: HashMap<u64, usize> = law
        .iter()
        .flat_map(|l| l.masks().iter().enumerate().map(|(i, &m)| (m, i)))
        .collect();
    let tree_count = law.as_ref().map_or(0, |l| l.len());
    let proto = WilsonSampler::new(net, 0)?;
    let chunks = draws.div_ceil(CHUNK);
    let parts = driver.map(
        chunks,
        || proto.clone(),
        |sampler, j| {
            let mut rng = RngStream::new(seed, j as u64);
            let mut c = Counts {
                edges: vec![0; net.edge_count()],
                trees: vec![0; tree_count],
            };
            for _ in 0..CHUNK.min(draws - j * CHUNK) {
                let t = sampler.sample(&mut rng);
                let mut mask = 0u64;
                for (p, &b) in t.mask().iter().enumerate() {
                    if b {
                        c.edges[p] += 1;
                        mask |= 1u64.checked_shl(p as u32).unwrap_or(0);
                    }
                }
                if let Some(&i) = index.get(&mask) {
                    c.trees[i] += 1;
                }
            }
            Ok::<_, wsf_core::Error>(c)
        },
    )?;
    let mut edge_hits = vec![0u64; net.edge_count()];
    let mut tree_hits = vec![0u64; tree_count];
    for c in parts {
        edge_hits
            .iter_mut()
            .zip(&c.edges)
            .for_each(|(a, b)| *a += b);
        tree_hits
            .iter_mut()
            .zip(&c.trees)
            .for_each(|(a, b)| *a += b);
    }
    let edges: Vec<EdgeZ> = net
        .edges()
        .iter()
        .zip(&exact)
        .zip(&edge_hits)
        .map(|((e, &p), &h)| {
            let freq = h as f64 / draws as f64;
            EdgeZ {
                edge: e.id.0,
                tail: e.tail,
                head: e.head,
                probability: p,
                frequency: freq,
                z: z_score(p, freq, draws),
            }
        })
        .collect();
    let max_abs_z = edges.iter().map(|e| e.z.abs()).fold(0.0, f64::max);
    let tree_tv = law.map(|l| {
        0.5 * tree_hits
            .iter()
            .enumerate()
            .map(|(i, &h)| (h as f64 / draws as f64 - l.probability(i)).abs())
            .sum::<f64>()
    });
    Ok(KirchhoffReport {
        draws,
        edges,
        max_abs_z,
        tree_tv,
        passed: max_abs_z <= Z_LIMIT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bridges_have_frequency_one() {
        let path = Network::unit(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let r = kirchhoff_validation(&path, 1000, 1, &Driver::new(Some(1)).unwrap()).unwrap();
        assert!(r.edges.iter().all(|e| e.frequency == 1.0 && e.z == 0.0));
        assert_eq!(r.tree_tv, Some(0.0));
    }

    #[test]
    fn z_scores() {
        assert_eq!(z_score(0.5, 0.5, 100), 0.0);
        assert!((z_score(0.5, 0.55, 100) - 1.0).abs() < 1e-12);
        assert_eq!(z_score(1.0, 0.9, 10), f64::INFINITY);
    }
}
