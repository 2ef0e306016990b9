use alloc::format;
use alloc::vec::Vec;

use crate::error::{invalid, Result};
use crate::isoperimetry::subsets::{boundary_and_pi, for_each_connected, mask_of, neighbour_masks};
use crate::network::Network;

/// Which edges of `K` count as its boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryVariant {
    /// Every edge with exactly one endpoint in `K`.
    #[default]
    Edge,
    /// Only edges from `K` into the component of `G \ K` holding the wired
    /// vertex.
    Infinite,
}

/// `kappa(t) = c * t^gamma`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerProfile {
    pub scale: f64,
    pub exponent: f64,
}

impl PowerProfile {
    pub fn new(scale: f64, exponent: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(invalid(format!("scale must be positive, got {scale}")));
        }
        if !(0.0..=1.0).contains(&exponent) {
            return Err(invalid(format!(
                "exponent must lie in [0, 1], got {exponent}"
            )));
        }
        Ok(PowerProfile { scale, exponent })
    }

    /// `c * t^((d-1)/d)`, the shape of the profile of `Z^d`.
    pub fn lattice(dim: usize, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dimension must be positive"));
        }
        Self::new(scale, (dim - 1) as f64 / dim as f64)
    }

    /// `c * t^(2/3)`, the profile forced by cubic volume growth.
    pub fn cubic_growth(scale: f64) -> Result<Self> {
        Self::new(scale, 2.0 / 3.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.scale * libm::pow(t, self.exponent)
    }

    /// The least `alpha` with `f(2t) <= alpha f(t)`.
    pub fn doubling_constant(&self) -> f64 {
        libm::pow(2.0, self.exponent)
    }
}

/// A nondecreasing step function: `kappa(t) = values[i]` for
/// `breaks[i-1] < t <= breaks[i]`, and `beyond` past the last break.
#[derive(Clone, Debug, PartialEq)]
pub struct StepProfile {
    breaks: Vec<f64>,
    values: Vec<f64>,
    beyond: f64,
}

impl StepProfile {
    /// Builds a table from `(t_i, kappa_i)` rows with increasing `t_i`.
    pub fn new(rows: Vec<(f64, f64)>, beyond: f64) -> Result<Self> {
        let mut last = (f64::NEG_INFINITY, 0.0);
        for &(t, k) in &rows {
            if !t.is_finite() || t <= last.0 {
                return Err(invalid(format!(
                    "break points must increase, got {t} after {}",
                    last.0
                )));
            }
            if k.is_nan() || k < last.1 {
                return Err(invalid(format!(
                    "profile must be nondecreasing, got {k} at t = {t}"
                )));
            }
            last = (t, k);
        }
        if beyond.is_nan() || beyond < last.1 {
            return Err(invalid("value past the last break must not decrease"));
        }
        let (breaks, values) = rows.into_iter().unzip();
        Ok(StepProfile {
            breaks,
            values,
            beyond,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let i = self.breaks.partition_point(|&b| b < t);
        self.values.get(i).copied().unwrap_or(self.beyond)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn beyond(&self) -> f64 {
        self.beyond
    }

    /// Builds the profile `t -> min { b : (pi, b) in candidates, pi >= t }`.
    pub(crate) fn from_candidates(mut cands: Vec<(f64, f64)>) -> Self {
        cands.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut rows: Vec<(f64, f64)> = Vec::new();
        let mut best = f64::INFINITY;
        for &(pi, b) in cands.iter().rev() {
            best = best.min(b);
            match rows.last_mut() {
                Some(r) if r.0 == pi => r.1 = best,
                Some(r) if r.1 == best => {}
                _ => rows.push((pi, best)),
            }
        }
        rows.reverse();
        StepProfile {
            breaks: rows.iter().map(|r| r.0).collect(),
            values: rows.iter().map(|r| r.1).collect(),
            beyond: f64::INFINITY,
        }
    }
}

/// An isoperimetric profile `t -> kappa(t)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    Power(PowerProfile),
    Table(StepProfile),
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Power(p) => p.eval(t),
            Profile::Table(s) => s.eval(t),
        }
    }
}

impl From<PowerProfile> for Profile {
    fn from(p: PowerProfile) -> Self {
        Profile::Power(p)
    }
}

impl From<StepProfile> for Profile {
    fn from(s: StepProfile) -> Self {
        Profile::Table(s)
    }
}

/// The exact profile `kappa(G, A, .)` by exhaustive search over connected
/// vertex sets `K` containing `A`.
///
/// `K` ranges over proper subsets avoiding the wired vertex, if any. The
/// [`BoundaryVariant::Infinite`] variant needs a wired vertex.
pub fn profile_table(
    net: &Network,
    a: &[usize],
    variant: BoundaryVariant,
    cap: usize,
) -> Result<StepProfile> {
    let n = net.vertex_count();
    let nb = neighbour_masks(net, cap)?;
    let required = mask_of(a, n)?;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let wired = net.wired();
    let allowed = match wired {
        Some(w) => {
            if required >> w & 1 == 1 {
                return Err(invalid("A contains the wired vertex"));
            }
            all & !(1 << w)
        }
        None => all,
    };
    if variant == BoundaryVariant::Infinite && wired.is_none() {
        return Err(invalid(
            "the infinite-boundary variant needs a wired vertex",
        ));
    }
    let mut cands = Vec::new();
    for_each_connected(&nb, allowed, |k| {
        if k & required != required || k == all {
            return;
        }
        let (edge, pi) = boundary_and_pi(net, k);
        let b = match (variant, wired) {
            (BoundaryVariant::Infinite, Some(w)) => infinite_boundary(net, &nb, k, w),
            _ => edge,
        };
        cands.push((pi, b));
    });
    Ok(StepProfile::from_candidates(cands))
}

/// `kappa(G, A, t)`; `+inf` when no admissible `K` has `pi(K) >= t`.
pub fn profile_brute(
    net: &Network,
    a: &[usize],
    t: f64,
    variant: BoundaryVariant,
    cap: usize,
) -> Result<f64> {
    Ok(profile_table(net, a, variant, cap)?.eval(t))
}

fn infinite_boundary(net: &Network, nb: &[u64], k: u64, w: usize) -> f64 {
    let mut seen = 1u64 << w;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = nb[v] & !k & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    net.edges()
        .iter()
        .filter(|e| {
            let (t, h) = (k >> e.tail & 1 == 1, k >> e.head & 1 == 1);
            (t && seen >> e.head & 1 == 1) || (h && seen >> e.tail & 1 == 1)
        })
        .map(|e| e.conductance)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isoperimetry::DEFAULT_VERTEX_CAP;

    fn cycle4() -> Network {
        Network::unit(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap()
    }

    #[test]
    fn four_cycle() {
        let c = cycle4();
        let k = |t| profile_brute(&c, &[], t, BoundaryVariant::Edge, DEFAULT_VERTEX_CAP).unwrap();
        assert_eq!(k(1.0), 2.0);
        assert_eq!(k(5.0), 2.0);
        assert_eq!(k(6.0), 2.0);
        assert_eq!(k(6.5), f64::INFINITY);
        assert_eq!(k(9.0), f64::INFINITY);
    }

    #[test]
    fn required_set() {
        // path 0-1-2-3 with A = {1}: {1} has boundary 2, {0,1} has 1
        let p = Network::unit(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let t = profile_table(&p, &[1], BoundaryVariant::Edge, 16).unwrap();
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(3.0), 1.0);
        // {0,1,2} is the largest admissible set containing 1
        assert_eq!(t.eval(5.0), 1.0);
        assert_eq!(t.eval(5.5), f64::INFINITY);
    }

    #[test]
    fn variants_agree_after_filling_holes() {
        // a 4-cycle around the hole 4, with the wired vertex 5 off vertex 0
        let g = Network::unit(
            6,
            [
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 0),
                (0, 4),
                (1, 4),
                (2, 4),
                (3, 4),
                (0, 5),
            ],
        )
        .unwrap()
        .with_wired(5)
        .unwrap();
        let nb = neighbour_masks(&g, 16).unwrap();
        assert_eq!(boundary_and_pi(&g, 0b1111).0, 5.0);
        assert_eq!(infinite_boundary(&g, &nb, 0b1111, 5), 1.0);
        for a in [&[][..], &[0], &[2, 3], &[0, 1, 2, 3]] {
            let e = profile_table(&g, a, BoundaryVariant::Edge, 16).unwrap();
            let i = profile_table(&g, a, BoundaryVariant::Infinite, 16).unwrap();
            assert_eq!(e, i);
        }
        assert!(profile_table(&cycle4(), &[], BoundaryVariant::Infinite, 16).is_err());
    }

    #[test]
    fn table_validation() {
        assert!(StepProfile::new(vec![(1.0, 2.0), (1.0, 3.0)], 3.0).is_err());
        assert!(StepProfile::new(vec![(1.0, 2.0), (2.0, 1.0)], 3.0).is_err());
        let s = StepProfile::new(vec![(1.0, 2.0), (2.0, 3.0)], 4.0).unwrap();
        assert_eq!(
            [
                s.eval(0.0),
                s.eval(1.0),
                s.eval(1.5),
                s.eval(2.0),
                s.eval(7.0)
            ],
            [2.0, 2.0, 3.0, 3.0, 4.0]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let path = Network::unit(20, (0..19).map(|i| (i, i + 1))).unwrap();
        assert!(profile_table(&path, &[], BoundaryVariant::Edge, 16).is_err());
        assert!(profile_table(&path, &[], BoundaryVariant::Edge, 20).is_ok());
    }
}
