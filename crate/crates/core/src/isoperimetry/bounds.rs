use alloc::format;
use alloc::vec::Vec;

use crate::electrical::{effective_resistance, SolveOptions};
use crate::error::{invalid, Error, Result};
use crate::isoperimetry::profile::{PowerProfile, Profile, StepProfile};
use crate::isoperimetry::subsets::{boundary_and_pi, for_each_connected, neighbour_masks};
use crate::network::Network;

/// `s_0, ..., s_K` with `s_{k+1} = s_k + kappa(s_k)/2`. Stops early once
/// `kappa(s_k)` is infinite.
pub fn sk_sequence(profile: &Profile, s0: f64, steps: usize) -> Result<Vec<f64>> {
    check_start(s0)?;
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(s);
    for _ in 0..steps {
        let k = profile.eval(s);
        if k.is_nan() || k < 0.0 {
            return Err(invalid(format!("profile value {k} at t = {s}")));
        }
        if k == f64::INFINITY {
            break;
        }
        s += k / 2.0;
        out.push(s);
    }
    Ok(out)
}

fn check_start(s0: f64) -> Result<()> {
    if !(s0 > 0.0 && s0.is_finite()) {
        return Err(invalid(format!("s0 must be positive and finite, got {s0}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundStatus {
    /// `value` is a rigorous upper bound for the full series.
    Converged,
    /// The series diverges; `value` is `+inf`.
    Divergent,
    /// No tail certificate: `value` is only the partial sum.
    LowerEstimateOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsOptions {
    /// Stop once the certified tail is below this.
    pub tol: f64,
    pub max_steps: usize,
    /// Divergence is declared when `s_k` grows by less than this factor
    /// over `stagnation_window` steps.
    pub stagnation_factor: f64,
    pub stagnation_window: usize,
}

impl Default for HsOptions {
    fn default() -> Self {
        HsOptions {
            tol: 1e-9,
            max_steps: 1_000_000,
            stagnation_factor: 1.0 + 1e-6,
            stagnation_window: 10_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HsBound {
    pub value: f64,
    pub partial_sum: f64,
    /// Certified bound on the terms not summed explicitly.
    pub tail: f64,
    pub steps: usize,
    pub last_s: f64,
    pub status: BoundStatus,
}

/// `sum_k 2/kappa(s_k)`, the resistance bound attached to a profile.
pub fn hs_resistance_bound(profile: &Profile, s0: f64, opts: &HsOptions) -> Result<HsBound> {
    check_start(s0)?;
    let divergent = |steps, partial_sum, last_s| HsBound {
        value: f64::INFINITY,
        partial_sum,
        tail: f64::INFINITY,
        steps,
        last_s,
        status: BoundStatus::Divergent,
    };
    if let Profile::Power(p) = profile {
        if p.exponent <= 0.5 {
            return Ok(divergent(0, 0.0, s0));
        }
    }
    let mut s = s0;
    let mut sum = 0.0;
    let mut window_start = s0;
    let mut tail = None;
    for k in 0..opts.max_steps {
        tail = tail_bound(profile, s);
        if let Some(t) = tail {
            if t < opts.tol {
                return Ok(finish(sum, t, k, s));
            }
        }
        let kap = profile.eval(s);
        if kap.is_nan() || kap < 0.0 {
            return Err(invalid(format!("profile value {kap} at t = {s}")));
        }
        if kap == f64::INFINITY {
            return Ok(finish(sum, 0.0, k, s));
        }
        if kap == 0.0 || constant_from(profile, s) {
            return Ok(divergent(k, sum, s));
        }
        sum += 2.0 / kap;
        s += kap / 2.0;
        if (k + 1) % opts.stagnation_window == 0 {
            if s < window_start * opts.stagnation_factor {
                return Ok(divergent(k + 1, sum, s));
            }
            window_start = s;
        }
    }
    let steps = opts.max_steps;
    Ok(match tail_bound(profile, s).or(tail) {
        Some(t) => finish(sum, t, steps, s),
        None => HsBound {
            value: sum,
            partial_sum: sum,
            tail: f64::NAN,
            steps,
            last_s: s,
            status: BoundStatus::LowerEstimateOnly,
        },
    })
}

fn finish(sum: f64, tail: f64, steps: usize, last_s: f64) -> HsBound {
    HsBound {
        value: sum + tail,
        partial_sum: sum,
        tail,
        steps,
        last_s,
        status: BoundStatus::Converged,
    }
}

/// A table past its last break with a finite value is constant from there.
fn constant_from(profile: &Profile, s: f64) -> bool {
    match profile {
        Profile::Table(t) => t.beyond().is_finite() && t.breaks().last().is_none_or(|&b| s > b),
        Profile::Power(_) => false,
    }
}

/// Rigorous bound on `sum_{k >= m} 2/kappa(s_k)` given `s_m = s`.
fn tail_bound(profile: &Profile, s: f64) -> Option<f64> {
    let Profile::Power(p) = profile else {
        return None;
    };
    let c = p.scale;
    if p.exponent == 1.0 {
        // geometric: s_k = s (1 + c/2)^k
        return Some(2.0 * (2.0 + c) / (c * c * s));
    }
    integral_bound(p, p.doubling_constant(), s).ok()
}

/// `int_{pi_A}^inf 4 alpha^2 / f(t)^2 dt` for `f(t) = c t^gamma`, which
/// bounds the resistance series when `f(t) <= t` and `f(2t) <= alpha f(t)`
/// for `t >= pi_A`.
pub fn integral_bound(f: &PowerProfile, alpha: f64, pi_a: f64) -> Result<f64> {
    let (c, g) = (f.scale, f.exponent);
    if !(c > 0.0) || !(g > 0.0 && g <= 1.0) {
        return Err(invalid(format!(
            "need c > 0 and gamma in (0, 1], got c = {c}, gamma = {g}"
        )));
    }
    check_start(pi_a)?;
    if !(alpha >= f.doubling_constant()) {
        return Err(invalid(format!(
            "alpha = {alpha} is below 2^gamma = {}",
            f.doubling_constant()
        )));
    }
    // c t^(g-1) is nonincreasing, so f(t) <= t on [pi_A, inf) iff at pi_A
    if f.eval(pi_a) > pi_a {
        return Err(invalid(format!("f(t) > t at t = {pi_a}")));
    }
    if 2.0 * g <= 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(4.0 * alpha * alpha / (c * c) * libm::pow(pi_a, 1.0 - 2.0 * g) / (2.0 * g - 1.0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteHsReport {
    pub bound: f64,
    /// `ER(a, z)`.
    pub exact: f64,
    /// `t -> min |boundary K|_c` over connected `K` with `a` in `K`, `z`
    /// not in `K`, `pi(K) >= t`.
    pub profile: StepProfile,
    pub s: Vec<f64>,
}

impl FiniteHsReport {
    pub fn gap(&self) -> f64 {
        self.bound - self.exact
    }
}

/// The resistance bound on a finite network, from the profile of sets
/// separating `a` from `z`, against the exact `ER(a, z)`.
pub fn finite_hs_bound(
    net: &Network,
    a: usize,
    z: usize,
    cap: usize,
    opts: &SolveOptions,
) -> Result<FiniteHsReport> {
    let n = net.vertex_count();
    if a >= n || z >= n || a == z {
        return Err(invalid("a and z must be distinct vertices"));
    }
    let nb = neighbour_masks(net, cap)?;
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let mut cands = Vec::new();
    for_each_connected(&nb, all & !(1 << z), |k| {
        if k >> a & 1 == 1 {
            cands.push(boundary_and_pi(net, k));
        }
    });
    let cands = cands.into_iter().map(|(b, pi)| (pi, b)).collect();
    let table = Profile::Table(StepProfile::from_candidates(cands));
    let s0 = boundary_and_pi(net, 1 << a).1;
    let hs = hs_resistance_bound(&table, s0, &HsOptions::default())?;
    let exact = effective_resistance(net, &[a], &[z], opts)?;
    if hs.status != BoundStatus::Converged {
        return Err(Error::Inconsistent(format!(
            "finite profile series did not terminate: {hs:?}"
        )));
    }
    if hs.value < exact {
        return Err(Error::Inconsistent(format!(
            "bound {} is below ER(a, z) = {exact}",
            hs.value
        )));
    }
    let s = sk_sequence(&table, s0, hs.steps)?;
    let Profile::Table(profile) = table else {
        unreachable!()
    };
    Ok(FiniteHsReport {
        bound: hs.value,
        exact,
        profile,
        s,
    })
}
