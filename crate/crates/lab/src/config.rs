//! Experiment configuration files.
//!
//! A config is a JSON object:
//!
//! ```json
//! {
//!   "experiment": "tail",
//!   "lattice": { "dim": 3, "radius": 32, "boundary": "wired" },
//!   "samples": 10000,
//!   "seed": 1,
//!   "radii": [8, 16, 32],
//!   "out": "tail.csv",
//!   "workers": 8,
//!   "fit_window": [2.0, 12.0],
//!   "rule": "ball-min"
//! }
//! ```
//!
//! `experiment` is one of `tail`, `one-end`, `martingale`, `kirchhoff`.
//! Only `experiment`, `lattice`, `samples` and `seed` are required. When
//! `radii` is empty the lattice radius is used alone. `boundary` is `free`,
//! `wired` (default) or `wired-with-root`. Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use wsf_core::ends::EdgeRule;
use wsf_core::{BoundaryMode, LatticeBoxSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Tail,
    OneEnd,
    Martingale,
    Kirchhoff,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Free,
    #[default]
    Wired,
    WiredWithRoot,
}

impl From<Boundary> for BoundaryMode {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Free => BoundaryMode::Free,
            Boundary::Wired => BoundaryMode::Wired,
            Boundary::WiredWithRoot => BoundaryMode::WiredWithRoot,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    #[default]
    BallMin,
    MaxCurrent,
}

impl From<Rule> for EdgeRule {
    fn from(r: Rule) -> Self {
        match r {
            Rule::BallMin => EdgeRule::BallMin,
            Rule::MaxCurrent => EdgeRule::MaxCurrent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub dim: usize,
    pub radius: usize,
    #[serde(default)]
    pub boundary: Boundary,
}

impl LatticeConfig {
    pub fn spec(&self, radius: usize) -> LatticeBoxSpec {
        LatticeBoxSpec::new(self.dim, radius, self.boundary.into())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub lattice: LatticeConfig,
    pub samples: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub radii: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Fit window `[lo, hi]` of the tail experiment; defaults to `[2, r/3]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_window: Option<(f64, f64)>,
    #[serde(default)]
    pub rule: Rule,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        source: serde_json::Error,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ExperimentConfig {
    pub fn new(
        experiment: ExperimentKind,
        lattice: LatticeConfig,
        samples: usize,
        seed: u64,
    ) -> Self {
        ExperimentConfig {
            experiment,
            lattice,
            samples,
            seed,
            radii: Vec::new(),
            out: None,
            workers: None,
            fit_window: None,
            rule: Rule::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_owned(),
            source,
        })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| ConfigError::Parse {
            path: path.to_owned(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.to_string()));
        if self.samples == 0 {
            return bad("samples must be at least 1");
        }
        if self.lattice.dim == 0 {
            return bad("lattice dimension must be at least 1");
        }
        if self.radii.windows(2).any(|w| w[0] >= w[1]) {
            return bad("radii must be strictly increasing");
        }
        if self.radii().contains(&0) {
            return bad("radii must be positive");
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1");
        }
        if let Some((lo, hi)) = self.fit_window {
            if !(lo > 0.0 && lo < hi && hi.is_finite()) {
                return bad("fit_window must satisfy 0 < lo < hi < inf");
            }
        }
        if self.experiment == ExperimentKind::Tail {
            if self.lattice.dim < 3 {
                return bad("the tail experiment needs dimension at least 3");
            }
            if self.radii().iter().any(|&r| 2 * r + 1 < 16) {
                return bad("the tail experiment needs a box side of at least 16");
            }
        }
        if self.experiment != ExperimentKind::Kirchhoff && self.lattice.boundary != Boundary::Wired
        {
            return bad("this experiment needs a wired lattice");
        }
        Ok(())
    }

    /// The radii to run: `radii`, or the lattice radius alone.
    pub fn radii(&self) -> Vec<usize> {
        if self.radii.is_empty() {
            vec![self.lattice.radius]
        } else {
            self.radii.clone()
        }
    }
}

/// Parses `d,r` or `d,r,MODE` with MODE one of `free`, `wired`,
/// `wired-with-root`.
pub fn parse_lattice(s: &str) -> Result<LatticeConfig, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| {
        t.parse::<usize>()
            .map_err(|_| format!("bad number `{t}` in `{s}`"))
    };
    let boundary = match parts.get(2) {
        None => Boundary::Wired,
        Some(&"free") => Boundary::Free,
        Some(&"wired") => Boundary::Wired,
        Some(&"wired-with-root") => Boundary::WiredWithRoot,
        Some(m) => return Err(format!("unknown boundary mode `{m}`")),
    };
    match parts.len() {
        2 | 3 => Ok(LatticeConfig {
            dim: num(parts[0])?,
            radius: num(parts[1])?,
            boundary,
        }),
        _ => Err(format!("expected `d,r[,MODE]`, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<ExperimentConfig, String> {
        let cfg: ExperimentConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    #[test]
    fn minimal_and_full_configs() {
        let c = parse(
            r#"{"experiment":"one-end","lattice":{"dim":3,"radius":8},"samples":10,"seed":4}"#,
        )
        .unwrap();
        assert_eq!(c.lattice.boundary, Boundary::Wired);
        assert_eq!(c.radii(), [8]);
        let c = parse(
            r#"{"experiment":"tail","lattice":{"dim":3,"radius":32,"boundary":"wired"},"samples":5,"seed":1,
                "radii":[16,32],"out":"x.csv","workers":2,"fit_window":[2,12],"rule":"max-current"}"#,
        )
        .unwrap();
        assert_eq!(c.fit_window, Some((2.0, 12.0)));
        assert_eq!(c.rule, Rule::MaxCurrent);
    }

    #[test]
    fn rejects_bad_configs() {
        let base = |extra: &str| {
            format!(r#"{{"experiment":"tail","lattice":{{"dim":3,"radius":16}},"seed":1{extra}}}"#)
        };
        assert!(parse(&base(r#","samples":0"#)).is_err());
        assert!(parse(&base(r#","samples":1,"radii":[16,8]"#)).is_err());
        assert!(parse(&base(r#","samples":1,"radii":[4]"#)).is_err());
        assert!(parse(&base(r#","samples":1,"colour":"red""#)).is_err());
        assert!(parse(&base(r#","samples":1,"fit_window":[5,2]"#)).is_err());
        assert!(parse(&base(r#","samples":1"#)).is_ok());
        assert!(parse(
            r#"{"experiment":"tail","lattice":{"dim":2,"radius":16},"samples":1,"seed":1}"#
        )
        .is_err());
    }

    #[test]
    fn lattice_flags() {
        assert_eq!(parse_lattice("3,8").unwrap().boundary, Boundary::Wired);
        assert_eq!(parse_lattice("2, 4, free").unwrap().radius, 4);
        assert!(parse_lattice("2").is_err());
        assert!(parse_lattice("2,4,periodic").is_err());
    }
}
