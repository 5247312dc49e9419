//! Front end for `conevol`: file formats, the audit harness and the
//! subcommand implementations behind the `conevol` binary.

pub mod audit;
pub mod commands;
pub mod format;
pub mod io;

use anyhow::{anyhow, bail, Result};
use conevol::checker::Tolerances;
use serde::{Deserialize, Serialize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;
pub const EXIT_CERTIFICATE: i32 = 3;

/// All numeric thresholds used by `check`, `reduce` and `audit`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub eq: f64,
    pub violate: f64,
    pub lin: f64,
    /// ‖Σ area·normal‖ / total area.
    pub closure: f64,
    pub concavity: f64,
    /// Profile volume, relative.
    pub volume: f64,
    /// Profile centroid, relative to the diameter.
    pub centroid: f64,
    /// Endpoint cone-volume masses, relative.
    pub mass: f64,
    /// Balanced frustum centroid, relative to the height.
    pub balanced: f64,
    /// Slack allowed in the frustum comparison.
    pub compare: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        let t = Tolerances::default();
        Thresholds {
            eq: t.eq,
            violate: t.violate,
            lin: t.lin,
            closure: 1e-10,
            concavity: 1e-8,
            volume: 1e-6,
            centroid: 1e-6,
            mass: 1e-8,
            balanced: 1e-9,
            compare: 1e-9,
        }
    }
}

impl Thresholds {
    pub fn check(&self) -> Tolerances {
        Tolerances {
            eq: self.eq,
            violate: self.violate,
            lin: self.lin,
        }
    }

    /// Applies `key=value` overrides, comma separated or repeated.
    pub fn with_overrides(mut self, overrides: &[String]) -> Result<Self> {
        for item in overrides.iter().flat_map(|s| s.split(',')).filter(|s| !s.trim().is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| anyhow!("--tol expects key=value, got {item:?}"))?;
            let v: f64 = value
                .trim()
                .parse()
                .map_err(|_| anyhow!("--tol {key}: {value:?} is not a number"))?;
            if !(v.is_finite() && v >= 0.0) {
                bail!("--tol {key}: must be finite and nonnegative");
            }
            let slot = match key.trim() {
                "eq" => &mut self.eq,
                "violate" => &mut self.violate,
                "lin" => &mut self.lin,
                "closure" => &mut self.closure,
                "concavity" => &mut self.concavity,
                "volume" => &mut self.volume,
                "centroid" => &mut self.centroid,
                "mass" => &mut self.mass,
                "balanced" => &mut self.balanced,
                "compare" => &mut self.compare,
                other => bail!(
                    "--tol: unknown key {other:?} (eq, violate, lin, closure, concavity, volume, centroid, mass, balanced, compare)"
                ),
            };
            *slot = v;
        }
        Ok(self)
    }
}

/// What a command prints and how the process should exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    pub fn ok(stdout: String) -> Self {
        Outcome { stdout, code: EXIT_OK }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let t = Thresholds::default()
            .with_overrides(&["eq=1e-9,lin=2e-6".into(), "closure=0".into()])
            .unwrap();
        assert_eq!((t.eq, t.lin, t.closure), (1e-9, 2e-6, 0.0));
        assert_eq!(t.violate, 1e-7);
        assert!(Thresholds::default().with_overrides(&["nope=1".into()]).is_err());
        assert!(Thresholds::default().with_overrides(&["eq".into()]).is_err());
        assert!(Thresholds::default().with_overrides(&["eq=-1".into()]).is_err());
    }
}
