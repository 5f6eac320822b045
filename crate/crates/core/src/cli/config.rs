use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{invalid, Error, Result};
use crate::free_boundary::{positive, InitialProfile, Numerics, ProblemSpec};
use crate::halfline::HalflineSpec;
use crate::kernels::{Kernel, KernelSpec};
use crate::reaction::{Reaction, ReactionSpec};
use crate::semiwave::SemiWaveNumerics;
use crate::stationary::SteadyNumerics;

/// Every knob of a run. Missing keys take the defaults below, so a config
/// file only needs the keys it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Preset name for `scenario`; ignored by the other commands.
    pub scenario: Option<String>,
    pub kernel: KernelSpec,
    pub reaction: ReactionSpec,
    pub d: f64,
    pub mu: f64,
    pub h0: f64,
    pub u0: InitialProfile,
    pub t_end: f64,
    pub numerics: Numerics,
    pub halfline: HalflineConfig,
    pub steady: SteadyNumerics,
    pub semiwave: SemiWaveConfig,
    pub fit: FitConfig,
    pub out: PathBuf,
    pub seed: u64,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HalflineConfig {
    pub support: f64,
    pub length: f64,
    pub levels: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SemiWaveConfig {
    pub numerics: SemiWaveNumerics,
    /// `μ` values for the speed table; empty means `[mu]`.
    pub mus: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitConfig {
    /// Fraction of the run (counted from the end) used by linear and power
    /// fits.
    pub fraction: f64,
    /// Trajectory CSV read by `rates`.
    pub trajectory: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scenario: None,
            kernel: KernelSpec::Epanechnikov,
            reaction: ReactionSpec::default(),
            d: 1.0,
            mu: 2.0,
            h0: 2.0,
            u0: InitialProfile::Default,
            t_end: 100.0,
            numerics: Numerics::new(0.05, 0.05).with_sampling(0.5).with_snapshots(10.0),
            halfline: HalflineConfig::default(),
            steady: SteadyNumerics::new(0.05, 30.0),
            semiwave: SemiWaveConfig::default(),
            fit: FitConfig::default(),
            out: PathBuf::from("out"),
            seed: 0,
            threads: None,
        }
    }
}

impl Default for HalflineConfig {
    fn default() -> Self {
        HalflineConfig {
            support: 4.0,
            length: 120.0,
            levels: vec![0.5],
        }
    }
}

impl Default for SemiWaveConfig {
    fn default() -> Self {
        SemiWaveConfig {
            numerics: SemiWaveNumerics::new(0.05, 30.0),
            mus: Vec::new(),
        }
    }
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            fraction: 0.6,
            trajectory: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<RunConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        RunConfig::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Applies `key.path=value`. The value is parsed as JSON when possible
    /// and taken as a string otherwise.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (path, raw) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("expected key=value, got `{assignment}`")))?;
        let value: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut tree = serde_json::to_value(&*self)?;
        let mut node = &mut tree;
        let keys: Vec<&str> = path.split('.').collect();
        for (i, key) in keys.iter().enumerate() {
            let obj = node
                .as_object_mut()
                .ok_or_else(|| Error::Config(format!("`{}` is not a table", keys[..i].join("."))))?;
            if i + 1 == keys.len() {
                obj.insert(key.to_string(), value.clone());
                break;
            }
            node = obj.entry(key.to_string()).or_insert_with(|| Value::Object(Default::default()));
            if node.is_null() {
                *node = Value::Object(Default::default());
            }
        }
        *self = serde_json::from_value(tree).map_err(|e| Error::Config(format!("{path}: {e}")))?;
        Ok(())
    }

    pub fn kernel(&self) -> Result<Kernel> {
        Kernel::from_spec(&self.kernel)
    }

    pub fn reaction(&self) -> Result<Reaction> {
        Reaction::from_spec(&self.reaction)
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        ProblemSpec::new(self.kernel()?, self.reaction()?, self.d, self.mu, self.h0, self.u0.clone())
    }

    pub fn halfline_spec(&self) -> Result<HalflineSpec> {
        let spec = HalflineSpec {
            kernel: self.kernel()?,
            reaction: self.reaction()?,
            d: self.d,
            w0: self.u0.clone(),
            support: self.halfline.support,
            length: self.halfline.length,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn speed_ladder(&self) -> Vec<f64> {
        if self.semiwave.mus.is_empty() {
            vec![self.mu]
        } else {
            self.semiwave.mus.clone()
        }
    }

    /// Field-level checks run before any work starts.
    pub fn validate(&self) -> Result<()> {
        let problem = self.problem()?;
        positive("t_end", self.t_end)?;
        self.numerics.validate()?;
        let bound = problem.stability_bound(problem.reaction.u_star());
        if self.numerics.dt > bound {
            return Err(invalid(
                "numerics.dt",
                format!("{} exceeds the stability bound {bound}", self.numerics.dt),
            ));
        }
        positive("steady.dx", self.steady.dx)?;
        positive("steady.length", self.steady.length)?;
        positive("semiwave.numerics.dx", self.semiwave.numerics.dx)?;
        positive("semiwave.numerics.length", self.semiwave.numerics.length)?;
        if self.semiwave.mus.iter().any(|m| !(*m > 0.0)) {
            return Err(invalid("semiwave.mus", "entries must be positive"));
        }
        if !(self.fit.fraction > 0.0 && self.fit.fraction <= 0.8) {
            return Err(invalid("fit.fraction", "must lie in (0, 0.8] to skip the initial transient"));
        }
        if self.threads == Some(0) {
            return Err(invalid("threads", "must be at least 1"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let c = RunConfig::default();
        c.validate().unwrap();
        assert_eq!(RunConfig::from_json(&c.to_json()).unwrap(), c);
    }

    #[test]
    fn partial_file_takes_defaults() {
        let c = RunConfig::from_json(r#"{"mu": 3.5, "kernel": {"family": "algebraic", "gamma": 1.8}}"#).unwrap();
        assert_eq!(c.mu, 3.5);
        assert_eq!(c.kernel, KernelSpec::Algebraic { gamma: 1.8 });
        assert_eq!(c.numerics, RunConfig::default().numerics);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(RunConfig::from_json(r#"{"muu": 1}"#).is_err());
    }

    #[test]
    fn overrides_follow_key_paths() {
        let mut c = RunConfig::default();
        c.set("numerics.dx=0.025").unwrap();
        c.set("kernel={\"family\":\"gaussian\"}").unwrap();
        c.set("out=results/a").unwrap();
        c.set("fit.trajectory=traj.csv").unwrap();
        assert_eq!(c.numerics.dx, 0.025);
        assert_eq!(c.kernel, KernelSpec::Gaussian);
        assert_eq!(c.out, PathBuf::from("results/a"));
        assert_eq!(c.fit.trajectory, Some(PathBuf::from("traj.csv")));
        assert!(c.set("numerics.nope=1").is_err());
        assert!(c.set("mu").is_err());
    }

    #[test]
    fn negative_mu_is_a_field_error() {
        let c = RunConfig {
            mu: -1.0,
            ..RunConfig::default()
        };
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("mu"), "{e}");
    }

    #[test]
    fn unstable_dt_is_rejected() {
        let mut c = RunConfig::default();
        c.numerics.dt = 1.0;
        assert!(c.validate().is_err());
    }
}
