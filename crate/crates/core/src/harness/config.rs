//! Experiment configuration (JSON, unknown keys rejected).
//!
//! ```json
//! {
//!   "spec": {"alpha": 0.5, "delta": 0.1, "q": 0.1, "method": "quantile", "fwer": "bonferroni"},
//!   "env": {"kind": "synthetic", "family": {"kind": "uniform_scale", "scales": [0.4, 0.9]}},
//!   "methods": ["quantile", "mean"],
//!   "n_cal": 2000, "n_test": 1000, "trials": 500, "seed": 7,
//!   "output_dir": "out"
//! }
//! ```
//!
//! `env.kind` is one of `synthetic`, `scheduler` or `file`; see [`EnvConfig`].

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::control::{ControlSpec, FwerProcedure, Method};
use crate::envs::scheduler::DEFAULT_GRID_CAP;
use crate::envs::{SchedulerConfig, SyntheticFamily};
use crate::error::{Error, Result};
use crate::harness::io::read_json;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub spec: ControlSpec,
    pub env: EnvConfig,
    /// Methods to run on the same data; empty means `[spec.method]`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub methods: Vec<Method>,
    /// Calibration episodes; defaults to 2000 for synthetic and 300 for scheduler envs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_cal: Option<usize>,
    /// Held-out episodes used for reports and, for the scheduler, as ground truth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_test: Option<usize>,
    /// Repeated calibrations in a coverage run; defaults to 500 (synthetic) or 100 (scheduler).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// For `method = mean` on unbounded risks: risks become `min(r, cap) / cap`
    /// and the target becomes `min(alpha / cap, 1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub risk_cap: Option<f64>,
    /// Worker threads; defaults to the rayon global pool.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum EnvConfig {
    /// Analytic family with known ground truth.
    Synthetic { family: SyntheticFamily },
    /// Toy downlink scheduler over a multiplier grid.
    Scheduler(SchedulerEnv),
    /// Pre-computed risk matrix; `test` optionally names a held-out matrix on the same grid.
    File {
        risks: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test: Option<PathBuf>,
    },
}

impl EnvConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            EnvConfig::Synthetic { .. } => "synthetic",
            EnvConfig::Scheduler(_) => "scheduler",
            EnvConfig::File { .. } => "file",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchedulerEnv {
    #[serde(default)]
    pub config: SchedulerConfig,
    /// Base weights λ*.
    pub base: Vec<f64>,
    pub multipliers: Vec<f64>,
    #[serde(default = "default_grid_cap")]
    pub grid_cap: usize,
    /// When set, coverage trials resample their calibration episodes with
    /// replacement from one pool of this many simulated episodes instead of
    /// simulating fresh ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot: Option<PilotConfig>,
}

fn default_grid_cap() -> usize {
    DEFAULT_GRID_CAP
}

/// A separate batch of episodes used only to fix `alpha` and FST orderings
/// before any calibration data is seen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PilotConfig {
    pub episodes: usize,
    /// Replace `spec.alpha` by the median over grid points of the pilot `q`-quantile risk.
    #[serde(default)]
    pub derive_alpha: bool,
    /// With `fwer = fst`, order grid points by ascending pilot statistic
    /// (`q`-quantile for quantile control, mean for mean control).
    #[serde(default)]
    pub derive_ordering: bool,
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub method: Option<Method>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: Self = read_json(path)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(seed) = o.seed {
            self.seed = seed;
        }
        if let Some(dir) = &o.output_dir {
            self.output_dir = dir.clone();
        }
        if let Some(m) = o.method {
            self.spec.method = m;
            self.methods = vec![m];
        }
        self.validate()
    }

    pub fn methods(&self) -> Vec<Method> {
        if self.methods.is_empty() {
            vec![self.spec.method]
        } else {
            self.methods.clone()
        }
    }

    pub fn n_cal(&self) -> usize {
        self.n_cal.unwrap_or(match self.env {
            EnvConfig::Scheduler(_) => 300,
            _ => 2000,
        })
    }

    pub fn trials(&self) -> usize {
        self.trials.unwrap_or(match self.env {
            EnvConfig::Scheduler(_) => 100,
            _ => 500,
        })
    }

    pub fn n_test(&self) -> usize {
        self.n_test.unwrap_or(0)
    }

    /// The spec used for one method, before any pilot or cap adjustments.
    pub fn spec_for(&self, method: Method) -> ControlSpec {
        self.spec.clone().with_method(method)
    }

    /// Checks everything that does not depend on the grid size.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_cal == Some(0) {
            return bad("n_cal must be at least 1".into());
        }
        if self.trials == Some(0) {
            return bad("trials must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        let methods = self.methods();
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].contains(m) {
                return bad(format!("method {m} listed twice"));
            }
            if *m == Method::Quantile && self.spec.q.is_none() {
                return Err(Error::InvalidSpec("method = quantile needs q".into()));
            }
        }
        if let Some(cap) = self.risk_cap {
            if !(cap > 0.0 && cap.is_finite()) {
                return bad(format!("risk_cap {cap} must be positive"));
            }
        }
        match &self.env {
            EnvConfig::Synthetic { family } => family.validate()?,
            EnvConfig::Scheduler(s) => {
                s.config.validate()?;
                if s.pool_size == Some(0) {
                    return bad("pool_size must be at least 1".into());
                }
                if let Some(p) = &s.pilot {
                    if p.episodes == 0 {
                        return bad("pilot.episodes must be at least 1".into());
                    }
                    if p.derive_alpha && self.spec.q.is_none() {
                        return bad("pilot.derive_alpha needs spec.q".into());
                    }
                    if p.derive_ordering && self.spec.fwer != FwerProcedure::Fst {
                        return bad("pilot.derive_ordering needs fwer = fst".into());
                    }
                }
            }
            EnvConfig::File { .. } => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SYNTH: &str = r#"{
        "spec": {"alpha": 0.5, "delta": 0.1, "q": 0.1, "method": "quantile", "fwer": "bonferroni"},
        "env": {"kind": "synthetic", "family": {"kind": "uniform_scale", "scales": [0.4, 0.9]}},
        "seed": 3
    }"#;

    #[test]
    fn defaults_follow_env_kind() {
        let cfg: ExperimentConfig = serde_json::from_str(SYNTH).unwrap();
        cfg.validate().unwrap();
        assert_eq!((cfg.n_cal(), cfg.trials()), (2000, 500));
        assert_eq!(cfg.methods(), vec![Method::Quantile]);
        assert_eq!(cfg.output_dir, PathBuf::from("out"));

        let sched = r#"{
            "spec": {"alpha": 2.0, "delta": 0.1, "q": 0.1, "method": "quantile", "fwer": "fst"},
            "env": {"kind": "scheduler", "base": [1, 10, 200, 1], "multipliers": [0.5, 1, 1.5, 2],
                    "pilot": {"episodes": 20, "derive_alpha": true, "derive_ordering": true}}
        }"#;
        let cfg: ExperimentConfig = serde_json::from_str(sched).unwrap();
        cfg.validate().unwrap();
        assert_eq!((cfg.n_cal(), cfg.trials()), (300, 100));
        let EnvConfig::Scheduler(s) = &cfg.env else { panic!() };
        assert_eq!(s.config, SchedulerConfig::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let extra = SYNTH.replace("\"seed\": 3", "\"seed\": 3, \"sede\": 4");
        assert!(serde_json::from_str::<ExperimentConfig>(&extra).is_err());
        let nested = SYNTH.replace("\"scales\"", "\"extra\": 1, \"scales\"");
        assert!(serde_json::from_str::<ExperimentConfig>(&nested).is_err());
        let env = r#"{"spec": {"alpha": 1, "delta": 0.1, "method": "mean", "fwer": "bonferroni"},
            "env": {"kind": "scheduler", "base": [1,1,1,1], "multipliers": [1], "colour": 1}}"#;
        assert!(serde_json::from_str::<ExperimentConfig>(env).is_err());
    }

    #[test]
    fn overrides_and_validation() {
        let mut cfg: ExperimentConfig = serde_json::from_str(SYNTH).unwrap();
        cfg.apply(&Overrides {
            seed: Some(9),
            output_dir: Some("elsewhere".into()),
            method: Some(Method::Mean),
        })
        .unwrap();
        assert_eq!((cfg.seed, cfg.methods()), (9, vec![Method::Mean]));
        assert_eq!(cfg.output_dir, PathBuf::from("elsewhere"));

        cfg.spec.q = None;
        assert!(cfg
            .apply(&Overrides {
                method: Some(Method::Quantile),
                ..Overrides::default()
            })
            .is_err());

        let mut cfg: ExperimentConfig = serde_json::from_str(SYNTH).unwrap();
        cfg.trials = Some(0);
        assert!(matches!(cfg.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn json_round_trip() {
        let cfg: ExperimentConfig = serde_json::from_str(SYNTH).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(cfg, back);
    }
}
