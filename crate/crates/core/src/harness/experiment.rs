//! Data generation and per-method setup shared by the commands.
//!
//! Every episode seed is `derive_seed(master, stream, index)` with the stream
//! constants of [`crate::seed::stream`], so any batch can be regenerated on its
//! own and the order in which episodes or trials execute never matters.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{ControlSpec, Method};
use crate::envs::scheduler::{build_multiplier_grid, evaluate_grid};
use crate::envs::SyntheticFamily;
use crate::error::{Error, Result};
use crate::grid::{HyperGrid, HyperPoint};
use crate::harness::config::{EnvConfig, ExperimentConfig, SchedulerEnv};
use crate::harness::stats::{empirical_quantile, lower_median};
use crate::pvalue::empirical_mean_risk;
use crate::risk::{RewardMatrix, RiskMatrix};
use crate::seed::{derive_seed, stream};

/// Calibration or test data on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub risks: RiskMatrix,
    pub rewards: Option<RewardMatrix>,
}

/// Runs `f` on a dedicated pool of `workers` threads, or on the global pool.
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    match workers {
        None => f(),
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidConfig(format!("cannot start {w} workers: {e}")))?
            .install(f),
    }
}

pub fn scheduler_grid(env: &SchedulerEnv) -> Result<HyperGrid> {
    build_multiplier_grid(&HyperPoint::new(0, env.base.clone()), &env.multipliers, env.grid_cap)
}

/// The grid implied by a generated environment; `None` for file inputs.
pub fn env_grid(cfg: &ExperimentConfig) -> Result<Option<HyperGrid>> {
    match &cfg.env {
        EnvConfig::Synthetic { family } => family.grid().map(Some),
        EnvConfig::Scheduler(env) => scheduler_grid(env).map(Some),
        EnvConfig::File { .. } => Ok(None),
    }
}

/// Simulates `count` scheduler episodes, indices `first..first + count` of `stream`.
/// Risks are mean first-class delays in ms (not unit-bounded).
pub fn simulate_batch(
    env: &SchedulerEnv,
    grid: &HyperGrid,
    master: u64,
    stream: u64,
    first: usize,
    count: usize,
) -> Result<Batch> {
    let episodes = (first..first + count)
        .into_par_iter()
        .map(|i| evaluate_grid(&env.config, grid, derive_seed(master, stream, i as u64)))
        .collect::<Result<Vec<_>>>()?;
    let risks = episodes.iter().map(|e| e.iter().map(|o| o.risk_ms).collect()).collect();
    let rewards = episodes.iter().map(|e| e.iter().map(|o| o.reward).collect()).collect();
    Ok(Batch {
        risks: RiskMatrix::new(risks, false)?,
        rewards: Some(RewardMatrix::new(rewards)?),
    })
}

pub fn sample_batch(family: &SyntheticFamily, grid: &HyperGrid, n: usize, seed: u64) -> Result<Batch> {
    Ok(Batch {
        risks: family.sample_risk_matrix(grid, n, seed)?,
        rewards: None,
    })
}

/// Per-point statistics of a pilot run, fixed before calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PilotSummary {
    pub episodes: usize,
    pub q: f64,
    pub quantiles: Vec<f64>,
    pub means: Vec<f64>,
    /// Median over grid points of `quantiles`.
    pub median_quantile: f64,
    /// Grid ids by ascending pilot quantile, ties by id.
    pub quantile_ordering: Vec<usize>,
    /// Grid ids by ascending pilot mean, ties by id.
    pub mean_ordering: Vec<usize>,
}

impl PilotSummary {
    pub fn from_matrix(m: &RiskMatrix, q: f64) -> Result<Self> {
        let mut quantiles = Vec::with_capacity(m.width());
        let mut means = Vec::with_capacity(m.width());
        for mut col in m.columns() {
            means.push(empirical_mean_risk(&col)?);
            col.sort_by(f64::total_cmp);
            quantiles.push(empirical_quantile(&col, q));
        }
        let order_by = |v: &[f64]| {
            let mut ids: Vec<usize> = (0..v.len()).collect();
            ids.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
            ids
        };
        Ok(Self {
            episodes: m.n(),
            q,
            median_quantile: lower_median(&quantiles),
            quantile_ordering: order_by(&quantiles),
            mean_ordering: order_by(&means),
            quantiles,
            means,
        })
    }

    pub fn ordering(&self, method: Method) -> &[usize] {
        match method {
            Method::Mean => &self.mean_ordering,
            Method::Quantile => &self.quantile_ordering,
        }
    }
}

/// Runs the configured pilot of a scheduler environment, if any.
pub fn run_pilot(cfg: &ExperimentConfig, grid: &HyperGrid) -> Result<Option<PilotSummary>> {
    let EnvConfig::Scheduler(env) = &cfg.env else {
        return Ok(None);
    };
    let Some(pilot) = &env.pilot else {
        return Ok(None);
    };
    let q = cfg.spec.q.unwrap_or(0.1);
    let batch = simulate_batch(env, grid, cfg.seed, stream::PILOT, 0, pilot.episodes)?;
    PilotSummary::from_matrix(&batch.risks, q).map(Some)
}

/// Target level in the native risk units: the pilot-derived one when configured.
pub fn native_alpha(cfg: &ExperimentConfig, pilot: Option<&PilotSummary>) -> f64 {
    match (&cfg.env, pilot) {
        (EnvConfig::Scheduler(SchedulerEnv { pilot: Some(p), .. }), Some(s)) if p.derive_alpha => s.median_quantile,
        _ => cfg.spec.alpha,
    }
}

/// How one method sees the data: its spec and an optional risk cap.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSetup {
    pub method: Method,
    /// Spec handed to the calibrator; `alpha` is in capped units when `cap` is set.
    pub spec: ControlSpec,
    pub cap: Option<f64>,
}

impl MethodSetup {
    pub fn new(
        cfg: &ExperimentConfig,
        method: Method,
        grid_len: usize,
        bounded_unit: bool,
        pilot: Option<&PilotSummary>,
    ) -> Result<Self> {
        let mut spec = cfg.spec_for(method);
        spec.alpha = native_alpha(cfg, pilot);
        if let (EnvConfig::Scheduler(SchedulerEnv { pilot: Some(p), .. }), Some(s)) = (&cfg.env, pilot) {
            if p.derive_ordering {
                spec.ordering = Some(s.ordering(method).to_vec());
            }
        }
        let mut cap = None;
        if method == Method::Mean && !bounded_unit {
            let c = cfg
                .risk_cap
                .ok_or_else(|| Error::SchemaMismatch("method = mean needs unit-bounded risks or a risk_cap".into()))?;
            spec.alpha = (spec.alpha / c).min(1.0);
            cap = Some(c);
        }
        spec.validate(grid_len)?;
        Ok(Self { method, spec, cap })
    }

    /// The matrix the calibrator should see.
    pub fn view(&self, m: &RiskMatrix) -> Result<RiskMatrix> {
        match self.cap {
            None => Ok(m.clone()),
            Some(c) => RiskMatrix::new(
                m.rows()
                    .iter()
                    .map(|r| r.iter().map(|v| v.min(c) / c).collect())
                    .collect(),
                true,
            ),
        }
    }
}

/// Per-point ground truth used to judge certified sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    /// `analytic` for synthetic families, `held_out` for an estimate from test episodes.
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub episodes: Option<usize>,
    pub means: Vec<f64>,
    pub quantiles: Vec<f64>,
    /// Means of `min(r, cap) / cap`, present when a risk cap is configured.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capped_means: Option<Vec<f64>>,
}

impl GroundTruth {
    pub fn analytic(family: &SyntheticFamily, grid: &HyperGrid, q: f64) -> Result<Self> {
        let f = family.true_functionals(grid, q)?;
        Ok(Self {
            source: "analytic".into(),
            episodes: None,
            means: f.iter().map(|x| x.mean).collect(),
            quantiles: f.iter().map(|x| x.quantile).collect(),
            capped_means: None,
        })
    }

    pub fn held_out(test: &RiskMatrix, q: f64, cap: Option<f64>) -> Result<Self> {
        let mut means = Vec::new();
        let mut quantiles = Vec::new();
        let mut capped = Vec::new();
        for mut col in test.columns() {
            means.push(empirical_mean_risk(&col)?);
            if let Some(c) = cap {
                capped.push(col.iter().map(|v| v.min(c) / c).sum::<f64>() / col.len() as f64);
            }
            col.sort_by(f64::total_cmp);
            quantiles.push(empirical_quantile(&col, q));
        }
        Ok(Self {
            source: "held_out".into(),
            episodes: Some(test.n()),
            means,
            quantiles,
            capped_means: cap.map(|_| capped),
        })
    }

    /// The functional a method controls, in the units of its spec.
    pub fn controlled(&self, setup: &MethodSetup) -> &[f64] {
        match (setup.method, setup.cap, &self.capped_means) {
            (Method::Quantile, _, _) => &self.quantiles,
            (Method::Mean, Some(_), Some(c)) => c,
            (Method::Mean, _, _) => &self.means,
        }
    }
}
