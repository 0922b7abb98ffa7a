//! Repeated calibration against known (or held-out) ground truth.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calibrate::calibrate;
use crate::control::Method;
use crate::error::{Error, Result};
use crate::grid::HyperGrid;
use crate::harness::config::{EnvConfig, ExperimentConfig};
use crate::harness::experiment::{
    native_alpha, run_pilot, sample_batch, scheduler_grid, simulate_batch, with_workers, Batch, GroundTruth,
    MethodSetup, PilotSummary,
};
use crate::harness::stats::{clopper_pearson, lower_median};
use crate::risk::{RewardMatrix, RiskMatrix};
use crate::seed::{derive_seed, stream};

/// Outcome of one method in one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialRecord {
    pub trial: usize,
    pub method: Method,
    /// Seed of this trial's calibration data.
    pub seed: u64,
    pub certified_size: usize,
    pub selected: Option<usize>,
    /// Controlled functional of every certified id, in certified order.
    pub certified_truth: Vec<f64>,
    /// Some certified id has its controlled functional above the target.
    pub violation: bool,
    /// True (or held-out) mean risk of the selection, in native units.
    pub selected_mean: Option<f64>,
    /// True (or held-out) `q`-quantile risk of the selection, in native units.
    pub selected_quantile: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSummary {
    pub method: Method,
    /// Target the controlled functional is compared with, in the method's units.
    pub alpha: f64,
    pub trials: usize,
    pub violations: usize,
    pub violation_rate: f64,
    /// Clopper–Pearson 95% interval of the violation rate.
    pub violation_ci95: [f64; 2],
    pub median_certified: usize,
    pub nonempty_trials: usize,
    /// Among trials with a selection, the fraction whose selection has
    /// `q`-quantile risk at most the native alpha.
    pub selected_quantile_within_alpha: Option<f64>,
}

/// Paired view of the quantile and mean selections of the same trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairedComparison {
    /// Trials in which both methods selected a point.
    pub both_selected: usize,
    /// Of those, trials where the quantile selection's `q`-quantile risk is at
    /// most the mean selection's.
    pub quantile_not_worse: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WallClock {
    pub setup_secs: f64,
    pub trials_secs: f64,
    pub mean_trial_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageReport {
    pub env: String,
    pub methods: Vec<Method>,
    /// Target in native risk units.
    pub alpha: f64,
    pub delta: f64,
    pub q: Option<f64>,
    pub n_cal: usize,
    pub trials: usize,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot: Option<PilotSummary>,
    pub truth: GroundTruth,
    pub summaries: Vec<MethodSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paired: Option<PairedComparison>,
    /// Ordered by trial, then by position in `methods`.
    pub records: Vec<TrialRecord>,
    pub wall_clock: WallClock,
}

impl CoverageReport {
    pub fn summary(&self, method: Method) -> Option<&MethodSummary> {
        self.summaries.iter().find(|s| s.method == method)
    }

    pub fn records_for(&self, method: Method) -> impl Iterator<Item = &TrialRecord> {
        self.records.iter().filter(move |r| r.method == method)
    }

    /// A few human-readable lines.
    pub fn describe(&self) -> String {
        let mut out = format!(
            "{} trials on a {} env, n_cal = {}, alpha = {}\n",
            self.trials, self.env, self.n_cal, self.alpha
        );
        for s in &self.summaries {
            out.push_str(&format!(
                "{}: violation rate {:.4} (95% CI [{:.4}, {:.4}]), median |certified| {}, non-empty in {} trials\n",
                s.method,
                s.violation_rate,
                s.violation_ci95[0],
                s.violation_ci95[1],
                s.median_certified,
                s.nonempty_trials
            ));
        }
        if let Some(p) = &self.paired {
            out.push_str(&format!(
                "quantile selection's quantile risk <= mean selection's in {} of {} paired trials\n",
                p.quantile_not_worse, p.both_selected
            ));
        }
        out
    }
}

/// Source of each trial's calibration data.
enum Draws<'a> {
    Synthetic(&'a crate::envs::SyntheticFamily),
    Fresh(&'a crate::harness::config::SchedulerEnv),
    Pool(Batch),
}

impl Draws<'_> {
    fn draw(&self, grid: &HyperGrid, n: usize, seed: u64) -> Result<Batch> {
        match self {
            Draws::Synthetic(f) => sample_batch(f, grid, n, seed),
            Draws::Fresh(env) => simulate_batch(env, grid, seed, stream::CALIBRATION, 0, n),
            Draws::Pool(pool) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..pool.risks.n())).collect();
                let risks = idx.iter().map(|&i| pool.risks.rows()[i].clone()).collect();
                let rewards = match &pool.rewards {
                    Some(r) => Some(RewardMatrix::new(idx.iter().map(|&i| r.rows()[i].clone()).collect())?),
                    None => None,
                };
                Ok(Batch {
                    risks: RiskMatrix::new(risks, pool.risks.bounded_unit())?,
                    rewards,
                })
            }
        }
    }
}

/// Runs `trials` independent calibrations for every configured method.
pub fn run_coverage(cfg: &ExperimentConfig) -> Result<CoverageReport> {
    cfg.validate()?;
    with_workers(cfg.workers, || run_inner(cfg))
}

fn run_inner(cfg: &ExperimentConfig) -> Result<CoverageReport> {
    let start = Instant::now();
    let q = cfg.spec.q;
    let n_cal = cfg.n_cal();
    let trials = cfg.trials();
    let methods = cfg.methods();

    let (grid, draws, truth, pilot, pool_size, bounded) = match &cfg.env {
        EnvConfig::Synthetic { family } => {
            let grid = family.grid()?;
            let truth = GroundTruth::analytic(family, &grid, q.unwrap_or(0.5))?;
            (grid, Draws::Synthetic(family), truth, None, None, family.bounded_unit())
        }
        EnvConfig::Scheduler(env) => {
            let grid = scheduler_grid(env)?;
            let n_test = cfg.n_test();
            if n_test == 0 {
                return Err(Error::InvalidConfig(
                    "scheduler coverage needs n_test >= 1 held-out episodes as ground truth".into(),
                ));
            }
            let pilot = run_pilot(cfg, &grid)?;
            let test = simulate_batch(env, &grid, cfg.seed, stream::TEST, 0, n_test)?;
            let truth = GroundTruth::held_out(&test.risks, q.unwrap_or(0.5), cfg.risk_cap)?;
            let draws = match env.pool_size {
                Some(size) => Draws::Pool(simulate_batch(env, &grid, cfg.seed, stream::CALIBRATION, 0, size)?),
                None => Draws::Fresh(env),
            };
            (grid, draws, truth, pilot, env.pool_size, false)
        }
        EnvConfig::File { .. } => {
            return Err(Error::InvalidConfig(
                "coverage needs ground truth: use a synthetic or scheduler env".into(),
            ))
        }
    };
    let alpha = native_alpha(cfg, pilot.as_ref());
    let setups = methods
        .iter()
        .map(|&m| MethodSetup::new(cfg, m, grid.len(), bounded, pilot.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let setup_secs = start.elapsed().as_secs_f64();

    let trial_start = Instant::now();
    let per_trial = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(cfg.seed, stream::TRIAL, t as u64);
            let batch = draws.draw(&grid, n_cal, seed)?;
            setups
                .iter()
                .map(|s| trial_record(t, seed, s, &batch, &grid, &truth))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let trials_secs = trial_start.elapsed().as_secs_f64();
    let records: Vec<TrialRecord> = per_trial.into_iter().flatten().collect();

    let summaries = setups.iter().map(|s| summarize(s, &records, alpha, trials)).collect();
    let paired = (methods.contains(&Method::Mean) && methods.contains(&Method::Quantile)).then(|| paired(&records));

    Ok(CoverageReport {
        env: cfg.env.kind().into(),
        methods,
        alpha,
        delta: cfg.spec.delta,
        q,
        n_cal,
        trials,
        seed: cfg.seed,
        pool_size,
        pilot,
        truth,
        summaries,
        paired,
        records,
        wall_clock: WallClock {
            setup_secs,
            trials_secs,
            mean_trial_secs: trials_secs / trials as f64,
        },
    })
}

fn trial_record(
    trial: usize,
    seed: u64,
    setup: &MethodSetup,
    batch: &Batch,
    grid: &HyperGrid,
    truth: &GroundTruth,
) -> Result<TrialRecord> {
    let view = setup.view(&batch.risks)?;
    let mut result = calibrate(&view, grid, &setup.spec, batch.rewards.as_ref())?;
    result.seed = Some(seed);
    let controlled = truth.controlled(setup);
    let certified_truth: Vec<f64> = result.certified.iter().map(|&id| controlled[id]).collect();
    let violation = certified_truth.iter().any(|&v| v > setup.spec.alpha);
    Ok(TrialRecord {
        trial,
        method: setup.method,
        seed,
        certified_size: result.certified.len(),
        selected: result.selected,
        certified_truth,
        violation,
        selected_mean: result.selected.map(|id| truth.means[id]),
        selected_quantile: result.selected.map(|id| truth.quantiles[id]),
    })
}

fn summarize(setup: &MethodSetup, records: &[TrialRecord], alpha: f64, trials: usize) -> MethodSummary {
    let mine: Vec<&TrialRecord> = records.iter().filter(|r| r.method == setup.method).collect();
    let violations = mine.iter().filter(|r| r.violation).count();
    let (lo, hi) = clopper_pearson(violations, trials, 0.95);
    let sizes: Vec<f64> = mine.iter().map(|r| r.certified_size as f64).collect();
    let selected: Vec<f64> = mine.iter().filter_map(|r| r.selected_quantile).collect();
    MethodSummary {
        method: setup.method,
        alpha: setup.spec.alpha,
        trials,
        violations,
        violation_rate: violations as f64 / trials as f64,
        violation_ci95: [lo, hi],
        median_certified: lower_median(&sizes) as usize,
        nonempty_trials: mine.iter().filter(|r| r.certified_size > 0).count(),
        selected_quantile_within_alpha: (!selected.is_empty())
            .then(|| selected.iter().filter(|&&v| v <= alpha).count() as f64 / selected.len() as f64),
    }
}

fn paired(records: &[TrialRecord]) -> PairedComparison {
    let mut out = PairedComparison {
        both_selected: 0,
        quantile_not_worse: 0,
    };
    for chunk in records.chunk_by(|a, b| a.trial == b.trial) {
        let get = |m: Method| chunk.iter().find(|r| r.method == m).and_then(|r| r.selected_quantile);
        if let (Some(qs), Some(ms)) = (get(Method::Quantile), get(Method::Mean)) {
            out.both_selected += 1;
            out.quantile_not_worse += usize::from(qs <= ms);
        }
    }
    out
}
