//! A toy downlink scheduler: UEs with QoS classes share resource blocks
//! every TTI, and a weighted score decides who gets served.
//!
//! Everything random about an episode (class assignment, packet arrivals,
//! channel trajectories) is drawn up front from the seed and does not depend on
//! the scheduling weights. Two runs with the same seed but different weights
//! therefore face the same traffic, which is what makes the per-episode risks
//! of different grid points comparable.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{HyperGrid, HyperPoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QosClass {
    /// Probability that a UE of this class receives a packet in a TTI.
    pub arrival_prob: f64,
    /// Delay budget in ms; packets delivered later count as violations.
    pub budget_ms: f64,
}

/// Per-UE channel quality: AR(1) on `[0, 1]` with reflection at the edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChannelConfig {
    pub coefficient: f64,
    pub innovation_std: f64,
    /// Long-run mean of each UE is drawn uniformly from this range at episode start.
    pub mean_range: [f64; 2],
}

impl Default for ChannelConfig {
    fn default() -> Self {
        Self {
            coefficient: 0.9,
            innovation_std: 0.05,
            mean_range: [0.6, 0.9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchedulerConfig {
    pub n_ue: usize,
    /// Resource blocks per TTI.
    pub n_rb: usize,
    /// TTIs per episode, 1 ms each.
    pub n_tti: usize,
    /// QoS classes; the first is the most demanding one and defines the risk.
    pub classes: Vec<QosClass>,
    /// Packets a UE buffer holds; arrivals beyond it are dropped.
    pub buffer_cap: usize,
    pub channel: ChannelConfig,
    /// Packets served per allocated block at unit channel quality.
    pub serve_rate: f64,
}

impl Default for SchedulerConfig {
    fn default() -> Self {
        Self {
            n_ue: 8,
            n_rb: 5,
            n_tti: 2000,
            classes: vec![
                QosClass {
                    arrival_prob: 0.65,
                    budget_ms: 10.0,
                },
                QosClass {
                    arrival_prob: 0.65,
                    budget_ms: 20.0,
                },
                QosClass {
                    arrival_prob: 0.65,
                    budget_ms: 50.0,
                },
                QosClass {
                    arrival_prob: 0.65,
                    budget_ms: 100.0,
                },
            ],
            buffer_cap: 100,
            channel: ChannelConfig::default(),
            serve_rate: 2.0,
        }
    }
}

impl SchedulerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.n_ue == 0 || self.n_rb == 0 || self.n_tti == 0 || self.buffer_cap == 0 {
            return bad("n_ue, n_rb, n_tti and buffer_cap must be at least 1".into());
        }
        if self.n_tti > u32::MAX as usize {
            return bad("n_tti too large".into());
        }
        if self.classes.is_empty() {
            return bad("at least one QoS class is required".into());
        }
        for (k, c) in self.classes.iter().enumerate() {
            if !(0.0..=1.0).contains(&c.arrival_prob) {
                return bad(format!(
                    "class {k} arrival probability {} not in [0, 1]",
                    c.arrival_prob
                ));
            }
            if !(c.budget_ms.is_finite() && c.budget_ms >= 0.0) {
                return bad(format!("class {k} budget {} invalid", c.budget_ms));
            }
        }
        if self.classes.windows(2).any(|w| w[0].budget_ms >= w[1].budget_ms) {
            return bad("delay budgets must be strictly increasing across classes".into());
        }
        let ch = &self.channel;
        if !(0.0..1.0).contains(&ch.coefficient) || !(ch.innovation_std >= 0.0 && ch.innovation_std.is_finite()) {
            return bad("channel coefficient must be in [0, 1) and innovation_std >= 0".into());
        }
        let [lo, hi] = ch.mean_range;
        if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
            return bad(format!(
                "channel mean_range [{lo}, {hi}] must satisfy 0 <= lo <= hi <= 1"
            ));
        }
        if !(self.serve_rate > 0.0 && self.serve_rate.is_finite()) {
            return bad(format!("serve_rate {} must be positive", self.serve_rate));
        }
        Ok(())
    }
}

/// Output of one simulated episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeTrace {
    /// Delays (ms) of every delivered packet of the first QoS class.
    pub class1_delays: Vec<f64>,
    /// Delays (ms) of delivered packets, indexed by class.
    pub class_delays: Vec<Vec<f64>>,
    /// Negative count of packets that missed their budget, were dropped, or
    /// were still queued at the end.
    pub reward: f64,
    /// True when no first-class packet was delivered, so the risk is 0 by convention.
    pub class1_empty: bool,
    pub seed: u64,
    pub counters: EpisodeCounters,
}

/// Packet accounting used to check conservation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpisodeCounters {
    pub arrived: u64,
    pub served: u64,
    pub dropped: u64,
    pub residual: u64,
    pub late: u64,
    /// Largest number of blocks handed out in a single TTI.
    pub max_blocks_per_tti: usize,
    /// Largest queue length observed.
    pub max_queue: usize,
}

/// Exogenous randomness of one episode, independent of the scheduling weights.
#[derive(Debug, Clone)]
pub struct EpisodeDraw {
    seed: u64,
    n_ue: usize,
    classes: Vec<usize>,
    /// `arrivals[t * n_ue + u]`
    arrivals: Vec<bool>,
    cqi: Vec<f64>,
    /// Packets one block can carry for UE `u` in TTI `t`.
    capacity: Vec<u32>,
}

fn reflect_unit(mut x: f64) -> f64 {
    // Fold into [0, 2) then mirror the upper half back into [0, 1].
    x = x.rem_euclid(2.0);
    if x > 1.0 {
        2.0 - x
    } else {
        x
    }
}

impl EpisodeDraw {
    pub fn generate(cfg: &SchedulerConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n_ue = cfg.n_ue;
        let classes: Vec<usize> = (0..n_ue).map(|_| rng.random_range(0..cfg.classes.len())).collect();
        let [lo, hi] = cfg.channel.mean_range;
        let means: Vec<f64> = (0..n_ue).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
        let mut state = means.clone();
        let rho = cfg.channel.coefficient;
        let sigma = cfg.channel.innovation_std;

        let cells = cfg.n_tti * n_ue;
        let mut arrivals = Vec::with_capacity(cells);
        let mut cqi = Vec::with_capacity(cells);
        let mut capacity = Vec::with_capacity(cells);
        for _ in 0..cfg.n_tti {
            for u in 0..n_ue {
                arrivals.push(rng.random::<f64>() < cfg.classes[classes[u]].arrival_prob);
            }
            for u in 0..n_ue {
                let z: f64 = rng.sample(StandardNormal);
                state[u] = reflect_unit(means[u] + rho * (state[u] - means[u]) + sigma * z);
                cqi.push(state[u]);
                capacity.push((cfg.serve_rate * state[u]).round() as u32);
            }
        }
        Ok(Self {
            seed,
            n_ue,
            classes,
            arrivals,
            cqi,
            capacity,
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// QoS class index of every UE.
    pub fn classes(&self) -> &[usize] {
        &self.classes
    }

    pub fn cqi(&self, t: usize, u: usize) -> f64 {
        self.cqi[t * self.n_ue + u]
    }
}

/// How blocks are prioritised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Policy {
    /// Score `w · (cqi, queue/buffer_cap, oldest_age/n_tti, 1 - served_share)`.
    Weighted([f64; 4]),
    /// Equal scores for everyone; ties rotate with the TTI.
    RoundRobin,
}

impl Policy {
    fn from_point(lam: &HyperPoint) -> Result<Self> {
        let w: [f64; 4] = lam.params.as_slice().try_into().map_err(|_| {
            Error::InvalidParameters(format!("scheduler weights need 4 params, got {}", lam.params.len()))
        })?;
        if w.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::InvalidParameters(format!(
                "weights {w:?} must be finite and >= 0"
            )));
        }
        if w.iter().all(|&v| v == 0.0) {
            return Err(Error::InvalidParameters("weights must not all be zero".into()));
        }
        Ok(Policy::Weighted(w))
    }
}

trait Recorder {
    fn delivered(&mut self, class: usize, delay: u32, late: bool);
}

struct TraceRecorder {
    class_delays: Vec<Vec<f64>>,
}

impl Recorder for TraceRecorder {
    fn delivered(&mut self, class: usize, delay: u32, _late: bool) {
        self.class_delays[class].push(delay as f64);
    }
}

#[derive(Default)]
struct SummaryRecorder {
    class1_sum: f64,
    class1_count: u64,
}

impl Recorder for SummaryRecorder {
    fn delivered(&mut self, class: usize, delay: u32, _late: bool) {
        if class == 0 {
            self.class1_sum += delay as f64;
            self.class1_count += 1;
        }
    }
}

/// Fixed-capacity FIFO of packet arrival times.
struct Ue {
    class: usize,
    budget: f64,
    ring: Vec<u32>,
    head: usize,
    len: usize,
    blocks: u64,
}

impl Ue {
    fn push(&mut self, t: u32) {
        let cap = self.ring.len();
        let mut slot = self.head + self.len;
        if slot >= cap {
            slot -= cap;
        }
        self.ring[slot] = t;
        self.len += 1;
    }

    fn pop(&mut self) -> u32 {
        let v = self.ring[self.head];
        self.head += 1;
        if self.head == self.ring.len() {
            self.head = 0;
        }
        self.len -= 1;
        v
    }
}

fn simulate<R: Recorder>(cfg: &SchedulerConfig, draw: &EpisodeDraw, policy: Policy, rec: &mut R) -> EpisodeCounters {
    let n_ue = cfg.n_ue;
    let n_tti = cfg.n_tti;
    let cap = cfg.buffer_cap;
    let inv_cap = 1.0 / cap as f64;
    let inv_tti = 1.0 / n_tti as f64;
    let mut ues: Vec<Ue> = draw
        .classes
        .iter()
        .map(|&class| Ue {
            class,
            budget: cfg.classes[class].budget_ms,
            ring: vec![0; cap],
            head: 0,
            len: 0,
            blocks: 0,
        })
        .collect();
    let mut counters = EpisodeCounters::default();
    let mut total_blocks: u64 = 0;
    // (score, rotation rank, ue), kept sorted by score desc then rank asc.
    let mut order: Vec<(f64, usize, usize)> = Vec::with_capacity(n_ue);

    for t in 0..n_tti {
        let base = t * n_ue;
        let now = t as u32;
        for (u, ue) in ues.iter_mut().enumerate() {
            if draw.arrivals[base + u] {
                counters.arrived += 1;
                if ue.len >= cap {
                    counters.dropped += 1;
                } else {
                    ue.push(now);
                }
            }
            counters.max_queue = counters.max_queue.max(ue.len);
        }

        order.clear();
        let rotation = t % n_ue;
        let inv_total = if total_blocks == 0 {
            0.0
        } else {
            1.0 / total_blocks as f64
        };
        for (u, ue) in ues.iter().enumerate() {
            if ue.len == 0 {
                continue;
            }
            let score = match policy {
                Policy::Weighted(w) => {
                    let oldest = ue.ring[ue.head];
                    let share = ue.blocks as f64 * inv_total;
                    w[0] * draw.cqi[base + u]
                        + w[1] * (ue.len as f64 * inv_cap)
                        + w[2] * ((now - oldest) as f64 * inv_tti)
                        + w[3] * (1.0 - share)
                }
                Policy::RoundRobin => 0.0,
            };
            let rank = (u + n_ue - rotation) % n_ue;
            let entry = (score, rank, u);
            let mut i = order.len();
            order.push(entry);
            while i > 0 && (order[i - 1].0 < score || (order[i - 1].0 == score && order[i - 1].1 > rank)) {
                order[i] = order[i - 1];
                i -= 1;
            }
            order[i] = entry;
        }

        let mut blocks_left = cfg.n_rb;
        'passes: while blocks_left > 0 {
            let mut handed_out = false;
            for &(_, _, u) in &order {
                if blocks_left == 0 {
                    break 'passes;
                }
                let ue = &mut ues[u];
                if ue.len == 0 {
                    continue;
                }
                blocks_left -= 1;
                handed_out = true;
                ue.blocks += 1;
                total_blocks += 1;
                let serve = (draw.capacity[base + u] as usize).min(ue.len);
                for _ in 0..serve {
                    let arrival = ue.pop();
                    // Served at the end of TTI t: a packet arriving in t has delay 1 ms.
                    let delay = now + 1 - arrival;
                    let late = delay as f64 > ue.budget;
                    counters.served += 1;
                    counters.late += u64::from(late);
                    rec.delivered(ue.class, delay, late);
                }
            }
            if !handed_out {
                break;
            }
        }
        counters.max_blocks_per_tti = counters.max_blocks_per_tti.max(cfg.n_rb - blocks_left);
    }
    counters.residual = ues.iter().map(|u| u.len as u64).sum();
    counters
}

fn reward_of(c: &EpisodeCounters) -> f64 {
    0.0 - (c.late + c.dropped + c.residual) as f64
}

/// Runs one episode with a weighted score policy; `lam` must have 4 nonnegative,
/// not-all-zero weights.
pub fn run_episode(cfg: &SchedulerConfig, lam: &HyperPoint, seed: u64) -> Result<EpisodeTrace> {
    let policy = Policy::from_point(lam)?;
    let draw = EpisodeDraw::generate(cfg, seed)?;
    Ok(run_with_policy(cfg, &draw, policy))
}

/// Runs one episode with every UE scored equally (pure rotation).
pub fn run_round_robin_episode(cfg: &SchedulerConfig, seed: u64) -> Result<EpisodeTrace> {
    let draw = EpisodeDraw::generate(cfg, seed)?;
    Ok(run_with_policy(cfg, &draw, Policy::RoundRobin))
}

/// Runs a policy against pre-drawn episode randomness.
pub fn run_with_policy(cfg: &SchedulerConfig, draw: &EpisodeDraw, policy: Policy) -> EpisodeTrace {
    let mut rec = TraceRecorder {
        class_delays: vec![Vec::new(); cfg.classes.len()],
    };
    let counters = simulate(cfg, draw, policy, &mut rec);
    let class1_delays = rec.class_delays[0].clone();
    EpisodeTrace {
        class1_empty: class1_delays.is_empty(),
        class1_delays,
        class_delays: rec.class_delays,
        reward: reward_of(&counters),
        seed: draw.seed,
        counters,
    }
}

/// Mean delay of delivered first-class packets in ms; 0 when there are none.
pub fn episode_risk(trace: &EpisodeTrace) -> f64 {
    mean_or_zero(&trace.class1_delays)
}

fn mean_or_zero(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// Risk (ms) and reward of one grid point on one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    pub risk_ms: f64,
    pub reward: f64,
    pub class1_empty: bool,
}

/// Evaluates every grid point on the same episode draw.
pub fn evaluate_grid(cfg: &SchedulerConfig, grid: &HyperGrid, seed: u64) -> Result<Vec<EpisodeOutcome>> {
    let policies = grid
        .points()
        .iter()
        .map(Policy::from_point)
        .collect::<Result<Vec<_>>>()?;
    let draw = EpisodeDraw::generate(cfg, seed)?;
    Ok(policies.into_iter().map(|p| evaluate_policy(cfg, &draw, p)).collect())
}

pub fn evaluate_policy(cfg: &SchedulerConfig, draw: &EpisodeDraw, policy: Policy) -> EpisodeOutcome {
    let mut rec = SummaryRecorder::default();
    let counters = simulate(cfg, draw, policy, &mut rec);
    let risk_ms = if rec.class1_count == 0 {
        0.0
    } else {
        rec.class1_sum / rec.class1_count as f64
    };
    EpisodeOutcome {
        risk_ms,
        reward: reward_of(&counters),
        class1_empty: rec.class1_count == 0,
    }
}

/// All `|multipliers|^d` rescalings of `base`, in lexicographic order of the
/// multiplier indices (last coordinate varies fastest).
pub fn build_multiplier_grid(base: &HyperPoint, multipliers: &[f64], cap: usize) -> Result<HyperGrid> {
    let d = base.params.len();
    if d == 0 {
        return Err(Error::InvalidGrid("base point needs at least one coordinate".into()));
    }
    if multipliers.is_empty() {
        return Err(Error::InvalidGrid("multipliers must be non-empty".into()));
    }
    let m = multipliers.len();
    let size = (m as u128).checked_pow(d as u32).unwrap_or(u128::MAX);
    if size > cap as u128 {
        return Err(Error::GridTooLarge { size, cap });
    }
    let size = size as usize;
    let points = (0..size).map(|k| {
        let mut rest = k;
        let mut digits = vec![0usize; d];
        for slot in digits.iter_mut().rev() {
            *slot = rest % m;
            rest /= m;
        }
        digits
            .iter()
            .zip(&base.params)
            .map(|(&i, &b)| multipliers[i] * b)
            .collect::<Vec<f64>>()
    });
    HyperGrid::from_params(points)
}

/// Default cap on the number of points of a multiplier grid.
pub const DEFAULT_GRID_CAP: usize = 1_000_000;

#[cfg(test)]
mod tests {
    use super::*;

    fn point(w: [f64; 4]) -> HyperPoint {
        HyperPoint::new(0, w.to_vec())
    }

    #[test]
    fn single_lightly_loaded_ue_is_served_immediately() {
        let cfg = SchedulerConfig {
            n_ue: 1,
            n_rb: 1,
            n_tti: 500,
            classes: vec![QosClass {
                arrival_prob: 0.3,
                budget_ms: 10.0,
            }],
            channel: ChannelConfig {
                coefficient: 0.0,
                innovation_std: 0.0,
                mean_range: [1.0, 1.0],
            },
            ..SchedulerConfig::default()
        };
        let tr = run_episode(&cfg, &point([1.0, 1.0, 1.0, 1.0]), 3).unwrap();
        assert!(!tr.class1_delays.is_empty());
        assert!(tr.class1_delays.iter().all(|&d| d <= 1.0));
        assert_eq!(tr.reward, 0.0);
    }

    #[test]
    fn deterministic_given_seed() {
        let cfg = SchedulerConfig::default();
        let a = run_episode(&cfg, &point([1.0, 2.0, 0.5, 1.0]), 17).unwrap();
        let b = run_episode(&cfg, &point([1.0, 2.0, 0.5, 1.0]), 17).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn conservation_and_bounds() {
        let cfg = SchedulerConfig::default();
        for seed in 0..5 {
            let tr = run_episode(&cfg, &point([0.5, 1.0, 2.0, 0.3]), seed).unwrap();
            let c = tr.counters;
            assert_eq!(c.arrived, c.served + c.dropped + c.residual);
            assert!(c.max_blocks_per_tti <= cfg.n_rb);
            assert!(c.max_queue <= cfg.buffer_cap);
            let delivered: usize = tr.class_delays.iter().map(Vec::len).sum();
            assert_eq!(delivered as u64, c.served);
            for d in tr.class_delays.iter().flatten() {
                assert!(*d >= 0.0 && *d <= cfg.n_tti as f64);
            }
            assert!(tr.reward <= 0.0);
        }
    }

    #[test]
    fn summary_matches_trace() {
        let cfg = SchedulerConfig::default();
        let g = HyperGrid::from_params(vec![vec![1.0, 1.0, 1.0, 1.0], vec![0.0, 0.0, 2.0, 0.0]]).unwrap();
        let outs = evaluate_grid(&cfg, &g, 9).unwrap();
        for (p, o) in g.points().iter().zip(&outs) {
            let tr = run_episode(&cfg, p, 9).unwrap();
            assert!((episode_risk(&tr) - o.risk_ms).abs() < 1e-9);
            assert_eq!(tr.reward, o.reward);
            assert_eq!(tr.class1_empty, o.class1_empty);
        }
    }

    #[test]
    fn age_weighting_beats_rotation_on_worst_delay() {
        // Max first-class delay over seeds 0..20 with the default config.
        const AGE: [f64; 20] = [
            3., 3., 3., 3., 3., 3., 3., 3., 3., 4., 3., 3., 3., 3., 3., 4., 3., 3., 2., 3.,
        ];
        const ROTATION: [f64; 20] = [
            5., 7., 7., 7., 4., 5., 6., 7., 7., 7., 7., 6., 5., 4., 5., 7., 6., 4., 5., 6.,
        ];
        let cfg = SchedulerConfig::default();
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        for seed in 0..20u64 {
            let age = run_episode(&cfg, &point([0.0, 0.0, 1.0, 0.0]), seed).unwrap();
            let rr = run_round_robin_episode(&cfg, seed).unwrap();
            let (a, r) = (max(&age.class1_delays), max(&rr.class1_delays));
            assert_eq!((a, r), (AGE[seed as usize], ROTATION[seed as usize]), "seed {seed}");
            assert!(a <= r);
        }
    }

    #[test]
    fn episode_risk_examples() {
        let mk = |d: Vec<f64>| EpisodeTrace {
            class1_empty: d.is_empty(),
            class_delays: vec![d.clone()],
            class1_delays: d,
            reward: 0.0,
            seed: 0,
            counters: EpisodeCounters::default(),
        };
        assert_eq!(episode_risk(&mk(vec![2.0, 4.0, 6.0])), 4.0);
        assert_eq!(episode_risk(&mk(vec![])), 0.0);
        assert_eq!(episode_risk(&mk(vec![10.0])), 10.0);
    }

    #[test]
    fn invalid_inputs() {
        let cfg = SchedulerConfig::default();
        assert!(run_episode(&cfg, &point([0.0; 4]), 1).is_err());
        assert!(run_episode(&cfg, &HyperPoint::new(0, vec![1.0; 3]), 1).is_err());
        assert!(run_episode(&cfg, &point([-1.0, 1.0, 1.0, 1.0]), 1).is_err());
        let mut bad = SchedulerConfig::default();
        bad.classes[1].budget_ms = 5.0;
        assert!(matches!(
            run_episode(&bad, &point([1.0; 4]), 1),
            Err(Error::InvalidConfig(_))
        ));
        let bad = SchedulerConfig {
            n_rb: 0,
            ..SchedulerConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn multiplier_grid_examples() {
        let base = HyperPoint::new(0, vec![1.0; 4]);
        let g = build_multiplier_grid(&base, &[0.5, 1.0, 1.5, 2.0], DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.get(0).unwrap().params, vec![0.5; 4]);
        assert_eq!(g.get(1).unwrap().params, vec![0.5, 0.5, 0.5, 1.0]);
        assert_eq!(g.get(255).unwrap().params, vec![2.0; 4]);

        let g = build_multiplier_grid(&base, &[1.0], DEFAULT_GRID_CAP).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.get(0).unwrap().params, base.params);

        let g = build_multiplier_grid(&HyperPoint::new(0, vec![2.0]), &[0.5, 1.0], DEFAULT_GRID_CAP).unwrap();
        assert_eq!(
            g.points().iter().map(|p| p.params[0]).collect::<Vec<_>>(),
            vec![1.0, 2.0]
        );

        assert!(matches!(
            build_multiplier_grid(&base, &[1.0; 40], DEFAULT_GRID_CAP),
            Err(Error::GridTooLarge { .. })
        ));
    }

    #[test]
    fn reflection_stays_in_unit_interval() {
        for x in [-2.5, -0.3, 0.0, 0.4, 1.0, 1.3, 2.7, 5.1] {
            let y = reflect_unit(x);
            assert!((0.0..=1.0).contains(&y), "{x} -> {y}");
        }
        assert!((reflect_unit(1.25) - 0.75).abs() < 1e-15);
        assert!((reflect_unit(-0.25) - 0.25).abs() < 1e-15);
    }
}
