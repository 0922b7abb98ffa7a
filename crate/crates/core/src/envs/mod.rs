//! Risk-generating environments.

pub mod scheduler;
pub mod synthetic;

pub use scheduler::{
    build_multiplier_grid, episode_risk, evaluate_grid, run_episode, run_round_robin_episode, EpisodeOutcome,
    EpisodeTrace, QosClass, SchedulerConfig,
};
pub use synthetic::{Functionals, SyntheticFamily};
