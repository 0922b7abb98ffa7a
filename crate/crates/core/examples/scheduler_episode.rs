//! One scheduler episode under a few weightings, against plain rotation.

use qltt::envs::{episode_risk, run_episode, run_round_robin_episode, SchedulerConfig};
use qltt::HyperPoint;

fn main() -> qltt::Result<()> {
    let cfg = SchedulerConfig::default();
    let seed = 42;
    let weights = [
        ("channel only", [1.0, 0.0, 0.0, 0.0]),
        ("queue only", [0.0, 1.0, 0.0, 0.0]),
        ("age only", [0.0, 0.0, 1.0, 0.0]),
        ("mixed", [1.0, 10.0, 200.0, 1.0]),
    ];
    for (name, w) in weights {
        let trace = run_episode(&cfg, &HyperPoint::new(0, w.to_vec()), seed)?;
        let worst = trace.class1_delays.iter().copied().fold(0.0, f64::max);
        println!(
            "{name:<13} risk {:.3} ms, worst class-1 delay {worst} ms, reward {}",
            episode_risk(&trace),
            trace.reward
        );
    }
    let rr = run_round_robin_episode(&cfg, seed)?;
    println!(
        "{:<13} risk {:.3} ms, reward {}",
        "round robin",
        episode_risk(&rr),
        rr.reward
    );
    let c = rr.counters;
    println!(
        "packets: {} arrived = {} served + {} dropped + {} still queued",
        c.arrived, c.served, c.dropped, c.residual
    );
    Ok(())
}
