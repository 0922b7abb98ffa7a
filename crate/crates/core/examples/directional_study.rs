//! Average-risk vs quantile-risk calibration on the toy scheduler.
//!
//! A pilot run fixes alpha (median over the grid of the pilot 0.9-quantile
//! delay) and the FST orderings. Each trial then calibrates both methods on the
//! same 300 episodes and judges the selections on held-out episodes.
//!
//! cargo run --release --example directional_study -- [trials] [pool_size] [out_dir]

use std::path::PathBuf;

use qltt::harness::{cmd_coverage, cmd_report, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let trials: usize = args.first().map_or(Ok(100), |s| s.parse())?;
    let pool: usize = args.get(1).map_or(Ok(1200), |s| s.parse())?;
    let out = args
        .get(2)
        .map_or_else(|| PathBuf::from("out/directional"), PathBuf::from);

    let mut cfg: ExperimentConfig = serde_json::from_str(
        r#"{
            "spec": {"alpha": 0.0, "delta": 0.1, "q": 0.1, "method": "quantile", "fwer": "fst"},
            "env": {"kind": "scheduler", "base": [1, 10, 200, 1], "multipliers": [0.5, 1, 1.5, 2],
                    "pilot": {"episodes": 60, "derive_alpha": true, "derive_ordering": true}},
            "methods": ["quantile", "mean"],
            "risk_cap": 4.0,
            "n_cal": 300, "n_test": 600, "seed": 2024
        }"#,
    )?;
    cfg.trials = Some(trials);
    cfg.output_dir = out.clone();
    let qltt::harness::EnvConfig::Scheduler(env) = &mut cfg.env else {
        unreachable!()
    };
    env.pool_size = Some(pool);

    let (report, path) = cmd_coverage(&cfg)?;
    print!("{}", report.describe());
    for s in &report.summaries {
        if let Some(f) = s.selected_quantile_within_alpha {
            println!(
                "{}: selection's held-out 0.9-quantile <= alpha in {:.1}% of trials",
                s.method,
                100.0 * f
            );
        }
    }
    let mean = |m| {
        let v: Vec<f64> = report.records_for(m).filter_map(|r| r.selected_quantile).collect();
        v.iter().sum::<f64>() / v.len().max(1) as f64
    };
    println!(
        "average held-out 0.9-quantile of the selection: quantile {:.3} ms, mean {:.3} ms",
        mean(qltt::Method::Quantile),
        mean(qltt::Method::Mean)
    );
    println!("wrote {}", path.display());
    let figures = cmd_report(&out)?;
    for w in &figures.written {
        println!("wrote {}", w.display());
    }
    Ok(())
}
