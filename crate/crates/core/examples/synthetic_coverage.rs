//! Monte Carlo check of both guarantees on a grid with known ground truth.
//!
//! cargo run --release --example synthetic_coverage -- [trials]

use qltt::harness::{run_coverage, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: usize = std::env::args().nth(1).map_or(Ok(200), |s| s.parse())?;
    // Scales 0.40..0.44 have 0.9-quantiles up to 0.4 (safe for alpha = 0.5);
    // scales 0.67..0.71 have 0.9-quantiles of at least 0.6 (unsafe).
    let mut cfg: ExperimentConfig = serde_json::from_str(
        r#"{
            "spec": {"alpha": 0.5, "delta": 0.1, "q": 0.1, "method": "quantile", "fwer": "bonferroni"},
            "env": {"kind": "synthetic", "family": {"kind": "uniform_scale",
                    "scales": [0.40, 0.41, 0.42, 0.43, 0.44, 0.67, 0.68, 0.69, 0.70, 0.71]}},
            "methods": ["quantile", "mean"],
            "n_cal": 2000, "seed": 1
        }"#,
    )?;
    cfg.trials = Some(trials);
    let report = run_coverage(&cfg)?;
    print!("{}", report.describe());
    Ok(())
}
