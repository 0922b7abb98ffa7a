//! Quantile-risk calibration on heavy-ish tailed risks.
//!
//! Two points share the same mean risk but differ in their upper tail; only
//! quantile control tells them apart.

use qltt::envs::SyntheticFamily;
use qltt::{calibrate, ControlSpec, Method};

fn main() -> qltt::Result<()> {
    // Beta(2, 6) and Beta(0.5, 1.5) both have mean 0.25.
    let family = SyntheticFamily::Beta {
        shapes: vec![[2.0, 6.0], [0.5, 1.5], [4.0, 4.0]],
    };
    let grid = family.grid()?;
    let risks = family.sample_risk_matrix(&grid, 2000, 7)?;
    let truth = family.true_functionals(&grid, 0.1)?;

    let quantile = ControlSpec::quantile(0.5, 0.1, 0.1);
    let mean = quantile.clone().with_method(Method::Mean);
    let rq = calibrate(&risks, &grid, &quantile, None)?;
    let rm = calibrate(&risks, &grid, &mean, None)?;

    for j in 0..grid.len() {
        println!(
            "id {j}: mean {:.3}, 0.9-quantile {:.3} | p quantile {:.2e}, p mean {:.2e}",
            truth[j].mean, truth[j].quantile, rq.p_values[j], rm.p_values[j]
        );
    }
    println!("quantile control certifies {:?}", rq.certified);
    println!("mean control certifies {:?}", rm.certified);
    Ok(())
}
