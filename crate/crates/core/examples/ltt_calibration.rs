//! Average-risk calibration with Hoeffding p-values and Bonferroni.

use qltt::envs::SyntheticFamily;
use qltt::{ltt_calibrate, ControlSpec};

fn main() -> qltt::Result<()> {
    // Risk of point j is Uniform(0, c_j), so its mean is c_j / 2.
    let family = SyntheticFamily::UniformScale {
        scales: vec![0.2, 0.4, 0.6, 0.8, 1.0],
    };
    let grid = family.grid()?;
    let risks = family.sample_risk_matrix(&grid, 500, 1)?;
    let spec = ControlSpec::mean(0.3, 0.1);
    let result = ltt_calibrate(&risks, &grid, &spec, None)?;

    let truth = family.true_functionals(&grid, 0.1)?;
    for (j, p) in result.p_values.iter().enumerate() {
        println!("id {j}: true mean {:.2}, p-value {p:.3e}", truth[j].mean);
    }
    println!("certified {:?}, selected {:?}", result.certified, result.selected);
    Ok(())
}
