//! Writing a risk matrix to disk, reading it back and calibrating from the file.

use qltt::envs::SyntheticFamily;
use qltt::harness::{load_risk_data, write_risk_matrix};
use qltt::{calibrate, ControlSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("qltt-risk-matrix-io");
    let path = dir.join("risks.csv");

    let family = SyntheticFamily::BernoulliMixture {
        probs: vec![0.02, 0.05, 0.2],
        lo: 0.1,
        hi: 3.0,
    };
    let grid = family.grid()?;
    let risks = family.sample_risk_matrix(&grid, 1500, 5)?;
    write_risk_matrix(&path, &risks, &grid, None, None)?;

    let data = load_risk_data(&path)?;
    assert_eq!(data.matrix, risks);
    println!("{}", std::fs::read_to_string(qltt::harness::io::manifest_path(&path))?);

    let r = calibrate(&data.matrix, &data.grid, &ControlSpec::quantile(1.0, 0.1, 0.1), None)?;
    println!("p-values {:?}", r.p_values);
    println!("certified {:?}", r.certified);
    Ok(())
}
