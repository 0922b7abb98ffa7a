//! Building a multiplier grid around a base weighting and scoring it on one episode.

use qltt::envs::scheduler::{build_multiplier_grid, evaluate_grid, DEFAULT_GRID_CAP};
use qltt::envs::SchedulerConfig;
use qltt::HyperPoint;

fn main() -> qltt::Result<()> {
    let base = HyperPoint::new(0, vec![1.0, 10.0, 200.0, 1.0]);
    let grid = build_multiplier_grid(&base, &[0.5, 1.0, 1.5, 2.0], DEFAULT_GRID_CAP)?;
    println!(
        "{} points; first {:?}, last {:?}",
        grid.len(),
        grid.points()[0].params,
        grid.points()[255].params
    );

    let outcomes = evaluate_grid(&SchedulerConfig::default(), &grid, 3)?;
    let mut ids: Vec<usize> = (0..grid.len()).collect();
    ids.sort_by(|&a, &b| outcomes[a].risk_ms.total_cmp(&outcomes[b].risk_ms));
    for &id in ids.iter().take(5) {
        println!(
            "id {id:>3} {:?}: risk {:.3} ms, reward {}",
            grid.points()[id].params,
            outcomes[id].risk_ms,
            outcomes[id].reward
        );
    }
    Ok(())
}
