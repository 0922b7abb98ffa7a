//! End-to-end calibration: p-values per grid point, FWER selection of the
//! certified set, then one point picked from it by calibration reward.

use rayon::prelude::*;

use crate::control::{CalibrationResult, ControlSpec, FwerProcedure, Method};
use crate::error::{Error, Result};
use crate::fwer::{bonferroni, fixed_sequence_test};
use crate::grid::HyperGrid;
use crate::pvalue::{empirical_mean_risk, hoeffding_p_value, p_value_from_sorted, DEFAULT_TOL};
use crate::risk::{validate_risk_matrix, RewardMatrix, RiskMatrix};

/// Average-risk control (LTT) with Hoeffding p-values.
///
/// `rewards` ranks the certified points; without it the point with the lowest
/// empirical mean risk is selected.
pub fn ltt_calibrate(
    m: &RiskMatrix,
    g: &HyperGrid,
    spec: &ControlSpec,
    rewards: Option<&RewardMatrix>,
) -> Result<CalibrationResult> {
    if spec.method != Method::Mean {
        return Err(Error::InvalidSpec("ltt_calibrate needs method = mean".into()));
    }
    check_inputs(m, g, spec, rewards)?;
    if !m.bounded_unit() {
        return Err(Error::UnboundedRisk);
    }
    let n = m.n();
    let columns = m.columns();
    let p_values = columns
        .par_iter()
        .map(|c| hoeffding_p_value(empirical_mean_risk(c)?, n, spec.alpha))
        .collect::<Result<Vec<_>>>()?;
    finish(p_values, &columns, g, spec, rewards, n)
}

/// Quantile-risk control (QLTT) with order-statistic p-values.
pub fn qltt_calibrate(
    m: &RiskMatrix,
    g: &HyperGrid,
    spec: &ControlSpec,
    rewards: Option<&RewardMatrix>,
) -> Result<CalibrationResult> {
    if spec.method != Method::Quantile {
        return Err(Error::InvalidSpec("qltt_calibrate needs method = quantile".into()));
    }
    check_inputs(m, g, spec, rewards)?;
    let q = spec.outage_rate()?;
    let columns = m.columns();
    let p_values = columns
        .par_iter()
        .map(|c| {
            let mut sorted = c.clone();
            sorted.sort_by(f64::total_cmp);
            p_value_from_sorted(&sorted, q, spec.alpha, DEFAULT_TOL)
        })
        .collect();
    finish(p_values, &columns, g, spec, rewards, m.n())
}

/// Dispatches on `spec.method`.
pub fn calibrate(
    m: &RiskMatrix,
    g: &HyperGrid,
    spec: &ControlSpec,
    rewards: Option<&RewardMatrix>,
) -> Result<CalibrationResult> {
    match spec.method {
        Method::Mean => ltt_calibrate(m, g, spec, rewards),
        Method::Quantile => qltt_calibrate(m, g, spec, rewards),
    }
}

fn check_inputs(m: &RiskMatrix, g: &HyperGrid, spec: &ControlSpec, rewards: Option<&RewardMatrix>) -> Result<()> {
    spec.validate(g.len())?;
    validate_risk_matrix(m, g)?;
    if let Some(r) = rewards {
        if r.width() != g.len() {
            return Err(Error::DimensionMismatch {
                what: "reward matrix columns vs grid size",
                expected: g.len(),
                found: r.width(),
            });
        }
        if r.n() != m.n() {
            return Err(Error::DimensionMismatch {
                what: "reward matrix rows vs calibration episodes",
                expected: m.n(),
                found: r.n(),
            });
        }
    }
    Ok(())
}

fn finish(
    p_values: Vec<f64>,
    columns: &[Vec<f64>],
    g: &HyperGrid,
    spec: &ControlSpec,
    rewards: Option<&RewardMatrix>,
    n: usize,
) -> Result<CalibrationResult> {
    let outcome = match spec.fwer {
        FwerProcedure::Bonferroni => bonferroni(&p_values, spec.delta)?,
        FwerProcedure::Fst => fixed_sequence_test(&p_values, &spec.resolved_ordering(g.len()), spec.delta)?,
    };
    let mean_rewards = match rewards {
        Some(r) => r.column_means(),
        None => columns
            .iter()
            .map(|c| empirical_mean_risk(c).map(|r| -r))
            .collect::<Result<_>>()?,
    };
    let selected = select_best(&outcome.certified, &mean_rewards)?;
    Ok(CalibrationResult {
        p_values,
        certified: outcome.certified,
        selected,
        spec: spec.clone(),
        n,
        seed: None,
    })
}

/// Picks the certified id with the largest mean reward; ties go to the smallest id.
///
/// `rewards[id]` is the mean calibration reward of grid point `id`.
pub fn select_best(certified: &[usize], rewards: &[f64]) -> Result<Option<usize>> {
    let mut best: Option<(usize, f64)> = None;
    for &id in certified {
        let r = *rewards
            .get(id)
            .filter(|r| !r.is_nan())
            .ok_or(Error::MissingReward(id))?;
        best = match best {
            Some((b, br)) if br > r || (br == r && b < id) => Some((b, br)),
            _ => Some((id, r)),
        };
    }
    Ok(best.map(|(id, _)| id))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(k: usize) -> HyperGrid {
        HyperGrid::from_params((0..k).map(|i| vec![i as f64])).unwrap()
    }

    #[test]
    fn select_best_examples() {
        let rewards = [0.0, -5.0, 0.0, -2.0];
        assert_eq!(select_best(&[1, 3], &rewards).unwrap(), Some(3));
        assert_eq!(select_best(&[], &rewards).unwrap(), None);
        let tied = [0.0, -2.0, 0.0, -2.0];
        assert_eq!(select_best(&[3, 1], &tied).unwrap(), Some(1));
        assert!(matches!(select_best(&[7], &rewards), Err(Error::MissingReward(7))));
    }

    #[test]
    fn ltt_single_zero_column() {
        let m = RiskMatrix::new(vec![vec![0.0]; 100], true).unwrap();
        let r = ltt_calibrate(&m, &grid(1), &ControlSpec::mean(0.5, 0.1), None).unwrap();
        assert!((r.p_values[0] - (-50f64).exp()).abs() < 1e-30);
        assert_eq!(r.certified, vec![0]);
        assert_eq!(r.selected, Some(0));
        r.check_invariants().unwrap();
    }

    #[test]
    fn ltt_nothing_certified_when_means_exceed_alpha() {
        let m = RiskMatrix::new(vec![vec![0.6, 0.5, 0.9]; 50], true).unwrap();
        let r = ltt_calibrate(&m, &grid(3), &ControlSpec::mean(0.5, 0.1), None).unwrap();
        assert_eq!(r.p_values, vec![1.0; 3]);
        assert!(r.certified.is_empty());
        assert_eq!(r.selected, None);
    }

    #[test]
    fn ltt_rejects_unbounded() {
        let m = RiskMatrix::new(vec![vec![0.2]; 10], false).unwrap();
        assert!(matches!(
            ltt_calibrate(&m, &grid(1), &ControlSpec::mean(0.5, 0.1), None),
            Err(Error::UnboundedRisk)
        ));
    }

    #[test]
    fn qltt_examples() {
        let col: Vec<f64> = (1..=1000).map(|i| i as f64 / 1000.0).collect();
        let m = RiskMatrix::from_columns(&[col.clone()], true).unwrap();
        let r = qltt_calibrate(&m, &grid(1), &ControlSpec::quantile(0.96, 0.1, 0.1), None).unwrap();
        assert!((r.p_values[0] - 7.2e-4).abs() < 2e-5);
        assert_eq!(r.certified, vec![0]);

        let small = RiskMatrix::new(vec![vec![0.0, 0.01]; 100], true).unwrap();
        let r = qltt_calibrate(&small, &grid(2), &ControlSpec::quantile(0.5, 0.1, 0.1), None).unwrap();
        assert_eq!(r.p_values, vec![1.0, 1.0]);
        assert!(r.certified.is_empty());

        let twin = RiskMatrix::from_columns(&[col.clone(), col], true).unwrap();
        let r = qltt_calibrate(&twin, &grid(2), &ControlSpec::quantile(0.9, 0.1, 0.2), None).unwrap();
        assert_eq!(r.p_values[0], r.p_values[1]);
    }

    #[test]
    fn rewards_drive_selection() {
        let m = RiskMatrix::new(vec![vec![0.0, 0.1, 0.0]; 200], true).unwrap();
        let rewards = RewardMatrix::new(vec![vec![-3.0, -1.0, -2.0]; 200]).unwrap();
        let r = ltt_calibrate(&m, &grid(3), &ControlSpec::mean(0.5, 0.1), Some(&rewards)).unwrap();
        assert_eq!(r.certified, vec![0, 1, 2]);
        assert_eq!(r.selected, Some(1));
        // Without rewards the lowest empirical risk wins, ties to the smallest id.
        let r = ltt_calibrate(&m, &grid(3), &ControlSpec::mean(0.5, 0.1), None).unwrap();
        assert_eq!(r.selected, Some(0));
    }

    #[test]
    fn fst_uses_ordering() {
        let m = RiskMatrix::new(vec![vec![0.0, 0.9, 0.0]; 200], true).unwrap();
        let spec = ControlSpec::mean(0.5, 0.1).with_fst(Some(vec![2, 1, 0]));
        let r = ltt_calibrate(&m, &grid(3), &spec, None).unwrap();
        assert_eq!(r.certified, vec![2]);
        r.check_invariants().unwrap();
    }

    #[test]
    fn method_mismatch_and_shape_errors() {
        let m = RiskMatrix::new(vec![vec![0.1, 0.2]; 10], true).unwrap();
        assert!(ltt_calibrate(&m, &grid(2), &ControlSpec::quantile(0.5, 0.1, 0.1), None).is_err());
        assert!(matches!(
            qltt_calibrate(&m, &grid(3), &ControlSpec::quantile(0.5, 0.1, 0.1), None),
            Err(Error::DimensionMismatch { .. })
        ));
        let short = RewardMatrix::new(vec![vec![0.0, 0.0]; 9]).unwrap();
        assert!(calibrate(&m, &grid(2), &ControlSpec::mean(0.5, 0.1), Some(&short)).is_err());
    }
}
