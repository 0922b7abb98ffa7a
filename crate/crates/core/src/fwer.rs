//! Family-wise error rate control over the per-point p-values.

use serde::{Deserialize, Serialize};

use crate::control::{check_permutation, FwerProcedure};
use crate::error::{Error, Result};

/// Certified ids and the threshold they were compared against.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FwerOutcome {
    pub certified: Vec<usize>,
    pub procedure: FwerProcedure,
    /// `δ / |Λ|` for Bonferroni, `δ` for fixed sequence testing.
    pub threshold_used: f64,
}

fn check_inputs(p_values: &[f64], delta: f64) -> Result<()> {
    if p_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidRange(format!("delta = {delta} not in (0, 1)")));
    }
    if let Some(p) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::InvalidRange(format!("p-value {p} outside [0, 1]")));
    }
    Ok(())
}

/// Certifies every id whose p-value is strictly below `δ / |Λ|`, in grid order.
pub fn bonferroni(p_values: &[f64], delta: f64) -> Result<FwerOutcome> {
    check_inputs(p_values, delta)?;
    let threshold = delta / p_values.len() as f64;
    let certified = p_values
        .iter()
        .enumerate()
        .filter(|(_, &p)| p < threshold)
        .map(|(id, _)| id)
        .collect();
    Ok(FwerOutcome {
        certified,
        procedure: FwerProcedure::Bonferroni,
        threshold_used: threshold,
    })
}

/// Walks `ordering` and certifies the longest prefix whose p-values are all `≤ δ`.
pub fn fixed_sequence_test(p_values: &[f64], ordering: &[usize], delta: f64) -> Result<FwerOutcome> {
    check_inputs(p_values, delta)?;
    check_permutation(ordering, p_values.len())?;
    let certified = ordering
        .iter()
        .copied()
        .take_while(|&id| p_values[id] <= delta)
        .collect();
    Ok(FwerOutcome {
        certified,
        procedure: FwerProcedure::Fst,
        threshold_used: delta,
    })
}
