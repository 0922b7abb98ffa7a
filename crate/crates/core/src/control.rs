//! What to control and what came out of a calibration run.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which risk functional is controlled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Average risk, Hoeffding p-values (LTT).
    Mean,
    /// `q`-quantile of the risk, order-statistic p-values (QLTT).
    Quantile,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Mean => "mean",
            Method::Quantile => "quantile",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Method::Mean),
            "quantile" => Ok(Method::Quantile),
            other => Err(Error::InvalidSpec(format!(
                "unknown method {other:?} (expected mean or quantile)"
            ))),
        }
    }
}

/// Family-wise error rate procedure applied to the p-values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FwerProcedure {
    Bonferroni,
    /// Fixed sequence testing along a caller-supplied ordering.
    Fst,
}

/// Target level, outage probability and procedure for one calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSpec {
    /// Risk level to certify, in the units of the risk matrix.
    pub alpha: f64,
    /// Probability that the certified set contains an unreliable point.
    pub delta: f64,
    /// Outage rate of the controlled quantile; required for `Method::Quantile`.
    #[serde(default)]
    pub q: Option<f64>,
    pub method: Method,
    pub fwer: FwerProcedure,
    /// Testing order for FST; grid order when absent.
    #[serde(default)]
    pub ordering: Option<Vec<usize>>,
}

impl ControlSpec {
    pub fn mean(alpha: f64, delta: f64) -> Self {
        Self {
            alpha,
            delta,
            q: None,
            method: Method::Mean,
            fwer: FwerProcedure::Bonferroni,
            ordering: None,
        }
    }

    pub fn quantile(alpha: f64, delta: f64, q: f64) -> Self {
        Self {
            alpha,
            delta,
            q: Some(q),
            method: Method::Quantile,
            fwer: FwerProcedure::Bonferroni,
            ordering: None,
        }
    }

    pub fn with_fst(mut self, ordering: Option<Vec<usize>>) -> Self {
        self.fwer = FwerProcedure::Fst;
        self.ordering = ordering;
        self
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    /// The outage rate, or an error when the spec has none.
    pub fn outage_rate(&self) -> Result<f64> {
        self.q
            .ok_or_else(|| Error::InvalidSpec("quantile control requires q".into()))
    }

    /// Checks the spec against a grid of `grid_len` points.
    pub fn validate(&self, grid_len: usize) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidSpec(format!("delta = {} not in (0, 1)", self.delta)));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(Error::InvalidSpec(format!(
                "alpha = {} must be finite and >= 0",
                self.alpha
            )));
        }
        if let Some(q) = self.q {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::InvalidSpec(format!("q = {q} not in (0, 1)")));
            }
        } else if self.method == Method::Quantile {
            return Err(Error::InvalidSpec("quantile control requires q".into()));
        }
        if self.method == Method::Mean && self.alpha > 1.0 {
            return Err(Error::InvalidSpec(format!(
                "alpha = {} not in [0, 1] for mean control",
                self.alpha
            )));
        }
        if let Some(order) = &self.ordering {
            check_permutation(order, grid_len)?;
        }
        Ok(())
    }

    /// The FST walk order: the supplied ordering or grid order.
    pub fn resolved_ordering(&self, grid_len: usize) -> Vec<usize> {
        self.ordering.clone().unwrap_or_else(|| (0..grid_len).collect())
    }
}

pub(crate) fn check_permutation(order: &[usize], len: usize) -> Result<()> {
    if order.len() != len {
        return Err(Error::BadPermutation(format!(
            "length {} but grid has {len} points",
            order.len()
        )));
    }
    let mut seen = vec![false; len];
    for &id in order {
        match seen.get_mut(id) {
            None => return Err(Error::BadPermutation(format!("id {id} out of range"))),
            Some(true) => return Err(Error::BadPermutation(format!("id {id} repeated"))),
            Some(s) => *s = true,
        }
    }
    Ok(())
}

/// Output of one calibration: per-point p-values, the certified set and the
/// selected point, plus enough provenance to reproduce the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationResult {
    pub p_values: Vec<f64>,
    pub certified: Vec<usize>,
    pub selected: Option<usize>,
    pub spec: ControlSpec,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl CalibrationResult {
    /// Checks the structural invariants that follow from the spec alone.
    pub fn check_invariants(&self) -> Result<()> {
        let len = self.p_values.len();
        if let Some(p) = self.p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidRange(format!("p-value {p} outside [0, 1]")));
        }
        if let Some(id) = self.certified.iter().find(|&&id| id >= len) {
            return Err(Error::InvalidRange(format!("certified id {id} out of range")));
        }
        if let Some(sel) = self.selected {
            if !self.certified.contains(&sel) {
                return Err(Error::InvalidRange(format!("selected id {sel} is not certified")));
            }
        } else if !self.certified.is_empty() {
            return Err(Error::InvalidRange(
                "non-empty certified set without a selection".into(),
            ));
        }
        match self.spec.fwer {
            FwerProcedure::Bonferroni => {
                let threshold = self.spec.delta / len as f64;
                let expected: Vec<usize> = (0..len).filter(|&j| self.p_values[j] < threshold).collect();
                if expected != self.certified {
                    return Err(Error::InvalidRange(
                        "certified set disagrees with the Bonferroni threshold".into(),
                    ));
                }
            }
            FwerProcedure::Fst => {
                let order = self.spec.resolved_ordering(len);
                if order.get(..self.certified.len()) != Some(self.certified.as_slice()) {
                    return Err(Error::InvalidRange(
                        "certified set is not a prefix of the FST ordering".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn min_p_value(&self) -> f64 {
        self.p_values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_p_value(&self) -> f64 {
        self.p_values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
