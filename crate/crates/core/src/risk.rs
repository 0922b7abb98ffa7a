//! Per-episode risk and reward evaluations of a hyperparameter grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::HyperGrid;

/// `n` calibration episodes by `|Λ|` grid points: `values[i][j] = R(Z_i, λ_j)`.
///
/// Risks are finite and nonnegative. `bounded_unit` additionally promises that
/// every value lies in `[0, 1]`, which mean-risk control requires.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMatrix", into = "RawMatrix")]
pub struct RiskMatrix {
    values: Vec<Vec<f64>>,
    bounded_unit: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    values: Vec<Vec<f64>>,
    bounded_unit: bool,
}

impl TryFrom<RawMatrix> for RiskMatrix {
    type Error = Error;
    fn try_from(raw: RawMatrix) -> Result<Self> {
        RiskMatrix::new(raw.values, raw.bounded_unit)
    }
}

impl From<RiskMatrix> for RawMatrix {
    fn from(m: RiskMatrix) -> Self {
        RawMatrix {
            values: m.values,
            bounded_unit: m.bounded_unit,
        }
    }
}

impl RiskMatrix {
    pub fn new(values: Vec<Vec<f64>>, bounded_unit: bool) -> Result<Self> {
        let m = Self { values, bounded_unit };
        m.check_values()?;
        Ok(m)
    }

    /// Builds a matrix from per-grid-point columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>], bounded_unit: bool) -> Result<Self> {
        let n = columns.first().map(Vec::len).unwrap_or(0);
        if let Some(c) = columns.iter().find(|c| c.len() != n) {
            return Err(Error::DimensionMismatch {
                what: "column length",
                expected: n,
                found: c.len(),
            });
        }
        let values = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::new(values, bounded_unit)
    }

    fn check_values(&self) -> Result<()> {
        let Some(first) = self.values.first() else {
            return Err(Error::EmptyInput);
        };
        let width = first.len();
        if width == 0 {
            return Err(Error::EmptyInput);
        }
        for (row, r) in self.values.iter().enumerate() {
            if r.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "row length",
                    expected: width,
                    found: r.len(),
                });
            }
            for (column, &value) in r.iter().enumerate() {
                if !value.is_finite() {
                    return Err(Error::NonFiniteValue { row, column, value });
                }
                if value < 0.0 {
                    return Err(Error::NegativeValue { row, column, value });
                }
                if self.bounded_unit && value > 1.0 {
                    return Err(Error::BoundViolation { row, column, value });
                }
            }
        }
        Ok(())
    }

    /// Number of calibration episodes.
    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// Number of grid points covered.
    pub fn width(&self) -> usize {
        self.values.first().map(Vec::len).unwrap_or(0)
    }

    pub fn bounded_unit(&self) -> bool {
        self.bounded_unit
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().map(|r| r[j]).collect()
    }

    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..self.width()).map(|j| self.column(j)).collect()
    }
}

/// Checks that `m` is a well-formed risk matrix for grid `g`.
pub fn validate_risk_matrix(m: &RiskMatrix, g: &HyperGrid) -> Result<()> {
    if m.width() != g.len() {
        return Err(Error::DimensionMismatch {
            what: "risk matrix columns vs grid size",
            expected: g.len(),
            found: m.width(),
        });
    }
    m.check_values()
}

/// Per-episode reward of every grid point, used only to pick one member of the
/// certified set. Larger is better.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct RewardMatrix {
    values: Vec<Vec<f64>>,
}

impl TryFrom<Vec<Vec<f64>>> for RewardMatrix {
    type Error = Error;
    fn try_from(values: Vec<Vec<f64>>) -> Result<Self> {
        RewardMatrix::new(values)
    }
}

impl From<RewardMatrix> for Vec<Vec<f64>> {
    fn from(m: RewardMatrix) -> Self {
        m.values
    }
}

impl RewardMatrix {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self> {
        let width = values.first().map(Vec::len).ok_or(Error::EmptyInput)?;
        for (row, r) in values.iter().enumerate() {
            if r.len() != width {
                return Err(Error::DimensionMismatch {
                    what: "reward row length",
                    expected: width,
                    found: r.len(),
                });
            }
            if let Some((column, &value)) = r.iter().enumerate().find(|(_, v)| !v.is_finite()) {
                return Err(Error::NonFiniteValue { row, column, value });
            }
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn width(&self) -> usize {
        self.values.first().map(Vec::len).unwrap_or(0)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.values
    }

    /// Mean reward of each grid point over the episodes.
    pub fn column_means(&self) -> Vec<f64> {
        let n = self.values.len() as f64;
        let mut sums = vec![0.0; self.width()];
        for r in &self.values {
            for (s, v) in sums.iter_mut().zip(r) {
                *s += v;
            }
        }
        sums.into_iter().map(|s| s / n).collect()
    }
}
