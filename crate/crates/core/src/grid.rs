//! Finite hyperparameter candidate sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One candidate hyperparameter vector, identified by its position in the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperPoint {
    pub id: usize,
    pub params: Vec<f64>,
}

impl HyperPoint {
    pub fn new(id: usize, params: Vec<f64>) -> Self {
        Self { id, params }
    }

    pub fn dimension(&self) -> usize {
        self.params.len()
    }
}

/// An ordered, non-empty set of candidate hyperparameters.
///
/// Ids are dense: point `j` has id `j`. Every point has the same dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct HyperGrid {
    dimension: usize,
    points: Vec<HyperPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    dimension: usize,
    points: Vec<HyperPoint>,
}

impl TryFrom<RawGrid> for HyperGrid {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        HyperGrid::from_points(raw.dimension, raw.points)
    }
}

impl From<HyperGrid> for RawGrid {
    fn from(g: HyperGrid) -> Self {
        RawGrid {
            dimension: g.dimension,
            points: g.points,
        }
    }
}

impl HyperGrid {
    /// Builds a grid from parameter vectors, assigning ids in order.
    pub fn from_params<I>(params: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let points: Vec<HyperPoint> = params
            .into_iter()
            .enumerate()
            .map(|(id, p)| HyperPoint::new(id, p))
            .collect();
        let dimension = points.first().map(HyperPoint::dimension).unwrap_or(0);
        Self::from_points(dimension, points)
    }

    /// Builds a grid from explicit points, checking the id and dimension invariants.
    pub fn from_points(dimension: usize, points: Vec<HyperPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidGrid("grid must contain at least one point".into()));
        }
        if dimension == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        for (pos, p) in points.iter().enumerate() {
            if p.id != pos {
                return Err(Error::InvalidGrid(format!(
                    "point at position {pos} has id {}; ids must equal grid position",
                    p.id
                )));
            }
            if p.params.len() != dimension {
                return Err(Error::InvalidGrid(format!(
                    "point {pos} has {} params, grid dimension is {dimension}",
                    p.params.len()
                )));
            }
            if let Some(v) = p.params.iter().find(|v| !v.is_finite()) {
                return Err(Error::InvalidGrid(format!("point {pos} has non-finite param {v}")));
            }
        }
        Ok(Self { dimension, points })
    }

    /// A one-dimensional grid whose points are the given scalars.
    pub fn scalar(values: &[f64]) -> Result<Self> {
        Self::from_params(values.iter().map(|&v| vec![v]))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn points(&self) -> &[HyperPoint] {
        &self.points
    }

    pub fn get(&self, id: usize) -> Option<&HyperPoint> {
        self.points.get(id)
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        0..self.points.len()
    }
}
