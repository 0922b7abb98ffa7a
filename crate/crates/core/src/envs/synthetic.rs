//! Risk families whose mean and quantiles are known in closed form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta as BetaDist, Distribution};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};
use crate::grid::HyperGrid;
use crate::risk::RiskMatrix;

/// One distribution per grid point, all from the same parametric family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SyntheticFamily {
    /// Risk ~ Uniform(0, c) with one scale `c > 0` per grid point.
    UniformScale { scales: Vec<f64> },
    /// Risk ~ Beta(a, b) with one shape pair per grid point.
    Beta { shapes: Vec<[f64; 2]> },
    /// Risk is `hi` with probability `p`, else `lo`; one `p` per grid point.
    BernoulliMixture { probs: Vec<f64>, lo: f64, hi: f64 },
}

/// Ground-truth functionals of one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub mean: f64,
    pub quantile: f64,
}

impl SyntheticFamily {
    pub fn len(&self) -> usize {
        match self {
            SyntheticFamily::UniformScale { scales } => scales.len(),
            SyntheticFamily::Beta { shapes } => shapes.len(),
            SyntheticFamily::BernoulliMixture { probs, .. } => probs.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidParameters("family has no grid points".into()));
        }
        let bad = |msg: String| Err(Error::InvalidParameters(msg));
        match self {
            SyntheticFamily::UniformScale { scales } => {
                if let Some(c) = scales.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                    return bad(format!("uniform scale {c} must be finite and > 0"));
                }
            }
            SyntheticFamily::Beta { shapes } => {
                if let Some(s) = shapes
                    .iter()
                    .find(|[a, b]| !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0))
                {
                    return bad(format!("beta shapes {s:?} must be finite and > 0"));
                }
            }
            SyntheticFamily::BernoulliMixture { probs, lo, hi } => {
                if !(lo.is_finite() && hi.is_finite() && 0.0 <= *lo && lo <= hi) {
                    return bad(format!("need 0 <= lo <= hi, got lo={lo}, hi={hi}"));
                }
                if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return bad(format!("mixture probability {p} not in [0, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Whether every draw is guaranteed to lie in `[0, 1]`.
    pub fn bounded_unit(&self) -> bool {
        match self {
            SyntheticFamily::UniformScale { scales } => scales.iter().all(|&c| c <= 1.0),
            SyntheticFamily::Beta { .. } => true,
            SyntheticFamily::BernoulliMixture { hi, .. } => *hi <= 1.0,
        }
    }

    /// A grid whose point `j` carries the family parameters of point `j`.
    pub fn grid(&self) -> Result<HyperGrid> {
        self.validate()?;
        match self {
            SyntheticFamily::UniformScale { scales } => HyperGrid::scalar(scales),
            SyntheticFamily::Beta { shapes } => HyperGrid::from_params(shapes.iter().map(|s| s.to_vec())),
            SyntheticFamily::BernoulliMixture { probs, .. } => HyperGrid::scalar(probs),
        }
    }

    fn check_grid(&self, g: &HyperGrid) -> Result<()> {
        self.validate()?;
        if g.len() != self.len() {
            return Err(Error::DimensionMismatch {
                what: "grid size vs family size",
                expected: self.len(),
                found: g.len(),
            });
        }
        Ok(())
    }

    /// Draws `n` i.i.d. risks for every grid point, deterministically in `seed`.
    pub fn sample_risk_matrix(&self, g: &HyperGrid, n: usize, seed: u64) -> Result<RiskMatrix> {
        self.check_grid(g)?;
        if n == 0 {
            return Err(Error::InvalidParameters("n must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows: Vec<Vec<f64>> = match self {
            SyntheticFamily::UniformScale { scales } => (0..n)
                .map(|_| scales.iter().map(|&c| rng.random::<f64>() * c).collect())
                .collect(),
            SyntheticFamily::Beta { shapes } => {
                let dists = shapes
                    .iter()
                    .map(|&[a, b]| BetaDist::new(a, b).map_err(|e| Error::InvalidParameters(e.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                (0..n)
                    .map(|_| dists.iter().map(|d| d.sample(&mut rng)).collect())
                    .collect()
            }
            SyntheticFamily::BernoulliMixture { probs, lo, hi } => (0..n)
                .map(|_| {
                    probs
                        .iter()
                        .map(|&p| if rng.random::<f64>() < p { *hi } else { *lo })
                        .collect()
                })
                .collect(),
        };
        RiskMatrix::new(rows, self.bounded_unit())
    }

    /// Closed-form mean and `q`-quantile risk of every grid point.
    pub fn true_functionals(&self, g: &HyperGrid, q: f64) -> Result<Vec<Functionals>> {
        self.check_grid(g)?;
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidRange(format!("q = {q} not in (0, 1)")));
        }
        let out = match self {
            SyntheticFamily::UniformScale { scales } => scales
                .iter()
                .map(|&c| Functionals {
                    mean: c / 2.0,
                    quantile: (1.0 - q) * c,
                })
                .collect(),
            SyntheticFamily::Beta { shapes } => shapes
                .iter()
                .map(|&[a, b]| {
                    let d = Beta::new(a, b).map_err(|e| Error::InvalidParameters(e.to_string()))?;
                    Ok(Functionals {
                        mean: a / (a + b),
                        quantile: d.inverse_cdf(1.0 - q),
                    })
                })
                .collect::<Result<_>>()?,
            // Pr[R <= lo] = 1 - p, which reaches 1 - q exactly when p <= q.
            SyntheticFamily::BernoulliMixture { probs, lo, hi } => probs
                .iter()
                .map(|&p| Functionals {
                    mean: p * hi + (1.0 - p) * lo,
                    quantile: if p > q { *hi } else { *lo },
                })
                .collect(),
        };
        Ok(out)
    }
}
