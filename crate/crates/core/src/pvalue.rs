//! Per-hyperparameter p-values.
//!
//! Two constructions are provided:
//!
//! * Mean risk: the Hoeffding p-value `exp(-2n (α - R̂)₊²)` for unit-bounded risks.
//! * Quantile risk: invert a distribution-free upper confidence bound on the
//!   `q`-quantile. For failure probability `ε` the bound is the
//!   `⌊n(1 - q*)⌋`-th smallest risk (1-based), where
//!
//!   ```text
//!   r_n = (1.4 ln ln(2.1 n) + ln(10 / ε)) / n
//!   q*  = q - 1.5 sqrt(q (1 - q) r_n) - 0.8 r_n
//!   ```
//!
//!   The p-value is the smallest `ε` at which the bound drops strictly below `α`.
//!   The bound is non-increasing in `ε`, so that infimum is found by bisection.
//!
//! Strict `<` is used inside the infimum. It is the event whose probability is
//! bounded when proving super-uniformity; the alternative reading
//! `inf { ε : bound(ε) ≥ α }` is degenerate (it is `0` whenever the bound at
//! small `ε` already exceeds `α`) and is not offered.

use crate::error::{Error, Result};

/// Default absolute tolerance of the bisection on `ε`.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Smallest `ε` the bisection considers.
pub const EPSILON_FLOOR: f64 = 1e-12;

/// Arithmetic mean of a column of risks, summed in ascending order so the
/// result does not depend on the order of the episodes.
pub fn empirical_mean_risk(risks: &[f64]) -> Result<f64> {
    if risks.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(v) = risks.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidRange(format!("non-finite risk {v}")));
    }
    let mut sorted = risks.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted.iter().sum::<f64>() / risks.len() as f64)
}

/// Hoeffding p-value for `H: R(λ) > α` from the empirical mean of `n` unit-bounded risks.
pub fn hoeffding_p_value(mean_risk: f64, n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidRange("n must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidRange(format!("alpha = {alpha} not in [0, 1]")));
    }
    if !(0.0..=1.0).contains(&mean_risk) {
        return Err(Error::UnboundedRisk);
    }
    let gap = (alpha - mean_risk).max(0.0);
    Ok((-2.0 * n as f64 * gap * gap).exp())
}

/// Derived quantities of the order-statistic confidence bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileBoundParams {
    pub n: usize,
    pub q: f64,
    pub epsilon: f64,
    pub r_n: f64,
    /// Adjusted outage rate; may be `≤ 0`, in which case the bound is vacuous.
    pub q_star: f64,
    /// 1-based order statistic `⌊n (1 - q*)⌋`; may exceed `n`.
    pub index: u64,
}

impl QuantileBoundParams {
    /// True when no finite order statistic certifies the quantile.
    pub fn is_vacuous(&self) -> bool {
        self.q_star <= 0.0 || self.index > self.n as u64
    }
}

fn check_q_eps(q: f64, epsilon: f64) -> Result<()> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidRange(format!("q = {q} not in (0, 1)")));
    }
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidRange(format!("epsilon = {epsilon} not in (0, 1]")));
    }
    Ok(())
}

pub fn bound_params(n: usize, q: f64, epsilon: f64) -> Result<QuantileBoundParams> {
    if n == 0 {
        return Err(Error::InvalidRange("n must be at least 1".into()));
    }
    check_q_eps(q, epsilon)?;
    Ok(bound_params_unchecked(n, q, epsilon))
}

fn bound_params_unchecked(n: usize, q: f64, epsilon: f64) -> QuantileBoundParams {
    let nf = n as f64;
    let r_n = (1.4 * (2.1 * nf).ln().ln() + (10.0 / epsilon).ln()) / nf;
    let q_star = q - 1.5 * (q * (1.0 - q) * r_n).sqrt() - 0.8 * r_n;
    let position = (nf * (1.0 - q_star)).floor();
    // Saturating float-to-int cast; huge positions are vacuous anyway.
    let index = position as u64;
    QuantileBoundParams {
        n,
        q,
        epsilon,
        r_n,
        q_star,
        index,
    }
}

/// Upper confidence bound on the `q`-quantile from an ascending sample.
///
/// With probability at least `1 - ε` over the sample, the true `q`-quantile
/// risk is at most the returned value. Returns `+∞` in the vacuous regime.
pub fn quantile_upper_bound(sorted_risks: &[f64], q: f64, epsilon: f64) -> Result<f64> {
    if sorted_risks.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_q_eps(q, epsilon)?;
    check_sorted(sorted_risks)?;
    Ok(bound_from_sorted(sorted_risks, q, epsilon))
}

fn check_sorted(xs: &[f64]) -> Result<()> {
    if let Some(i) = xs.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidRange(format!("non-finite risk at position {i}")));
    }
    match xs.windows(2).position(|w| w[0] > w[1]) {
        Some(i) => Err(Error::Unsorted(i + 1)),
        None => Ok(()),
    }
}

fn bound_from_sorted(sorted: &[f64], q: f64, epsilon: f64) -> f64 {
    let p = bound_params_unchecked(sorted.len(), q, epsilon);
    if p.is_vacuous() {
        return f64::INFINITY;
    }
    // index >= 1 because q* <= q - 0.8 r_n forces n (1 - q*) > 1.
    debug_assert!(p.index >= 1);
    let k = p.index.max(1) as usize;
    sorted[k - 1]
}

/// p-value for `H: R_q(λ) > α`, accurate to `tol` (never below the exact value).
pub fn quantile_p_value(risks: &[f64], q: f64, alpha: f64, tol: f64) -> Result<f64> {
    if risks.is_empty() {
        return Err(Error::EmptyInput);
    }
    check_q_eps(q, 1.0)?;
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidRange(format!("alpha = {alpha} must be finite and >= 0")));
    }
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidRange(format!("tol = {tol} must be positive")));
    }
    if let Some(v) = risks.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidRange(format!("non-finite risk {v}")));
    }
    let mut sorted = risks.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(p_value_from_sorted(&sorted, q, alpha, tol))
}

pub(crate) fn p_value_from_sorted(sorted: &[f64], q: f64, alpha: f64, tol: f64) -> f64 {
    let certifies = |eps: f64| bound_from_sorted(sorted, q, eps) < alpha;
    if !certifies(1.0) {
        return 1.0;
    }
    if certifies(EPSILON_FLOOR) {
        return EPSILON_FLOOR;
    }
    // Invariant: certifies(hi) && !certifies(lo).
    let (mut lo, mut hi) = (EPSILON_FLOOR, 1.0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if certifies(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Exact inversion: the bound is below α iff the order-statistic index is at
    /// most `m` (the count of risks below α) and `q* > 0`, i.e. iff
    /// `q*(ε) > t = max(0, 1 - (m + 1) / n)`. Solving the quadratic in
    /// `sqrt(r_n)` gives the threshold on `r_n`, hence on `ε`.
    fn exact_p_value(risks: &[f64], q: f64, alpha: f64) -> f64 {
        let n = risks.len() as f64;
        let m = risks.iter().filter(|&&r| r < alpha).count() as f64;
        if m == 0.0 {
            return 1.0;
        }
        let t = (1.0 - (m + 1.0) / n).max(0.0);
        if q <= t {
            return 1.0;
        }
        let b = 1.5 * (q * (1.0 - q)).sqrt();
        let s = (-b + (b * b + 4.0 * 0.8 * (q - t)).sqrt()) / (2.0 * 0.8);
        let r_star = s * s;
        let c = 1.4 * (2.1 * n).ln().ln();
        let eps = 10.0 * (c - n * r_star).exp();
        eps.clamp(0.0, 1.0)
    }

    #[test]
    fn mean_examples() {
        assert!((empirical_mean_risk(&[0.2, 0.4, 0.6]).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(empirical_mean_risk(&[0.5]).unwrap(), 0.5);
        assert_eq!(empirical_mean_risk(&[0.0, 1.0, 1.0, 0.0]).unwrap(), 0.5);
        assert!(matches!(empirical_mean_risk(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn hoeffding_examples() {
        let p = hoeffding_p_value(0.4, 100, 0.5).unwrap();
        assert!((p - 0.1353352832366127).abs() < 1e-12);
        assert_eq!(hoeffding_p_value(0.6, 100, 0.5).unwrap(), 1.0);
        let p = hoeffding_p_value(0.25, 1000, 0.3).unwrap();
        assert!((p - 0.006737946999085467).abs() < 1e-12);
    }

    #[test]
    fn hoeffding_errors() {
        assert!(matches!(hoeffding_p_value(1.2, 10, 0.5), Err(Error::UnboundedRisk)));
        assert!(matches!(hoeffding_p_value(0.2, 10, 1.5), Err(Error::InvalidRange(_))));
        assert!(hoeffding_p_value(0.2, 0, 0.5).is_err());
    }

    #[test]
    fn bound_params_reference_point() {
        // Reference values from a 50-digit mpmath evaluation.
        let p = bound_params(1000, 0.1, 0.05).unwrap();
        assert!((p.r_n - 0.008_146_849_020_521_943).abs() < 1e-12, "r_n = {}", p.r_n);
        assert!((p.q_star - 0.052_865_567_098_505_40).abs() < 1e-12, "q* = {}", p.q_star);
        assert_eq!(p.index, 947);
        assert!(!p.is_vacuous());
    }

    #[test]
    fn bound_params_vacuous_regime() {
        let p = bound_params(100, 0.1, 0.1).unwrap();
        assert!(p.q_star < 0.0);
        assert!(p.is_vacuous());
        // Still vacuous at ε = 1.
        assert!(bound_params(100, 0.1, 1.0).unwrap().is_vacuous());
    }

    #[test]
    fn bound_params_epsilon_one() {
        for n in [1usize, 7, 100, 5000] {
            let p = bound_params(n, 0.3, 1.0).unwrap();
            let nf = n as f64;
            let expected = (1.4 * (2.1 * nf).ln().ln() + 10f64.ln()) / nf;
            assert!((p.r_n - expected).abs() < 1e-15);
            assert!(p.r_n > 0.0);
        }
    }

    #[test]
    fn bound_params_rejects_bad_ranges() {
        assert!(bound_params(0, 0.1, 0.1).is_err());
        assert!(bound_params(10, 0.0, 0.1).is_err());
        assert!(bound_params(10, 1.0, 0.1).is_err());
        assert!(bound_params(10, 0.1, 0.0).is_err());
        assert!(bound_params(10, 0.1, 1.5).is_err());
    }

    fn grid_1000() -> Vec<f64> {
        (1..=1000).map(|i| i as f64 / 1000.0).collect()
    }

    #[test]
    fn upper_bound_examples() {
        let xs = grid_1000();
        assert_eq!(quantile_upper_bound(&xs, 0.1, 0.05).unwrap(), 0.947);
        let hundred: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(quantile_upper_bound(&hundred, 0.1, 0.1).unwrap(), f64::INFINITY);
        let constant = vec![3.25; 5000];
        assert_eq!(quantile_upper_bound(&constant, 0.2, 0.01).unwrap(), 3.25);
    }

    #[test]
    fn upper_bound_rejects_unsorted() {
        assert!(matches!(
            quantile_upper_bound(&[0.1, 0.3, 0.2], 0.1, 0.1),
            Err(Error::Unsorted(2))
        ));
    }

    #[test]
    fn p_value_examples() {
        assert_eq!(quantile_p_value(&[0.7, 0.9, 0.8], 0.1, 0.5, DEFAULT_TOL).unwrap(), 1.0);

        let p = quantile_p_value(&grid_1000(), 0.1, 0.96, DEFAULT_TOL).unwrap();
        assert!((p - 7.2e-4).abs() < 2e-5, "p = {p}");
        // mpmath oracle: 7.185383404e-4.
        assert!((p - 7.185_383_404e-4).abs() < 2e-9, "p = {p}");

        let hundred: Vec<f64> = (0..100).map(|i| i as f64 / 1000.0).collect();
        assert_eq!(quantile_p_value(&hundred, 0.1, 10.0, DEFAULT_TOL).unwrap(), 1.0);
    }

    #[test]
    fn p_value_matches_exact_inversion() {
        let xs = grid_1000();
        for &(q, alpha) in &[(0.1, 0.96), (0.2, 0.9), (0.3, 0.8), (0.05, 0.99), (0.5, 0.6)] {
            let p = quantile_p_value(&xs, q, alpha, DEFAULT_TOL).unwrap();
            let exact = exact_p_value(&xs, q, alpha).max(EPSILON_FLOOR);
            assert!(
                p >= exact - 1e-15 && p - exact <= DEFAULT_TOL,
                "q={q} α={alpha}: {p} vs {exact}"
            );
        }
    }

    proptest! {
        #[test]
        fn hoeffding_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0, n in 1usize..5000, alpha in 0.0f64..=1.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let p_lo = hoeffding_p_value(lo, n, alpha).unwrap();
            let p_hi = hoeffding_p_value(hi, n, alpha).unwrap();
            prop_assert!(p_lo <= p_hi);
            prop_assert!((0.0..=1.0).contains(&p_lo));
            if lo < alpha {
                prop_assert!(hoeffding_p_value(lo, n + 1, alpha).unwrap() <= p_lo);
            }
        }

        #[test]
        fn bound_params_monotone_in_epsilon(n in 1usize..100_000, q in 0.001f64..0.999, e1 in 1e-9f64..1.0, e2 in 1e-9f64..1.0) {
            prop_assume!(e1 != e2);
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let a = bound_params(n, q, lo).unwrap();
            let b = bound_params(n, q, hi).unwrap();
            prop_assert!(a.r_n > b.r_n);
            prop_assert!(a.q_star < b.q_star);
            prop_assert!(b.q_star <= q && a.r_n > 0.0);
            prop_assert!(a.index >= b.index);
        }

        #[test]
        fn upper_bound_monotone(mut xs in prop::collection::vec(0.0f64..10.0, 1..400),
                                bump in prop::collection::vec(0.0f64..1.0, 400),
                                q in 0.05f64..0.6, e1 in 1e-6f64..1.0, e2 in 1e-6f64..1.0) {
            xs.sort_by(f64::total_cmp);
            let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let b_lo = quantile_upper_bound(&xs, q, lo).unwrap();
            let b_hi = quantile_upper_bound(&xs, q, hi).unwrap();
            prop_assert!(b_hi <= b_lo);
            let mut ys: Vec<f64> = xs.iter().zip(&bump).map(|(x, d)| x + d).collect();
            ys.sort_by(f64::total_cmp);
            prop_assert!(quantile_upper_bound(&ys, q, hi).unwrap() >= b_hi);
        }

        #[test]
        fn p_value_in_unit_interval_and_exact(xs in prop::collection::vec(0.0f64..1.0, 1..600),
                                              q in 0.05f64..0.6, alpha in 0.0f64..1.2) {
            let p = quantile_p_value(&xs, q, alpha, DEFAULT_TOL).unwrap();
            prop_assert!((0.0..=1.0).contains(&p));
            let exact = exact_p_value(&xs, q, alpha).max(EPSILON_FLOOR);
            prop_assert!(p >= exact - 1e-15);
            prop_assert!(p - exact <= DEFAULT_TOL + 1e-15);
        }
    }
}
