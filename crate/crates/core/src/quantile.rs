//! Constant-memory streaming quantile estimation.
//!
//! Each of the `n` estimates tracks the quantile at target probability
//! `p_i = i / (n + 1)` by a fixed-step stochastic gradient on the pinball loss.
//! The gradient is the asymmetric signum
//!
//! ```text
//! sgn_p(z) = 2(1 - p)  if z > 0
//!            -2p       if z < 0
//!            0         if z = 0
//! ```
//!
//! applied as `q_i <- q_i - step * sgn_p(q_i - x)`. After every update the
//! estimates are re-sorted so they always describe a monotone quantile curve.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileSketch<F> {
    estimates: Vec<F>,
    targets: Vec<F>,
    step: F,
    count: u64,
}

/// Evenly spaced target probabilities, excluding 0 and 1.
pub fn target_probabilities<F: Scalar>(n: usize) -> Vec<F> {
    let denom = (n + 1) as f64;
    (1..=n).map(|i| F::of(i as f64 / denom)).collect()
}

impl<F: Scalar> QuantileSketch<F> {
    pub fn new(n_quantiles: usize, step: F) -> Self {
        assert!(n_quantiles > 0, "a sketch needs at least one quantile");
        Self {
            estimates: vec![F::zero(); n_quantiles],
            targets: target_probabilities(n_quantiles),
            step,
            count: 0,
        }
    }

    /// Rebuilds a sketch from stored estimates. The estimates are taken as-is,
    /// so callers restoring from a buffer keep the exact bit pattern.
    pub(crate) fn from_parts(estimates: Vec<F>, step: F, count: u64) -> Self {
        let targets = target_probabilities(estimates.len());
        Self {
            estimates,
            targets,
            step,
            count,
        }
    }

    pub fn update(&mut self, x: F) -> Result<()> {
        if !x.is_finite() {
            return Err(Error::NonFinite {
                context: "quantile sketch update",
                value: x.as_f64(),
            });
        }
        if self.count == 0 {
            self.estimates.iter_mut().for_each(|q| *q = x);
        } else {
            let two = F::one() + F::one();
            for (q, &p) in self.estimates.iter_mut().zip(&self.targets) {
                if *q > x {
                    *q = *q - self.step * two * (F::one() - p);
                } else if *q < x {
                    *q = *q + self.step * two * p;
                }
            }
            // estimates are finite, so partial_cmp never fails
            self.estimates
                .sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        }
        self.count += 1;
        Ok(())
    }

    /// Quantile at probability `p`, interpolated linearly between knots and
    /// clamped to the outermost estimates.
    pub fn estimate(&self, p: F) -> Result<F> {
        if !self.is_seeded() {
            return Err(Error::Unseeded);
        }
        if !(p > F::zero() && p < F::one()) {
            return Err(Error::InvalidArgument(format!(
                "probability {p} outside (0, 1)"
            )));
        }
        let t = &self.targets;
        let q = &self.estimates;
        let last = t.len() - 1;
        if p <= t[0] {
            return Ok(q[0]);
        }
        if p >= t[last] {
            return Ok(q[last]);
        }
        // first knot strictly above p
        let hi = t.partition_point(|&ti| ti <= p);
        let lo = hi - 1;
        let frac = (p - t[lo]) / (t[hi] - t[lo]);
        Ok(q[lo] + frac * (q[hi] - q[lo]))
    }

    /// Piecewise-linear inverse of [`estimate`](Self::estimate).
    ///
    /// Clamped to the first and last target. On a run of equal estimates the
    /// largest matching target is returned.
    pub fn cdf_estimate(&self, v: F) -> Result<F> {
        if !self.is_seeded() {
            return Err(Error::Unseeded);
        }
        Ok(self.cdf_unchecked(v))
    }

    #[inline]
    pub(crate) fn cdf_unchecked(&self, v: F) -> F {
        let q = &self.estimates;
        let t = &self.targets;
        let last = q.len() - 1;
        if v < q[0] {
            return t[0];
        }
        // last knot with estimate <= v
        let j = q.partition_point(|&e| e <= v) - 1;
        if j == last {
            return t[last];
        }
        let frac = (v - q[j]) / (q[j + 1] - q[j]);
        t[j] + frac * (t[j + 1] - t[j])
    }

    pub fn is_seeded(&self) -> bool {
        self.count > 0
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn estimates(&self) -> &[F] {
        &self.estimates
    }

    pub fn targets(&self) -> &[F] {
        &self.targets
    }

    pub fn step(&self) -> F {
        self.step
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fixed(estimates: Vec<f64>, targets: Vec<f64>) -> QuantileSketch<f64> {
        QuantileSketch {
            estimates,
            targets,
            step: 0.01,
            count: 1,
        }
    }

    #[test]
    fn targets_exclude_endpoints() {
        let t = target_probabilities::<f64>(16);
        assert_eq!(t.len(), 16);
        assert!((t[0] - 1.0 / 17.0).abs() < 1e-15);
        assert!((t[15] - 16.0 / 17.0).abs() < 1e-15);
        assert!(t.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn first_update_seeds_all_estimates() {
        let mut s = QuantileSketch::<f32>::new(16, 0.01);
        assert!(!s.is_seeded());
        s.update(3.0).unwrap();
        assert!(s.estimates().iter().all(|&q| q == 3.0));
        assert_eq!(s.count(), 1);
    }

    #[test]
    fn signum_step_at_median() {
        // single estimator at p = 1/2
        let mut s = QuantileSketch::<f64>::new(1, 0.01);
        s.update(0.5).unwrap();
        s.update(0.7).unwrap();
        assert!((s.estimates()[0] - 0.51).abs() < 1e-12);
        s.update(0.51).unwrap();
        assert_eq!(s.estimates()[0], 0.51);
        assert_eq!(s.count(), 3);
    }

    #[test]
    fn step_below_target_moves_down() {
        let mut s = QuantileSketch::<f64>::new(1, 0.01);
        s.update(0.5).unwrap();
        s.update(0.2).unwrap();
        // 0.5 - 0.01 * 2 * (1 - 0.5)
        assert!((s.estimates()[0] - 0.49).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_finite() {
        let mut s = QuantileSketch::<f32>::new(4, 0.01);
        assert!(matches!(s.update(f32::NAN), Err(Error::NonFinite { .. })));
        assert!(s.update(f32::INFINITY).is_err());
        assert_eq!(s.count(), 0);
    }

    #[test]
    fn reads_fail_when_unseeded() {
        let s = QuantileSketch::<f32>::new(4, 0.01);
        assert!(matches!(s.estimate(0.5), Err(Error::Unseeded)));
        assert!(matches!(s.cdf_estimate(0.5), Err(Error::Unseeded)));
    }

    #[test]
    fn estimate_interpolates_and_clamps() {
        let s = fixed(vec![1.0, 2.0, 3.0], vec![0.25, 0.5, 0.75]);
        assert_eq!(s.estimate(0.5).unwrap(), 2.0);
        assert!((s.estimate(0.375).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(s.estimate(0.01).unwrap(), 1.0);
        assert_eq!(s.estimate(0.99).unwrap(), 3.0);
        assert!(s.estimate(0.0).is_err());
        assert!(s.estimate(1.0).is_err());
    }

    #[test]
    fn cdf_interpolates_and_clamps() {
        let s = fixed(vec![1.0, 2.0, 3.0], vec![0.25, 0.5, 0.75]);
        assert_eq!(s.cdf_estimate(2.0).unwrap(), 0.5);
        assert_eq!(s.cdf_estimate(0.0).unwrap(), 0.25);
        assert!((s.cdf_estimate(2.5).unwrap() - 0.625).abs() < 1e-12);
        assert_eq!(s.cdf_estimate(9.0).unwrap(), 0.75);
    }

    #[test]
    fn cdf_on_flat_run_takes_largest_target() {
        let s = fixed(vec![1.0, 2.0, 2.0, 3.0], vec![0.2, 0.4, 0.6, 0.8]);
        assert_eq!(s.cdf_estimate(2.0).unwrap(), 0.6);
        let all_equal = fixed(vec![5.0; 3], vec![0.25, 0.5, 0.75]);
        assert_eq!(all_equal.cdf_estimate(5.0).unwrap(), 0.75);
        assert_eq!(all_equal.cdf_estimate(4.9).unwrap(), 0.25);
    }

    proptest! {
        #[test]
        fn estimates_stay_sorted(xs in prop::collection::vec(-100.0f32..100.0, 1..400)) {
            let mut s = QuantileSketch::<f32>::new(16, 0.5);
            for &x in &xs {
                s.update(x).unwrap();
                prop_assert!(s.estimates().windows(2).all(|w| w[0] <= w[1]));
            }
            prop_assert_eq!(s.count(), xs.len() as u64);
        }

        #[test]
        fn deterministic(xs in prop::collection::vec(-5.0f64..5.0, 1..200)) {
            let mut a = QuantileSketch::<f64>::new(8, 0.01);
            let mut b = QuantileSketch::<f64>::new(8, 0.01);
            for &x in &xs {
                a.update(x).unwrap();
                b.update(x).unwrap();
            }
            let bits = |s: &QuantileSketch<f64>| s.estimates().iter().map(|q| q.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&a), bits(&b));
        }

        #[test]
        fn cdf_inverts_estimate_on_strict_curves(
            mut knots in prop::collection::btree_set(-1000i32..1000, 2..16)
                .prop_map(|s| s.into_iter().map(f64::from).collect::<Vec<_>>())
        ) {
            knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let n = knots.len();
            let s = QuantileSketch::<f64>::from_parts(knots, 0.01, 1);
            for &p in s.targets() {
                let back = s.cdf_estimate(s.estimate(p).unwrap()).unwrap();
                prop_assert!((back - p).abs() < 1e-12, "p={} back={} n={}", p, back, n);
            }
        }
    }
}
