//! Information-gain evaluation of binary threshold splits from sketch
//! statistics.

use super::LeafStats;
use crate::scalar::Scalar;

/// Gains below this are treated as zero; masses proportional to the parent
/// can otherwise leave a few ulps of spurious gain.
const GAIN_EPSILON: f64 = 1e-12;

/// Shannon entropy in bits of an unnormalised mass vector.
pub(crate) fn entropy(masses: &[f64]) -> f64 {
    let total: f64 = masses.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| {
            let p = m / total;
            -p * p.log2()
        })
        .sum()
}

/// Information gain of splitting `left + right` into the two given parts.
/// Zero if either side is empty.
pub(crate) fn partition_gain(left: &[f64], right: &[f64]) -> f64 {
    let wl: f64 = left.iter().sum();
    let wr: f64 = right.iter().sum();
    if wl <= 0.0 || wr <= 0.0 {
        return 0.0;
    }
    let parent: Vec<f64> = left.iter().zip(right).map(|(l, r)| l + r).collect();
    let total = wl + wr;
    let gain = entropy(&parent) - (wl / total) * entropy(left) - (wr / total) * entropy(right);
    if gain < GAIN_EPSILON {
        0.0
    } else {
        gain
    }
}

/// Gain of the split `x[attr] <= v`, estimating each class's left mass as
/// `n_k * cdf_k(v)`.
pub fn split_gain<F: Scalar>(stats: &LeafStats<F>, attr: usize, v: F) -> f64 {
    let classes = stats.class_counts.len();
    let mut left = Vec::with_capacity(classes);
    let mut right = Vec::with_capacity(classes);
    for (k, &n) in stats.class_counts.iter().enumerate() {
        let sketch = stats.sketch(k, attr);
        if n == 0 || !sketch.is_seeded() {
            left.push(0.0);
            right.push(0.0);
            continue;
        }
        let n = n as f64;
        let l = n * sketch.cdf_unchecked(v).as_f64();
        left.push(l);
        right.push(n - l);
    }
    partition_gain(&left, &right)
}

/// `n_pt` candidate thresholds for one attribute, read off the class-weighted
/// pooled quantile curve.
///
/// The pooled CDF is the count-weighted mean of the per-class sketch CDFs,
/// evaluated on the union of all sketch knots and inverted by linear
/// interpolation. It is probed at `n_pt + 1` evenly spaced probabilities and
/// each candidate is the midpoint of two neighbouring probes, so a gap between
/// two modes yields a threshold inside the gap. Duplicates are removed.
pub fn candidate_thresholds<F: Scalar>(stats: &LeafStats<F>, attr: usize, n_pt: usize) -> Vec<F> {
    let seen: Vec<(f64, usize)> = stats
        .class_counts
        .iter()
        .enumerate()
        .filter(|&(k, &n)| n > 0 && stats.sketch(k, attr).is_seeded())
        .map(|(k, &n)| (n as f64, k))
        .collect();
    if seen.is_empty() {
        return Vec::new();
    }
    let weight: f64 = seen.iter().map(|s| s.0).sum();

    let mut knots: Vec<f64> = seen
        .iter()
        .flat_map(|&(_, k)| stats.sketch(k, attr).estimates().iter().map(|q| q.as_f64()))
        .collect();
    knots.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    knots.dedup();

    let pooled: Vec<f64> = knots
        .iter()
        .map(|&v| {
            seen.iter()
                .map(|&(n, k)| n * stats.sketch(k, attr).cdf_unchecked(F::of(v)).as_f64())
                .sum::<f64>()
                / weight
        })
        .collect();

    let inverse = |q: f64| -> f64 {
        let i = pooled.partition_point(|&c| c < q);
        if i == 0 {
            knots[0]
        } else if i == knots.len() {
            knots[knots.len() - 1]
        } else {
            let (c0, c1) = (pooled[i - 1], pooled[i]);
            let frac = if c1 > c0 { (q - c0) / (c1 - c0) } else { 1.0 };
            knots[i - 1] + frac * (knots[i] - knots[i - 1])
        }
    };
    let probes: Vec<f64> = (1..=n_pt + 1)
        .map(|j| inverse(j as f64 / (n_pt + 2) as f64))
        .collect();

    let mut out: Vec<F> = Vec::with_capacity(n_pt);
    for w in probes.windows(2) {
        let v = F::of(0.5 * (w[0] + w[1]));
        if out.last() != Some(&v) {
            out.push(v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantile::QuantileSketch;
    use crate::tree::params::Hyperparams;
    use proptest::prelude::*;

    #[test]
    fn entropy_basics() {
        assert_eq!(entropy(&[10.0, 0.0]), 0.0);
        assert!((entropy(&[5.0, 5.0]) - 1.0).abs() < 1e-15);
        assert!((entropy(&[1.0, 1.0, 1.0, 1.0]) - 2.0).abs() < 1e-15);
        assert_eq!(entropy(&[0.0, 0.0]), 0.0);
    }

    #[test]
    fn perfect_separation_gains_one_bit() {
        // cdf 1.0 for class 0 and 0.0 for class 1 at the threshold
        assert!((partition_gain(&[100.0, 0.0], &[0.0, 100.0]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn proportional_children_gain_nothing() {
        // counts [50, 50], both cdfs 0.5
        assert_eq!(partition_gain(&[25.0, 25.0], &[25.0, 25.0]), 0.0);
        assert_eq!(
            partition_gain(&[50.0 / 17.0, 50.0 / 17.0], &[800.0 / 17.0, 800.0 / 17.0]),
            0.0
        );
    }

    #[test]
    fn empty_side_gains_nothing() {
        assert_eq!(partition_gain(&[0.0, 0.0], &[3.0, 7.0]), 0.0);
    }

    fn two_class_stats(a: &[f64], b: &[f64]) -> LeafStats<f64> {
        let p = Hyperparams::<f64>::new(1, 2);
        let mut s = LeafStats::new(&p);
        for &x in a {
            s.absorb(&[x], 0);
        }
        for &x in b {
            s.absorb(&[x], 1);
        }
        s
    }

    #[test]
    fn threshold_below_support_gains_nothing() {
        let a: Vec<f64> = (0..100).map(|i| i as f64 * 0.01).collect();
        let b: Vec<f64> = (0..100).map(|i| 5.0 + i as f64 * 0.01).collect();
        let s = two_class_stats(&a, &b);
        assert_eq!(split_gain(&s, 0, -10.0), 0.0);
        assert_eq!(split_gain(&s, 0, 100.0), 0.0);
    }

    #[test]
    fn gap_threshold_beats_inner_threshold() {
        let a: Vec<f64> = (0..300).map(|i| (i % 50) as f64 * 0.02).collect();
        let b: Vec<f64> = (0..300).map(|i| 5.0 + (i % 50) as f64 * 0.02).collect();
        let s = two_class_stats(&a, &b);
        let gap = split_gain(&s, 0, 3.0);
        // both classes clamp at the outer targets 1/17 and 16/17
        let expected = partition_gain(
            &[300.0 * 16.0 / 17.0, 300.0 / 17.0],
            &[300.0 / 17.0, 300.0 * 16.0 / 17.0],
        );
        assert!((gap - expected).abs() < 1e-12, "{gap} vs {expected}");
        assert!(gap > split_gain(&s, 0, 0.5));
    }

    #[test]
    fn candidates_are_sorted_and_within_support() {
        let a: Vec<f64> = (0..400).map(|i| (i % 37) as f64 * 0.1).collect();
        let b: Vec<f64> = (0..200).map(|i| 2.0 + (i % 23) as f64 * 0.1).collect();
        let s = two_class_stats(&a, &b);
        let c = candidate_thresholds(&s, 0, 10);
        assert!(!c.is_empty() && c.len() <= 10);
        assert!(c.windows(2).all(|w| w[0] < w[1]));
        let lo = s.sketch(0, 0).estimates()[0].min(s.sketch(1, 0).estimates()[0]);
        let hi = s.sketch(0, 0).estimates()[15].max(s.sketch(1, 0).estimates()[15]);
        assert!(c.iter().all(|&v| v >= lo && v <= hi));
    }

    #[test]
    fn no_candidates_without_data() {
        let s = LeafStats::new(&Hyperparams::<f32>::new(2, 3));
        assert!(candidate_thresholds(&s, 1, 10).is_empty());
    }

    #[test]
    fn single_knot_yields_single_candidate() {
        let s = two_class_stats(&[1.0], &[1.0]);
        assert_eq!(candidate_thresholds(&s, 0, 10), vec![1.0]);
        let sk = QuantileSketch::<f64>::new(4, 0.01);
        assert!(!sk.is_seeded());
    }

    proptest! {
        #[test]
        fn gain_is_bounded(
            classes in 2usize..6,
            rows in prop::collection::vec((0usize..6, -50.0f64..50.0), 1..300),
            v in -60.0f64..60.0,
        ) {
            let p = Hyperparams::<f64>::new(1, classes).with_n_min(1_000_000);
            let mut s = LeafStats::new(&p);
            for (k, x) in rows {
                s.absorb(&[x], k % classes);
            }
            let g = split_gain(&s, 0, v);
            prop_assert!(g >= 0.0);
            prop_assert!(g <= (classes as f64).log2() + 1e-12);
        }

        #[test]
        fn partition_gain_bounded(masses in prop::collection::vec((0.0f64..1e6, 0.0f64..1e6), 2..8)) {
            let (l, r): (Vec<f64>, Vec<f64>) = masses.into_iter().unzip();
            let g = partition_gain(&l, &r);
            prop_assert!(g >= 0.0 && g <= (l.len() as f64).log2() + 1e-9);
        }
    }
}
