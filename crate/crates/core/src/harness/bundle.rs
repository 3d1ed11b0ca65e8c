use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::sample::Sample;
use crate::tree::Tree;

/// Samples accumulated in stream order for one kernel invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Bundle<F> {
    samples: Vec<Sample<F>>,
    capacity: usize,
}

impl<F: Scalar> Bundle<F> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "bundle capacity must be positive");
        Self {
            samples: Vec::with_capacity(capacity),
            capacity,
        }
    }

    /// Wraps an existing sequence; capacity is its length.
    pub fn from_samples(samples: Vec<Sample<F>>) -> Self {
        let capacity = samples.len().max(1);
        Self { samples, capacity }
    }

    pub fn push(&mut self, sample: Sample<F>) -> Result<()> {
        if self.is_full() {
            return Err(Error::BundleFull(self.capacity));
        }
        if let Some(first) = self.samples.first() {
            if first.dims() != sample.dims() {
                return Err(Error::DimensionMismatch {
                    expected: first.dims(),
                    got: sample.dims(),
                });
            }
        }
        self.samples.push(sample);
        Ok(())
    }

    pub fn is_full(&self) -> bool {
        self.samples.len() >= self.capacity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn samples(&self) -> &[Sample<F>] {
        &self.samples
    }

    pub fn clear(&mut self) {
        self.samples.clear();
    }
}

/// Runs a bundle through the tree one sample at a time: flagged samples are
/// trained (yielding the pre-update prediction), the rest only inferred.
///
/// The whole bundle is validated before the tree is touched, so a bad sample
/// leaves the model unchanged.
pub fn process_bundle<F: Scalar>(tree: &mut Tree<F>, bundle: &Bundle<F>) -> Result<Vec<usize>> {
    let dims = tree.params().dims;
    let classes = tree.params().classes;
    for s in bundle.samples() {
        if s.dims() != dims {
            return Err(Error::DimensionMismatch {
                expected: dims,
                got: s.dims(),
            });
        }
        if s.train && s.label >= classes {
            return Err(Error::LabelOutOfRange {
                label: s.label,
                classes,
            });
        }
        if let Some(x) = s.features.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "bundle sample",
                value: x.as_f64(),
            });
        }
    }
    bundle.samples().iter().map(|s| tree.process(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::params::Hyperparams;

    #[test]
    fn all_infer_bundle_is_pure() {
        let mut tree = Tree::new(Hyperparams::<f32>::new(2, 3)).unwrap();
        let before = tree.serialize();
        let bundle = Bundle::from_samples(
            (0..50)
                .map(|i| Sample::infer(vec![i as f32, 0.0]))
                .collect(),
        );
        let out = process_bundle(&mut tree, &bundle).unwrap();
        assert_eq!(out, vec![0; 50]);
        assert_eq!(tree.serialize(), before);
    }

    #[test]
    fn capacity_and_dims_enforced() {
        let mut b = Bundle::<f32>::new(2);
        b.push(Sample::train(vec![1.0, 2.0], 0)).unwrap();
        assert!(matches!(
            b.push(Sample::infer(vec![1.0])),
            Err(Error::DimensionMismatch { .. })
        ));
        b.push(Sample::infer(vec![1.0, 2.0])).unwrap();
        assert!(b.is_full());
        assert!(matches!(
            b.push(Sample::infer(vec![1.0, 2.0])),
            Err(Error::BundleFull(2))
        ));
    }

    #[test]
    fn mismatch_leaves_tree_untouched() {
        let mut tree = Tree::new(Hyperparams::<f32>::new(2, 3)).unwrap();
        let before = tree.serialize();
        let bundle = Bundle::from_samples(vec![
            Sample::train(vec![1.0, 2.0], 1),
            Sample::train(vec![1.0], 1),
        ]);
        assert!(process_bundle(&mut tree, &bundle).is_err());
        assert_eq!(tree.serialize(), before);
    }
}
