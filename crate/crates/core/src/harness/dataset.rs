use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::sample::Sample;

/// Gaussian-blob stream description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DatasetSpec {
    pub clusters: usize,
    pub dims: usize,
    pub samples: usize,
    /// Standard deviation of the isotropic noise around each center.
    pub cluster_spread: f64,
    /// Centers are drawn from `[-center_box, center_box]^dims`.
    pub center_box: f64,
    pub seed: u64,
}

impl DatasetSpec {
    pub fn new(clusters: usize, dims: usize, samples: usize, seed: u64) -> Self {
        Self {
            clusters,
            dims,
            samples,
            cluster_spread: 0.1,
            center_box: 10.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.clusters < 2 || self.dims == 0 || self.samples == 0 {
            return Err(Error::InvalidArgument(format!(
                "need clusters >= 2, dims >= 1, samples >= 1 (got {}, {}, {})",
                self.clusters, self.dims, self.samples
            )));
        }
        if !(self.cluster_spread > 0.0 && self.cluster_spread.is_finite()) {
            return Err(Error::InvalidArgument(
                "cluster spread must be positive".into(),
            ));
        }
        if !(self.center_box >= 0.0 && self.center_box.is_finite()) {
            return Err(Error::InvalidArgument(
                "center box must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

fn draw_centers(rng: &mut ChaCha8Rng, spec: &DatasetSpec) -> Vec<Vec<f64>> {
    (0..spec.clusters)
        .map(|_| {
            (0..spec.dims)
                .map(|_| {
                    if spec.center_box == 0.0 {
                        0.0
                    } else {
                        rng.random_range(-spec.center_box..=spec.center_box)
                    }
                })
                .collect()
        })
        .collect()
}

/// The centers `generate_clusters` uses for this spec.
pub fn cluster_centers(spec: &DatasetSpec) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    Ok(draw_centers(&mut rng, spec))
}

/// Labels cycle `0, 1, .., K-1, 0, ..`; every sample is flagged for training.
pub fn generate_clusters<F: Scalar>(spec: &DatasetSpec) -> Result<Vec<Sample<F>>> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = draw_centers(&mut rng, spec);
    let noise =
        Normal::new(0.0, spec.cluster_spread).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok((0..spec.samples)
        .map(|i| {
            let label = i % spec.clusters;
            let features = centers[label]
                .iter()
                .map(|&c| F::of(c + noise.sample(&mut rng)))
                .collect();
            Sample::train(features, label)
        })
        .collect())
}
