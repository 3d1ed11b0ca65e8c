/// One feature vector with its label and a train/infer flag.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample<F> {
    pub features: Vec<F>,
    /// Class index; only meaningful when `train` is set.
    pub label: usize,
    pub train: bool,
}

impl<F> Sample<F> {
    pub fn train(features: Vec<F>, label: usize) -> Self {
        Self {
            features,
            label,
            train: true,
        }
    }

    pub fn infer(features: Vec<F>) -> Self {
        Self {
            features,
            label: 0,
            train: false,
        }
    }

    pub fn dims(&self) -> usize {
        self.features.len()
    }
}
