//! Arena-backed Hoeffding tree.
//!
//! Nodes live in a vector whose length never exceeds `max_nodes`; children are
//! addressed by index. Only leaves carry statistics. A leaf that would need two
//! more slots than the arena has left is frozen: it keeps learning its class
//! distribution but never splits.

mod format;
pub mod params;
pub mod sample;
pub mod split;

pub use format::{header_size, model_bytes, node_record_size, HEADER_MAGIC};
pub use split::{candidate_thresholds, split_gain};

use crate::error::{Error, Result};
use crate::quantile::QuantileSketch;
use crate::scalar::Scalar;
use params::Hyperparams;
use sample::Sample;

/// Hoeffding bound `sqrt(R² ln(1/δ) / 2N)`.
pub fn hoeffding_bound(range: f64, delta: f64, n: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "hoeffding bound needs n >= 1".into(),
        ));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !range.is_finite() || range < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "range must be finite and non-negative, got {range}"
        )));
    }
    Ok((range * range * (1.0 / delta).ln() / (2.0 * n as f64)).sqrt())
}

/// Per-leaf statistics: class counts plus a K×D grid of quantile sketches,
/// stored class-major (`sketches[k * dims + d]`).
#[derive(Debug, Clone, PartialEq)]
pub struct LeafStats<F> {
    pub(crate) class_counts: Vec<u64>,
    pub(crate) sketches: Vec<QuantileSketch<F>>,
    pub(crate) dims: usize,
    pub(crate) since_last_attempt: u32,
    pub(crate) frozen: bool,
}

impl<F: Scalar> LeafStats<F> {
    pub fn new(params: &Hyperparams<F>) -> Self {
        let sketch = QuantileSketch::new(params.n_quantiles, params.lambda);
        Self {
            class_counts: vec![0; params.classes],
            sketches: vec![sketch; params.classes * params.dims],
            dims: params.dims,
            since_last_attempt: 0,
            frozen: false,
        }
    }

    pub fn class_counts(&self) -> &[u64] {
        &self.class_counts
    }

    pub fn total(&self) -> u64 {
        self.class_counts.iter().sum()
    }

    pub fn sketch(&self, class: usize, attr: usize) -> &QuantileSketch<F> {
        &self.sketches[class * self.dims + attr]
    }

    pub fn since_last_attempt(&self) -> u32 {
        self.since_last_attempt
    }

    pub fn is_frozen(&self) -> bool {
        self.frozen
    }

    /// Range of the information gain at this leaf: log2 of the number of
    /// classes seen here, at least one bit.
    pub fn gain_range(&self) -> f64 {
        (self.observed_classes().max(2) as f64).log2()
    }

    pub fn observed_classes(&self) -> usize {
        self.class_counts.iter().filter(|&&c| c > 0).count()
    }

    /// Majority class; ties go to the lowest index and an empty leaf says 0.
    pub fn majority(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.class_counts.iter().enumerate() {
            if c > self.class_counts[best] {
                best = k;
            }
        }
        best
    }

    fn absorb(&mut self, features: &[F], label: usize) {
        self.class_counts[label] += 1;
        self.since_last_attempt = self.since_last_attempt.saturating_add(1);
        let row = &mut self.sketches[label * self.dims..(label + 1) * self.dims];
        for (sketch, &x) in row.iter_mut().zip(features) {
            sketch
                .update(x)
                .expect("features are validated finite before absorption");
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node<F> {
    Leaf(LeafStats<F>),
    Internal {
        attr: usize,
        value: F,
        left: usize,
        right: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Internal,
}

impl<F> Node<F> {
    pub fn kind(&self) -> NodeKind {
        match self {
            Node::Leaf(_) => NodeKind::Leaf,
            Node::Internal { .. } => NodeKind::Internal,
        }
    }

    pub fn as_leaf(&self) -> Option<&LeafStats<F>> {
        match self {
            Node::Leaf(stats) => Some(stats),
            Node::Internal { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SplitDecision<F> {
    None,
    Split { attr: usize, value: F },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tree<F> {
    pub(crate) params: Hyperparams<F>,
    pub(crate) nodes: Vec<Node<F>>,
    pub(crate) root: usize,
}

impl<F: Scalar> Tree<F> {
    pub fn new(params: Hyperparams<F>) -> Result<Self> {
        params.validate()?;
        let mut nodes = Vec::with_capacity(params.max_nodes);
        nodes.push(Node::Leaf(LeafStats::new(&params)));
        Ok(Self {
            params,
            nodes,
            root: 0,
        })
    }

    pub fn params(&self) -> &Hyperparams<F> {
        &self.params
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn node(&self, index: usize) -> Option<&Node<F>> {
        self.nodes.get(index)
    }

    pub fn nodes(&self) -> &[Node<F>] {
        &self.nodes
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.kind() == NodeKind::Leaf)
            .count()
    }

    pub fn internal_count(&self) -> usize {
        self.node_count() - self.leaf_count()
    }

    pub fn depth(&self) -> usize {
        let mut deepest = 0;
        let mut stack = vec![(self.root, 0)];
        while let Some((idx, d)) = stack.pop() {
            deepest = deepest.max(d);
            if let Node::Internal { left, right, .. } = self.nodes[idx] {
                stack.push((left, d + 1));
                stack.push((right, d + 1));
            }
        }
        deepest
    }

    /// Free arena slots.
    pub fn remaining_capacity(&self) -> usize {
        self.params.max_nodes - self.nodes.len()
    }

    fn check_features(&self, features: &[F]) -> Result<()> {
        if features.len() != self.params.dims {
            return Err(Error::DimensionMismatch {
                expected: self.params.dims,
                got: features.len(),
            });
        }
        if let Some(x) = features.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                context: "sample features",
                value: x.as_f64(),
            });
        }
        Ok(())
    }

    fn descend(&self, features: &[F]) -> usize {
        let mut idx = self.root;
        while let Node::Internal {
            attr,
            value,
            left,
            right,
        } = self.nodes[idx]
        {
            idx = if features[attr] <= value { left } else { right };
        }
        idx
    }

    /// Index of the leaf a feature vector falls into.
    pub fn sort_to_leaf(&self, features: &[F]) -> Result<usize> {
        self.check_features(features)?;
        Ok(self.descend(features))
    }

    pub fn infer(&self, features: &[F]) -> Result<usize> {
        let leaf = self.sort_to_leaf(features)?;
        Ok(self.leaf_stats(leaf).majority())
    }

    /// Infer-then-train: returns the prediction made before the sample is
    /// absorbed.
    pub fn train(&mut self, sample: &Sample<F>) -> Result<usize> {
        self.check_features(&sample.features)?;
        if sample.label >= self.params.classes {
            return Err(Error::LabelOutOfRange {
                label: sample.label,
                classes: self.params.classes,
            });
        }
        let leaf = self.descend(&sample.features);
        let n_min = self.params.n_min;
        let stats = self.leaf_stats_mut(leaf);
        let prediction = stats.majority();
        stats.absorb(&sample.features, sample.label);
        if stats.since_last_attempt as usize >= n_min && !stats.frozen {
            stats.since_last_attempt = 0;
            self.attempt_split(leaf)?;
        }
        Ok(prediction)
    }

    /// Dispatches on the sample's flag.
    pub fn process(&mut self, sample: &Sample<F>) -> Result<usize> {
        if sample.train {
            self.train(sample)
        } else {
            self.infer(&sample.features)
        }
    }

    fn leaf_stats(&self, idx: usize) -> &LeafStats<F> {
        match &self.nodes[idx] {
            Node::Leaf(stats) => stats,
            Node::Internal { .. } => unreachable!("descent always ends on a leaf"),
        }
    }

    fn leaf_stats_mut(&mut self, idx: usize) -> &mut LeafStats<F> {
        match &mut self.nodes[idx] {
            Node::Leaf(stats) => stats,
            Node::Internal { .. } => unreachable!("descent always ends on a leaf"),
        }
    }

    /// Best split of a leaf if the Hoeffding test accepts it, without touching
    /// the tree.
    pub fn evaluate_split(&self, leaf: usize) -> Result<SplitDecision<F>> {
        let stats = match self.nodes.get(leaf) {
            Some(Node::Leaf(stats)) => stats,
            _ => return Err(Error::NotALeaf(leaf)),
        };
        let n = stats.total();
        if n == 0 || stats.observed_classes() < 2 {
            return Ok(SplitDecision::None);
        }

        let mut per_attr: Vec<(usize, f64, F)> = (0..self.params.dims)
            .map(|attr| {
                let mut best = (0.0, F::zero());
                for v in candidate_thresholds(stats, attr, self.params.n_pt) {
                    let g = split_gain(stats, attr, v);
                    if g > best.0 {
                        best = (g, v);
                    }
                }
                (attr, best.0, best.1)
            })
            .collect();
        // stable: equal gains keep the lower attribute index first
        per_attr.sort_by(|a, b| b.1.total_cmp(&a.1));

        let (attr, g_best, value) = per_attr[0];
        let g_second = per_attr.get(1).map_or(0.0, |s| s.1);
        let eps = hoeffding_bound(stats.gain_range(), self.params.delta.as_f64(), n)?;
        if g_best > 0.0 && (g_best - g_second > eps || eps < self.params.tau.as_f64()) {
            Ok(SplitDecision::Split { attr, value })
        } else {
            Ok(SplitDecision::None)
        }
    }

    /// Runs the split test on a leaf and applies it. With fewer than two free
    /// slots the leaf is frozen instead.
    pub fn attempt_split(&mut self, leaf: usize) -> Result<SplitDecision<F>> {
        match self.nodes.get(leaf) {
            Some(Node::Leaf(stats)) if stats.frozen => return Ok(SplitDecision::None),
            Some(Node::Leaf(_)) => {}
            _ => return Err(Error::NotALeaf(leaf)),
        }
        if self.remaining_capacity() < 2 {
            self.leaf_stats_mut(leaf).frozen = true;
            return Ok(SplitDecision::None);
        }
        let decision = self.evaluate_split(leaf)?;
        if let SplitDecision::Split { attr, value } = decision {
            let left = self.nodes.len();
            let right = left + 1;
            self.nodes.push(Node::Leaf(LeafStats::new(&self.params)));
            self.nodes.push(Node::Leaf(LeafStats::new(&self.params)));
            self.nodes[leaf] = Node::Internal {
                attr,
                value,
                left,
                right,
            };
        }
        Ok(decision)
    }
}
