use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Tunable constants of the learner.
///
/// `Hyperparams::new(dims, classes)` fills in the reference configuration:
/// δ = 0.001, λ = 0.01, τ = 0.05, n_min = 200, n_pt = 10, 16 quantiles and an
/// arena of 2047 nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hyperparams<F> {
    /// Split confidence δ.
    pub delta: F,
    /// Quantile sketch step λ.
    pub lambda: F,
    /// Tie-break threshold τ.
    pub tau: F,
    /// Samples a leaf absorbs between split attempts.
    pub n_min: usize,
    /// Candidate thresholds evaluated per attribute.
    pub n_pt: usize,
    pub n_quantiles: usize,
    /// Arena capacity.
    pub max_nodes: usize,
    pub dims: usize,
    pub classes: usize,
}

pub const DEFAULT_DELTA: f64 = 0.001;
pub const DEFAULT_LAMBDA: f64 = 0.01;
pub const DEFAULT_TAU: f64 = 0.05;
pub const DEFAULT_N_MIN: usize = 200;
pub const DEFAULT_N_PT: usize = 10;
pub const DEFAULT_N_QUANTILES: usize = 16;
pub const DEFAULT_MAX_NODES: usize = 2047;

impl<F: Scalar> Hyperparams<F> {
    pub fn new(dims: usize, classes: usize) -> Self {
        Self {
            delta: F::of(DEFAULT_DELTA),
            lambda: F::of(DEFAULT_LAMBDA),
            tau: F::of(DEFAULT_TAU),
            n_min: DEFAULT_N_MIN,
            n_pt: DEFAULT_N_PT,
            n_quantiles: DEFAULT_N_QUANTILES,
            max_nodes: DEFAULT_MAX_NODES,
            dims,
            classes,
        }
    }

    pub fn with_max_nodes(mut self, max_nodes: usize) -> Self {
        self.max_nodes = max_nodes;
        self
    }

    pub fn with_n_min(mut self, n_min: usize) -> Self {
        self.n_min = n_min;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.delta > F::zero() && self.delta < F::one()) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if !self.lambda.is_finite() || self.lambda <= F::zero() {
            return bad(format!(
                "lambda must be positive and finite, got {}",
                self.lambda
            ));
        }
        if !self.tau.is_finite() || self.tau < F::zero() {
            return bad(format!(
                "tau must be non-negative and finite, got {}",
                self.tau
            ));
        }
        if self.dims == 0 {
            return bad("dims must be at least 1".into());
        }
        if self.classes < 2 {
            return bad(format!("classes must be at least 2, got {}", self.classes));
        }
        if self.n_min == 0 || self.n_pt == 0 || self.n_quantiles == 0 {
            return bad("n_min, n_pt and n_quantiles must be positive".into());
        }
        if self.n_pt > self.n_quantiles {
            return bad(format!(
                "n_pt ({}) must not exceed n_quantiles ({})",
                self.n_pt, self.n_quantiles
            ));
        }
        if self.max_nodes == 0 {
            return bad("max_nodes must be at least 1".into());
        }
        let max = u32::MAX as usize;
        for (name, v) in [
            ("max_nodes", self.max_nodes),
            ("dims", self.dims),
            ("classes", self.classes),
            ("n_quantiles", self.n_quantiles),
            ("n_pt", self.n_pt),
            ("n_min", self.n_min),
        ] {
            if v > max {
                return bad(format!("{name} does not fit in 32 bits"));
            }
        }
        Ok(())
    }
}
