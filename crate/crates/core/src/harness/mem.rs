use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::tree::model_bytes;
use crate::tree::params::Hyperparams;

/// Parameter grid for model-size tables. Defaults sweep the arena over
/// `2^0..=2^7` for D in {3, 100} and K in {5, 10}.
#[derive(Debug, Clone, PartialEq)]
pub struct MemGrid<F> {
    pub max_nodes: Vec<usize>,
    pub dims: Vec<usize>,
    pub classes: Vec<usize>,
    pub n_quantiles: usize,
    _scalar: PhantomData<F>,
}

impl<F: Scalar> MemGrid<F> {
    pub fn new(max_nodes: Vec<usize>, dims: Vec<usize>, classes: Vec<usize>) -> Self {
        Self {
            max_nodes,
            dims,
            classes,
            n_quantiles: crate::tree::params::DEFAULT_N_QUANTILES,
            _scalar: PhantomData,
        }
    }
}

impl<F: Scalar> Default for MemGrid<F> {
    fn default() -> Self {
        Self::new(
            (0..8).map(|e| 1usize << e).collect(),
            vec![3, 100],
            vec![5, 10],
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MemRow {
    pub max_nodes: usize,
    pub dims: usize,
    pub classes: usize,
    pub bytes: usize,
}

/// Rows ordered by D, then K, then Nd.
pub fn mem_report<F: Scalar>(grid: &MemGrid<F>) -> Vec<MemRow> {
    let mut rows = Vec::new();
    for &dims in &grid.dims {
        for &classes in &grid.classes {
            for &max_nodes in &grid.max_nodes {
                let mut p = Hyperparams::<F>::new(dims, classes).with_max_nodes(max_nodes);
                p.n_quantiles = grid.n_quantiles;
                p.n_pt = p.n_pt.min(grid.n_quantiles);
                rows.push(MemRow {
                    max_nodes,
                    dims,
                    classes,
                    bytes: model_bytes(&p),
                });
            }
        }
    }
    rows
}
