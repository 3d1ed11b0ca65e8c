//! Bounded-memory Hoeffding tree for data streams.
//!
//! The tree lives in a fixed-capacity node arena and keeps, per leaf, one
//! streaming quantile sketch for every (class, attribute) pair instead of
//! storing samples. Leaves split when the Hoeffding bound separates the best
//! and runner-up attribute. Samples are processed one at a time in an
//! infer-then-train order, optionally grouped into bundles.
//!
//! Everything numeric is generic over a [`Scalar`] (`f32` or `f64`). The
//! `f32` instantiation is the reference configuration and the one whose
//! serialized layout is fixed; the aliases below name it directly.

pub mod error;
pub mod harness;
pub mod quantile;
pub mod scalar;
pub mod tree;

pub use error::{Error, Result};
pub use harness::{
    bundle::{process_bundle, Bundle},
    csv_load::{load_csv, write_csv, ColumnRef, CsvDataset, CsvSchema},
    dataset::{cluster_centers, generate_clusters, DatasetSpec},
    mem::{mem_report, MemGrid, MemRow},
    prequential::{run_prequential, PrequentialReport},
};
pub use quantile::QuantileSketch;
pub use scalar::Scalar;
pub use tree::params::Hyperparams;
pub use tree::sample::Sample;
pub use tree::{
    candidate_thresholds, hoeffding_bound, model_bytes, node_record_size, split_gain, LeafStats,
    Node, NodeKind, SplitDecision, Tree, HEADER_MAGIC,
};

/// Reference tree: 32-bit statistics and thresholds.
pub type HoeffdingTree = Tree<f32>;
/// Double-precision variant.
pub type HoeffdingTree64 = Tree<f64>;
pub type Sketch = QuantileSketch<f32>;
pub type Sketch64 = QuantileSketch<f64>;
pub type Params = Hyperparams<f32>;
pub type Params64 = Hyperparams<f64>;
pub type Sample32 = Sample<f32>;
pub type Sample64 = Sample<f64>;
