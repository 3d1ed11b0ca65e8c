//! Experiment plumbing: synthetic and CSV streams, the bundle kernel,
//! prequential evaluation and model-size tables.

pub mod bundle;
pub mod csv_load;
pub mod dataset;
pub mod mem;
pub mod prequential;
