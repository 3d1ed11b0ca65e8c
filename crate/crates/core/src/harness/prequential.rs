use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tree::sample::Sample;
use crate::tree::{model_bytes, Tree};

pub const DEFAULT_WINDOW: usize = 1000;

/// Outcome of an infer-then-train pass over a stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrequentialReport {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    /// Wall-clock time of the infer-then-train loop.
    pub train_time: Duration,
    /// Wall-clock time of a read-only inference pass over the same stream with
    /// the final model.
    pub infer_time: Duration,
    pub final_node_count: usize,
    pub model_bytes: usize,
    /// `(end, accuracy)` per consecutive window; `end` is the exclusive sample
    /// index closing the window. A trailing partial window is included.
    pub windowed_accuracy: Vec<(usize, f64)>,
}

impl PrequentialReport {
    /// Accuracy over the last `n` samples, assembled from whole windows.
    /// Exact when `n` is a multiple of the window size and the stream length
    /// is too; otherwise the nearest covering set of windows is used.
    pub fn trailing_accuracy(&self, n: usize) -> Option<f64> {
        let start = self.total.checked_sub(n)?;
        let mut prev_end = 0;
        let mut hits = 0.0;
        let mut seen = 0usize;
        for &(end, acc) in &self.windowed_accuracy {
            let len = end - prev_end;
            if end > start {
                hits += acc * len as f64;
                seen += len;
            }
            prev_end = end;
        }
        (seen > 0).then(|| hits / seen as f64)
    }

    pub fn train_throughput(&self) -> f64 {
        self.total as f64 / self.train_time.as_secs_f64().max(1e-12)
    }
}

pub fn run_prequential<F: Scalar>(
    tree: &mut Tree<F>,
    stream: &[Sample<F>],
    window: usize,
) -> Result<PrequentialReport> {
    if stream.is_empty() {
        return Err(Error::EmptyStream);
    }
    if window == 0 {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    if let Some(i) = stream.iter().position(|s| !s.train) {
        return Err(Error::NotTraining(i));
    }

    let mut correct = 0usize;
    let mut window_hits = 0usize;
    let mut windowed = Vec::with_capacity(stream.len() / window + 1);
    let start = Instant::now();
    for (i, sample) in stream.iter().enumerate() {
        let hit = tree.train(sample)? == sample.label;
        correct += hit as usize;
        window_hits += hit as usize;
        if (i + 1) % window == 0 {
            windowed.push((i + 1, window_hits as f64 / window as f64));
            window_hits = 0;
        }
    }
    let train_time = start.elapsed();
    let tail = stream.len() % window;
    if tail != 0 {
        windowed.push((stream.len(), window_hits as f64 / tail as f64));
    }

    let start = Instant::now();
    for sample in stream {
        std::hint::black_box(tree.infer(&sample.features)?);
    }
    let infer_time = start.elapsed();

    Ok(PrequentialReport {
        total: stream.len(),
        correct,
        accuracy: correct as f64 / stream.len() as f64,
        train_time,
        infer_time,
        final_node_count: tree.node_count(),
        model_bytes: model_bytes(tree.params()),
        windowed_accuracy: windowed,
    })
}
