//! Flat little-endian tree layout.
//!
//! ```text
//! header   magic "HTRE" | version u16 | max_nodes dims classes n_quantiles
//!          n_pt n_min node_count root (u32 each) | delta lambda tau (scalar)
//! record   kind u8 | frozen u8 | split_attr u32 | split_value scalar |
//!          left u32 | right u32 | K x u64 class counts |
//!          K x D x n_quantiles scalar estimates | K x D u64 sketch counts |
//!          since_last_attempt u32
//! ```
//!
//! `max_nodes` records always follow the header; slots past `node_count` are
//! zero-filled. Scalars are `f32` under format version 1 and `f64` under
//! version 2, so the size of a tree depends only on its hyperparameters.

use super::{LeafStats, Node, Tree};
use crate::error::{Error, Result};
use crate::quantile::QuantileSketch;
use crate::scalar::Scalar;
use crate::tree::params::Hyperparams;

pub const HEADER_MAGIC: &[u8; 4] = b"HTRE";

const KIND_LEAF: u8 = 0;
const KIND_INTERNAL: u8 = 1;

pub fn header_size<F: Scalar>() -> usize {
    4 + 2 + 8 * 4 + 3 * F::BYTES
}

pub fn node_record_size<F: Scalar>(dims: usize, classes: usize, n_quantiles: usize) -> usize {
    let cells = classes * dims;
    1 + 1 + 4 + F::BYTES + 4 + 4 + 8 * classes + F::BYTES * cells * n_quantiles + 8 * cells + 4
}

/// Serialized size of a tree with these parameters, whatever its growth.
pub fn model_bytes<F: Scalar>(params: &Hyperparams<F>) -> usize {
    header_size::<F>()
        + params.max_nodes * node_record_size::<F>(params.dims, params.classes, params.n_quantiles)
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    out.extend_from_slice(&(v as u32).to_le_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.buf.len() {
            return Err(Error::Format(format!(
                "truncated at byte {} (need {n} more)",
                self.pos
            )));
        }
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn scalar<F: Scalar>(&mut self) -> Result<F> {
        Ok(F::read_le(self.take(F::BYTES)?))
    }
}

impl<F: Scalar> Tree<F> {
    pub fn serialize(&self) -> Vec<u8> {
        let p = &self.params;
        let record = node_record_size::<F>(p.dims, p.classes, p.n_quantiles);
        let mut out = Vec::with_capacity(model_bytes(p));
        out.extend_from_slice(HEADER_MAGIC);
        out.extend_from_slice(&F::FORMAT_VERSION.to_le_bytes());
        for v in [
            p.max_nodes,
            p.dims,
            p.classes,
            p.n_quantiles,
            p.n_pt,
            p.n_min,
            self.nodes.len(),
            self.root,
        ] {
            put_u32(&mut out, v);
        }
        p.delta.write_le(&mut out);
        p.lambda.write_le(&mut out);
        p.tau.write_le(&mut out);

        let cells = p.classes * p.dims;
        for node in &self.nodes {
            let start = out.len();
            match node {
                Node::Leaf(stats) => {
                    out.push(KIND_LEAF);
                    out.push(stats.frozen as u8);
                    put_u32(&mut out, 0);
                    F::zero().write_le(&mut out);
                    put_u32(&mut out, 0);
                    put_u32(&mut out, 0);
                    for &c in &stats.class_counts {
                        out.extend_from_slice(&c.to_le_bytes());
                    }
                    for sketch in &stats.sketches {
                        for &q in sketch.estimates() {
                            q.write_le(&mut out);
                        }
                    }
                    for sketch in &stats.sketches {
                        out.extend_from_slice(&sketch.count().to_le_bytes());
                    }
                    out.extend_from_slice(&stats.since_last_attempt.to_le_bytes());
                }
                &Node::Internal {
                    attr,
                    value,
                    left,
                    right,
                } => {
                    out.push(KIND_INTERNAL);
                    out.push(0);
                    put_u32(&mut out, attr);
                    value.write_le(&mut out);
                    put_u32(&mut out, left);
                    put_u32(&mut out, right);
                    let stats_len =
                        8 * p.classes + F::BYTES * cells * p.n_quantiles + 8 * cells + 4;
                    out.resize(out.len() + stats_len, 0);
                }
            }
            debug_assert_eq!(out.len() - start, record);
        }
        out.resize(model_bytes(p), 0);
        out
    }

    pub fn deserialize(buf: &[u8]) -> Result<Self> {
        let mut r = Reader { buf, pos: 0 };
        if r.take(4)? != HEADER_MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = r.u16()?;
        if version != F::FORMAT_VERSION {
            return Err(Error::Format(format!(
                "format version {version} does not match expected {}",
                F::FORMAT_VERSION
            )));
        }
        let max_nodes = r.u32()?;
        let dims = r.u32()?;
        let classes = r.u32()?;
        let n_quantiles = r.u32()?;
        let n_pt = r.u32()?;
        let n_min = r.u32()?;
        let node_count = r.u32()?;
        let root = r.u32()?;
        let params = Hyperparams {
            delta: r.scalar()?,
            lambda: r.scalar()?,
            tau: r.scalar()?,
            n_min,
            n_pt,
            n_quantiles,
            max_nodes,
            dims,
            classes,
        };
        params.validate()?;

        let expected = model_bytes(&params);
        if buf.len() != expected {
            return Err(Error::Format(format!(
                "buffer holds {} bytes, layout requires {expected}",
                buf.len()
            )));
        }
        if node_count == 0 || node_count > max_nodes {
            return Err(Error::Format(format!(
                "node_count {node_count} outside [1, {max_nodes}]"
            )));
        }
        if root >= node_count {
            return Err(Error::Format(format!(
                "root {root} beyond node_count {node_count}"
            )));
        }

        let cells = classes * dims;
        let mut nodes = Vec::with_capacity(max_nodes);
        for idx in 0..node_count {
            let kind = r.u8()?;
            let frozen = r.u8()?;
            let attr = r.u32()?;
            let value: F = r.scalar()?;
            let left = r.u32()?;
            let right = r.u32()?;
            match kind {
                KIND_LEAF => {
                    let class_counts = (0..classes).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
                    let mut estimates = Vec::with_capacity(cells);
                    for _ in 0..cells {
                        let q = (0..n_quantiles)
                            .map(|_| r.scalar::<F>())
                            .collect::<Result<Vec<_>>>()?;
                        if q.iter().any(|v| !v.is_finite()) {
                            return Err(Error::Format(format!("node {idx}: non-finite estimate")));
                        }
                        estimates.push(q);
                    }
                    let mut sketches = Vec::with_capacity(cells);
                    for q in estimates {
                        sketches.push(QuantileSketch::from_parts(q, params.lambda, r.u64()?));
                    }
                    let since_last_attempt = r.u32()? as u32;
                    if frozen > 1 {
                        return Err(Error::Format(format!(
                            "node {idx}: bad frozen flag {frozen}"
                        )));
                    }
                    nodes.push(Node::Leaf(LeafStats {
                        class_counts,
                        sketches,
                        dims,
                        since_last_attempt,
                        frozen: frozen == 1,
                    }));
                }
                KIND_INTERNAL => {
                    if attr >= dims {
                        return Err(Error::Format(format!(
                            "node {idx}: split attribute {attr} >= {dims}"
                        )));
                    }
                    if !value.is_finite() {
                        return Err(Error::Format(format!("node {idx}: non-finite threshold")));
                    }
                    if left >= node_count || right >= node_count || left == right {
                        return Err(Error::Format(format!(
                            "node {idx}: bad children {left}, {right}"
                        )));
                    }
                    r.take(8 * classes + F::BYTES * cells * n_quantiles + 8 * cells + 4)?;
                    nodes.push(Node::Internal {
                        attr,
                        value,
                        left,
                        right,
                    });
                }
                other => return Err(Error::Format(format!("node {idx}: unknown kind {other}"))),
            }
        }
        if buf[r.pos..].iter().any(|&b| b != 0) {
            return Err(Error::Format(
                "unused arena slots are not zero-filled".into(),
            ));
        }

        let tree = Self {
            params,
            nodes,
            root,
        };
        tree.check_structure()?;
        Ok(tree)
    }

    /// Every slot must be reached exactly once from the root.
    fn check_structure(&self) -> Result<()> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![self.root];
        while let Some(idx) = stack.pop() {
            if std::mem::replace(&mut seen[idx], true) {
                return Err(Error::Format(format!("node {idx} reachable twice")));
            }
            if let Node::Internal { left, right, .. } = self.nodes[idx] {
                stack.push(left);
                stack.push(right);
            }
        }
        if let Some(orphan) = seen.iter().position(|&s| !s) {
            return Err(Error::Format(format!(
                "node {orphan} unreachable from root"
            )));
        }
        Ok(())
    }
}
