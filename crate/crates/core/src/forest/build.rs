//! Bottom-up forest construction with one logical worker per leaf.
//!
//! Each worker starts at its leaf and repeatedly decides whether the subtree it
//! owns is a left or right child by comparing the bit distance to the neighbor
//! just outside each end of its leaf range. A neighbor in another guide-table
//! cell (or another segment, or past the array end) counts as infinitely far.
//! The child link is written into the parent slot implied by the enumeration
//! rule, then an atomic exchange on that slot tells the worker whether its
//! sibling already finished: the first arrival retires, the second inherits the
//! merged range and carries on. A subtree whose neighbors are both out of
//! reach is the root of its cell and is hung below the cell's anchor node.

use std::sync::atomic::{AtomicI64, AtomicU32, Ordering};

use super::node::{ForestNode, NodeRef};
use crate::baseline::{cell_index, first_interval_of_cell};
use crate::distribution::Precision;
use crate::par::{for_each_index, BuildMode};

/// Bit distance of two bounds: XOR of their IEEE-754 patterns at `precision`.
///
/// For non-negative floats the bit order equals the numeric order, so the
/// highest set bit marks the first bisection level of `[0, 1)` separating them.
#[inline]
pub fn xor_distance(a: f64, b: f64, precision: Precision) -> u64 {
    match precision {
        Precision::F64 => a.to_bits() ^ b.to_bits(),
        Precision::F32 => u64::from((a as f32).to_bits() ^ (b as f32).to_bits()),
    }
}

/// One independent forest inside a flattened leaf array.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    /// First leaf (and node slot) of this segment in the flat arrays.
    pub leaf_start: usize,
    /// Offset of `C[0]` of this segment in the flat bounds array.
    pub bound_start: usize,
    pub len: usize,
    pub table_start: usize,
    pub cells: usize,
}

/// Per-slot write counters gathered during a traced construction.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstructionTrace {
    /// Child links published by merging workers, per node slot.
    pub merge_publications: Vec<u32>,
    /// Cell roots hung below an anchor, per node slot.
    pub root_publications: Vec<u32>,
    /// Left-overlap leaves written into an anchor, per node slot.
    pub anchor_left_writes: Vec<u32>,
}

struct TraceCounters {
    merge: Vec<AtomicU32>,
    root: Vec<AtomicU32>,
    anchor_left: Vec<AtomicU32>,
}

impl TraceCounters {
    fn new(n: usize) -> Self {
        let zeros = || (0..n).map(|_| AtomicU32::new(0)).collect();
        TraceCounters {
            merge: zeros(),
            root: zeros(),
            anchor_left: zeros(),
        }
    }

    fn finish(self) -> ConstructionTrace {
        let take = |v: Vec<AtomicU32>| v.into_iter().map(AtomicU32::into_inner).collect();
        ConstructionTrace {
            merge_publications: take(self.merge),
            root_publications: take(self.root),
            anchor_left_writes: take(self.anchor_left),
        }
    }
}

struct Shared<'a> {
    bounds: &'a [f64],
    precision: Precision,
    children: Vec<[AtomicU32; 2]>,
    table: Vec<AtomicU32>,
    other_bounds: Vec<AtomicI64>,
    trace: Option<&'a TraceCounters>,
}

impl Shared<'_> {
    fn run_leaf(&self, seg: &Segment, leaf: usize) {
        let value = |j: usize| self.bounds[seg.bound_start + j];
        let cell_of = |j: usize| cell_index(value(j), seg.cells);
        let cur_cell = cell_of(leaf);
        let (mut lo, mut hi) = (leaf, leaf);
        let mut node = NodeRef::leaf(leaf);
        loop {
            let low_out = lo == 0 || cell_of(lo - 1) != cur_cell;
            let high_out = hi + 1 == seg.len || cell_of(hi + 1) != cur_cell;
            if low_out && high_out {
                let anchor = seg.leaf_start + lo;
                let left = NodeRef::leaf(lo.saturating_sub(1));
                self.children[anchor][1].store(node.bits(), Ordering::Relaxed);
                self.children[anchor][0].store(left.bits(), Ordering::Relaxed);
                self.table[seg.table_start + cur_cell]
                    .store(NodeRef::internal(lo).bits(), Ordering::Relaxed);
                if let Some(t) = self.trace {
                    t.root[anchor].fetch_add(1, Ordering::Relaxed);
                    t.anchor_left[anchor].fetch_add(1, Ordering::Relaxed);
                }
                return;
            }
            let dist_low = if low_out {
                u64::MAX
            } else {
                xor_distance(value(lo), value(lo - 1), self.precision)
            };
            let dist_high = if high_out {
                u64::MAX
            } else {
                xor_distance(value(hi), value(hi + 1), self.precision)
            };
            let (child, parent, published) = if dist_low > dist_high {
                (0, hi + 1, lo)
            } else {
                (1, lo, hi)
            };
            let slot = seg.leaf_start + parent;
            self.children[slot][child].store(node.bits(), Ordering::Relaxed);
            if let Some(t) = self.trace {
                t.merge[slot].fetch_add(1, Ordering::Relaxed);
            }
            // AcqRel: our child link is released to the sibling, and the
            // sibling's link is acquired if we are second.
            let other = self.other_bounds[slot].swap(published as i64, Ordering::AcqRel);
            if other < 0 {
                return;
            }
            if child == 0 {
                hi = other as usize;
            } else {
                lo = other as usize;
            }
            node = NodeRef::internal(parent);
        }
    }
}

/// Builds every segment's nodes and table. Node references are segment-local.
pub(crate) fn build_segments(
    bounds: &[f64],
    precision: Precision,
    segments: &[Segment],
    mode: BuildMode,
    traced: bool,
) -> (Vec<ForestNode>, Vec<NodeRef>, Option<ConstructionTrace>) {
    let leaves: usize = segments.iter().map(|s| s.len).sum();
    let table_len: usize = segments.iter().map(|s| s.cells).sum();
    let counters = traced.then(|| TraceCounters::new(leaves));
    let shared = Shared {
        bounds,
        precision,
        children: (0..leaves)
            .map(|_| [AtomicU32::new(0), AtomicU32::new(0)])
            .collect(),
        table: (0..table_len).map(|_| AtomicU32::new(0)).collect(),
        other_bounds: (0..leaves).map(|_| AtomicI64::new(-1)).collect(),
        trace: counters.as_ref(),
    };

    let run = |flat: usize| {
        let s = segments.partition_point(|s| s.leaf_start + s.len <= flat);
        let seg = &segments[s];
        shared.run_leaf(seg, flat - seg.leaf_start);
    };
    for_each_index(mode, leaves, run);

    let Shared {
        children, table, ..
    } = shared;
    let nodes: Vec<ForestNode> = children
        .into_iter()
        .map(|[l, r]| {
            ForestNode::new(
                NodeRef::from_bits(l.into_inner()),
                NodeRef::from_bits(r.into_inner()),
            )
        })
        .collect();
    let mut table: Vec<NodeRef> = table
        .into_iter()
        .map(|t| NodeRef::from_bits(t.into_inner()))
        .collect();

    // Cells without a leaf of their own are covered by a single interval.
    for seg in segments {
        let local = &bounds[seg.bound_start..seg.bound_start + seg.len + 1];
        let mut has_leaf = vec![false; seg.cells];
        for &c in &local[..seg.len] {
            has_leaf[cell_index(c, seg.cells)] = true;
        }
        for (g, &occupied) in has_leaf.iter().enumerate() {
            if !occupied {
                table[seg.table_start + g] =
                    NodeRef::leaf(first_interval_of_cell(local, seg.cells, g));
            }
        }
    }

    (nodes, table, counters.map(TraceCounters::finish))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xor_examples() {
        assert_eq!(xor_distance(0.5, 0.25, Precision::F64), 0x0030_0000_0000_0000);
        assert_eq!(xor_distance(0.3, 0.3, Precision::F64), 0);
        assert_eq!(xor_distance(0.5, 0.25, Precision::F32), 0x0180_0000);
    }

    fn msb(x: u64) -> u32 {
        64 - x.leading_zeros()
    }

    #[test]
    fn xor_highest_bit_grows_with_separation() {
        let keys: Vec<f64> = (0..1024).map(|k| k as f64 / 1024.0).collect();
        for a in 0..keys.len() {
            for b in a + 1..keys.len() {
                let ab = msb(xor_distance(keys[a], keys[b], Precision::F64));
                for c in b + 1..keys.len() {
                    let ac = msb(xor_distance(keys[a], keys[c], Precision::F64));
                    assert!(ab <= ac, "{a} {b} {c}");
                }
            }
        }
    }
}
