//! Guide table combined with a forest of radix trees, one tree per cell.
//!
//! Every cell that contains at least one interval lower bound gets an anchor
//! node: the node slot of the first bound in the cell. The anchor splits at that
//! bound, sends smaller `ξ` to the interval overlapping the cell from the left
//! and larger `ξ` into the cell's radix tree. Cells containing no bound store
//! the complemented index of the single interval covering them.

mod build;
mod node;
mod rebalance;
mod serialize;
mod validate;

pub use build::{xor_distance, ConstructionTrace};
pub use node::{ForestNode, NodeRef, Target, MAX_LEAVES};
pub use serialize::{read_forest, write_forest, MAGIC};
pub use validate::{validate_forest, ValidationFailure, ValidationReport};

pub(crate) use build::{build_segments, Segment};

use crate::baseline::cell_index;
use crate::distribution::{validate_strictly_increasing, Cdf};
use crate::error::{Error, Result};
use crate::par::BuildMode;

/// Default tolerance, in levels, before a cell tree is rebuilt balanced.
pub const DEFAULT_REBALANCE_SLACK: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct RadixForest {
    cdf: Cdf,
    nodes: Vec<ForestNode>,
    table: Vec<NodeRef>,
}

/// Options for [`RadixForest::build`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestOptions {
    /// Guide-table size; `None` uses one cell per interval.
    pub cells: Option<usize>,
    pub mode: BuildMode,
    /// Rebuild cells deeper than `⌈log2 k⌉ + slack`; `None` keeps the raw trees.
    pub rebalance_slack: Option<usize>,
    /// Store cells overlapped by a single interval directly in the table, also
    /// when that interval's bound opens the cell.
    pub direct_single_interval_cells: bool,
}

impl Default for ForestOptions {
    fn default() -> Self {
        ForestOptions {
            cells: None,
            mode: BuildMode::Parallel,
            rebalance_slack: Some(DEFAULT_REBALANCE_SLACK),
            direct_single_interval_cells: true,
        }
    }
}

pub(crate) fn check_input(cdf: &Cdf, cells: usize) -> Result<()> {
    if cells == 0 {
        return Err(Error::ZeroCells);
    }
    if cdf.len() >= MAX_LEAVES {
        return Err(Error::TooLarge { n: cdf.len() });
    }
    if !validate_strictly_increasing(cdf) {
        let index = cdf
            .bounds()
            .windows(2)
            .position(|w| w[0] >= w[1])
            .unwrap_or(0);
        return Err(Error::NotStrictlyIncreasing { index });
    }
    Ok(())
}

fn build_impl(
    cdf: &Cdf,
    cells: usize,
    mode: BuildMode,
    traced: bool,
) -> Result<(RadixForest, Option<ConstructionTrace>)> {
    check_input(cdf, cells)?;
    let segment = Segment {
        leaf_start: 0,
        bound_start: 0,
        len: cdf.len(),
        table_start: 0,
        cells,
    };
    let (nodes, table, trace) =
        build_segments(cdf.bounds(), cdf.precision(), &[segment], mode, traced);
    Ok((
        RadixForest {
            cdf: cdf.clone(),
            nodes,
            table,
        },
        trace,
    ))
}

/// Builds the forest exactly as the bottom-up merge produces it, without
/// rebalancing.
pub fn build_forest(cdf: &Cdf, cells: usize, mode: BuildMode) -> Result<RadixForest> {
    build_impl(cdf, cells, mode, false).map(|(f, _)| f)
}

/// As [`build_forest`], also counting writes per node slot.
pub fn build_forest_traced(
    cdf: &Cdf,
    cells: usize,
    mode: BuildMode,
) -> Result<(RadixForest, ConstructionTrace)> {
    build_impl(cdf, cells, mode, true).map(|(f, t)| (f, t.expect("traced build")))
}

/// A single radix tree over all intervals (one guide-table cell).
pub fn build_tree(cdf: &Cdf, mode: BuildMode) -> Result<RadixForest> {
    build_forest(cdf, 1, mode)
}

pub fn sample_forest(f: &RadixForest, xi: f64) -> usize {
    f.sample(xi)
}

/// Leaf count and depth of one guide-table cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellDepth {
    /// Interval bounds inside the cell (0 for a directly stored interval).
    pub leaves: usize,
    /// Internal nodes on the longest path, anchor included.
    pub depth: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthStats {
    pub cells: Vec<CellDepth>,
    pub max_depth: usize,
}

pub fn depth_stats(f: &RadixForest) -> DepthStats {
    let cells: Vec<CellDepth> = f
        .table
        .iter()
        .map(|&entry| match entry.as_internal() {
            None => CellDepth {
                leaves: 0,
                depth: 0,
            },
            Some(anchor) => {
                let (leaves, depth) = f.subtree_shape(f.nodes[anchor].right());
                CellDepth {
                    leaves,
                    depth: depth + 1,
                }
            }
        })
        .collect();
    let max_depth = cells.iter().map(|c| c.depth).max().unwrap_or(0);
    DepthStats { cells, max_depth }
}

pub use rebalance::rebalance_degenerate;

impl RadixForest {
    /// Builds with `opts`, rebalancing degenerate cells unless disabled.
    pub fn build(cdf: &Cdf, opts: ForestOptions) -> Result<Self> {
        let cells = opts.cells.unwrap_or(cdf.len());
        Ok(build_forest(cdf, cells, opts.mode)?.refine(&opts))
    }

    /// Applies the post-construction passes selected by `opts`.
    pub fn refine(self, opts: &ForestOptions) -> Self {
        let mut forest = match opts.rebalance_slack {
            Some(slack) => rebalance_degenerate(&self, slack),
            None => self,
        };
        if opts.direct_single_interval_cells {
            forest.collapse_single_interval_cells();
        }
        forest
    }

    /// Replaces the anchor of every cell whose only bound is the smallest value
    /// in the cell by a direct leaf reference: the anchor's left branch is
    /// unreachable there, so the cell is covered by one interval.
    pub fn collapse_single_interval_cells(&mut self) {
        let m = self.table.len();
        let bounds = self.cdf.bounds();
        for g in 0..m {
            let Some(anchor) = self.table[g].as_internal() else {
                continue;
            };
            if self.nodes[anchor].right() != NodeRef::leaf(anchor) {
                continue;
            }
            let c = bounds[anchor];
            if c == 0.0 || cell_index(c.next_down(), m) < g {
                self.table[g] = NodeRef::leaf(anchor);
            }
        }
    }

    pub(crate) fn from_parts(cdf: Cdf, nodes: Vec<ForestNode>, table: Vec<NodeRef>) -> Self {
        RadixForest { cdf, nodes, table }
    }

    pub fn cdf(&self) -> &Cdf {
        &self.cdf
    }

    pub fn nodes(&self) -> &[ForestNode] {
        &self.nodes
    }

    pub fn table(&self) -> &[NodeRef] {
        &self.table
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn cells(&self) -> usize {
        self.table.len()
    }

    #[inline]
    pub fn sample(&self, xi: f64) -> usize {
        lookup(&self.nodes, &self.table, self.cdf.bounds(), xi, &mut ())
    }

    /// Returns the interval and the number of loads: one for the table entry
    /// plus one per node visited.
    #[inline]
    pub fn sample_counted(&self, xi: f64) -> (usize, u32) {
        let mut loads = 0;
        let i = lookup(&self.nodes, &self.table, self.cdf.bounds(), xi, &mut loads);
        (i, loads)
    }

    /// `(leaves, internal depth)` of a subtree; assumes a valid forest.
    fn subtree_shape(&self, root: NodeRef) -> (usize, usize) {
        let mut leaves = 0;
        let mut depth = 0;
        let mut stack = vec![(root, 0usize)];
        while let Some((r, d)) = stack.pop() {
            match r.as_internal() {
                None => {
                    leaves += 1;
                    depth = depth.max(d);
                }
                Some(j) => {
                    let node = self.nodes[j];
                    stack.push((node.left(), d + 1));
                    stack.push((node.right(), d + 1));
                }
            }
        }
        (leaves, depth)
    }

    #[cfg(test)]
    pub(crate) fn nodes_mut(&mut self) -> &mut [ForestNode] {
        &mut self.nodes
    }
}

#[inline]
pub(crate) fn lookup<T: crate::baseline::Tally>(
    nodes: &[ForestNode],
    table: &[NodeRef],
    bounds: &[f64],
    xi: f64,
    tally: &mut T,
) -> usize {
    tally.load();
    let mut j = table[cell_index(xi, table.len())];
    while let Some(node) = j.as_internal() {
        tally.load();
        j = nodes[node].children[usize::from(xi >= bounds[node])];
    }
    !j.bits() as usize
}
