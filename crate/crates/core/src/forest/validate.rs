use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use super::{NodeRef, RadixForest, Target};
use crate::baseline::{cell_index, sample_linear};

const UNIFORM_PROBES: usize = 10_000;
const PROBE_SEED: u64 = 0x5eed_f0e5;
const MAX_REPORTED_MISMATCHES: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum ValidationFailure {
    ShapeMismatch { nodes: usize, intervals: usize },
    EmptyTable,
    /// A reference points past the node or interval arrays. `node` is `None`
    /// for guide-table entries.
    DanglingReference { node: Option<usize>, slot: usize, bits: u32 },
    /// An internal node is reachable along more than one path.
    NodeRevisited { node: usize },
    LeafUnreachable { leaf: usize },
    LeafReachedTwice { leaf: usize },
    /// Leaves below `node` are not split at `node`'s own index.
    OrderViolation { cell: usize, node: usize },
    AnchorLeftNotLeaf { cell: usize, anchor: usize },
    OracleMismatch { xi: f64, expected: usize, found: Option<usize> },
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
    pub points_checked: usize,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

enum Step {
    Visit(NodeRef, Option<usize>, usize),
    Combine(usize),
}

/// Structural and semantic check of a forest. Never panics, whatever the
/// node and table contents.
pub fn validate_forest(f: &RadixForest) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = f.cdf.len();
    if f.nodes.len() != n {
        report.failures.push(ValidationFailure::ShapeMismatch {
            nodes: f.nodes.len(),
            intervals: n,
        });
        return report;
    }
    if f.table.is_empty() {
        report.failures.push(ValidationFailure::EmptyTable);
        return report;
    }

    let mut leaf_hits = vec![0u32; n];
    let mut visited = vec![false; n];
    for (cell, &entry) in f.table.iter().enumerate() {
        match entry.target() {
            Target::Leaf(i) => {
                if i >= n {
                    report.failures.push(ValidationFailure::DanglingReference {
                        node: None,
                        slot: cell,
                        bits: entry.bits(),
                    });
                } else if cell_index(f.cdf.bounds()[i], f.table.len()) == cell {
                    // A cell whose single bound opens it, stored directly.
                    leaf_hits[i] += 1;
                }
            }
            Target::Internal(anchor) => {
                if anchor >= n {
                    report.failures.push(ValidationFailure::DanglingReference {
                        node: None,
                        slot: cell,
                        bits: entry.bits(),
                    });
                    continue;
                }
                if std::mem::replace(&mut visited[anchor], true) {
                    report
                        .failures
                        .push(ValidationFailure::NodeRevisited { node: anchor });
                    continue;
                }
                let left = f.nodes[anchor].left();
                match left.as_leaf() {
                    None => report
                        .failures
                        .push(ValidationFailure::AnchorLeftNotLeaf { cell, anchor }),
                    Some(i) if i >= n => {
                        report.failures.push(ValidationFailure::DanglingReference {
                            node: Some(anchor),
                            slot: 0,
                            bits: left.bits(),
                        })
                    }
                    Some(_) => {}
                }
                let range = check_cell_tree(f, cell, anchor, &mut visited, &mut leaf_hits, &mut report);
                if let Some((lo, _)) = range {
                    if lo != anchor {
                        report
                            .failures
                            .push(ValidationFailure::OrderViolation { cell, node: anchor });
                    }
                }
            }
        }
    }
    for (leaf, &hits) in leaf_hits.iter().enumerate() {
        match hits {
            0 => report.failures.push(ValidationFailure::LeafUnreachable { leaf }),
            1 => {}
            _ => report.failures.push(ValidationFailure::LeafReachedTwice { leaf }),
        }
    }

    check_against_oracle(f, &mut report);
    report
}

/// Walks the tree below `anchor`'s right child and returns its leaf range.
fn check_cell_tree(
    f: &RadixForest,
    cell: usize,
    anchor: usize,
    visited: &mut [bool],
    leaf_hits: &mut [u32],
    report: &mut ValidationReport,
) -> Option<(usize, usize)> {
    let n = f.nodes.len();
    let mut ranges: Vec<Option<(usize, usize)>> = Vec::new();
    let mut stack = vec![Step::Visit(f.nodes[anchor].right(), Some(anchor), 1)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Visit(r, parent, slot) => match r.target() {
                Target::Leaf(i) if i < n => {
                    leaf_hits[i] += 1;
                    ranges.push(Some((i, i)));
                }
                Target::Internal(j) if j < n => {
                    if std::mem::replace(&mut visited[j], true) {
                        report.failures.push(ValidationFailure::NodeRevisited { node: j });
                        ranges.push(None);
                        continue;
                    }
                    let node = f.nodes[j];
                    stack.push(Step::Combine(j));
                    stack.push(Step::Visit(node.right(), Some(j), 1));
                    stack.push(Step::Visit(node.left(), Some(j), 0));
                }
                _ => {
                    report.failures.push(ValidationFailure::DanglingReference {
                        node: parent,
                        slot,
                        bits: r.bits(),
                    });
                    ranges.push(None);
                }
            },
            Step::Combine(j) => {
                let right = ranges.pop().flatten();
                let left = ranges.pop().flatten();
                match (left, right) {
                    (Some(l), Some(r)) => {
                        if l.1 + 1 != j || r.0 != j {
                            report
                                .failures
                                .push(ValidationFailure::OrderViolation { cell, node: j });
                        }
                        ranges.push(Some((l.0.min(r.0), l.1.max(r.1))));
                    }
                    _ => ranges.push(None),
                }
            }
        }
    }
    ranges.pop().flatten()
}

/// Bounded traversal that reports `None` instead of indexing out of range or
/// looping.
fn guarded_sample(f: &RadixForest, xi: f64) -> Option<usize> {
    let n = f.nodes.len();
    let bounds = f.cdf.bounds();
    let mut j = f.table[cell_index(xi, f.table.len())];
    for _ in 0..=n + 1 {
        match j.target() {
            Target::Leaf(i) => return (i < n).then_some(i),
            Target::Internal(node) if node < n => {
                j = f.nodes[node].children[usize::from(xi >= bounds[node])];
            }
            Target::Internal(_) => return None,
        }
    }
    None
}

/// Smallest double that falls into cell `g`.
fn cell_start(g: usize, cells: usize) -> f64 {
    let mut x = g as f64 / cells as f64;
    while x > 0.0 && cell_index(x.next_down(), cells) >= g {
        x = x.next_down();
    }
    while cell_index(x, cells) < g {
        x = x.next_up();
    }
    x
}

fn check_against_oracle(f: &RadixForest, report: &mut ValidationReport) {
    let b = f.cdf.bounds();
    let n = f.cdf.len();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(PROBE_SEED);
    let points = (0..n)
        .flat_map(|i| [b[i], 0.5 * (b[i] + b[i + 1])])
        .chain((0..f.table.len()).map(|g| cell_start(g, f.table.len())))
        .chain((0..UNIFORM_PROBES).map(|_| rng.random::<f64>()));
    let mut mismatches = 0;
    for xi in points {
        report.points_checked += 1;
        let expected = sample_linear(&f.cdf, xi);
        let found = guarded_sample(f, xi);
        if found != Some(expected) {
            mismatches += 1;
            if mismatches <= MAX_REPORTED_MISMATCHES {
                report.failures.push(ValidationFailure::OracleMismatch {
                    xi,
                    expected,
                    found,
                });
            }
        }
    }
}
