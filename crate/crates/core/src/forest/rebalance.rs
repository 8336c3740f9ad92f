use super::{depth_stats, ForestNode, NodeRef, RadixForest};

fn ceil_log2(k: usize) -> usize {
    k.next_power_of_two().trailing_zeros() as usize
}

/// Rebuilds every cell deeper than `⌈log2 k⌉ + slack` (anchor included) as a
/// median-split tree over the same leaves, leaving it at depth `⌈log2 k⌉ + 1`.
/// Anchors and all other cells are left untouched, so a forest with no
/// offending cell comes back unchanged.
pub fn rebalance_degenerate(f: &RadixForest, slack: usize) -> RadixForest {
    let stats = depth_stats(f);
    let mut out = f.clone();
    for (g, cell) in stats.cells.iter().enumerate() {
        let Some(anchor) = f.table[g].as_internal() else {
            continue;
        };
        if cell.depth <= ceil_log2(cell.leaves) + slack {
            continue;
        }
        let root = balanced(&mut out.nodes, anchor, anchor + cell.leaves - 1);
        out.nodes[anchor].children[1] = root;
    }
    out
}

/// Median-split tree over leaves `lo..=hi`; node `s` splits `[lo, s)` from `[s, hi]`.
fn balanced(nodes: &mut [ForestNode], lo: usize, hi: usize) -> NodeRef {
    if lo == hi {
        return NodeRef::leaf(lo);
    }
    let split = lo + (hi - lo).div_ceil(2);
    let left = balanced(nodes, lo, split - 1);
    let right = balanced(nodes, split, hi);
    nodes[split] = ForestNode::new(left, right);
    NodeRef::internal(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::sample_linear;
    use crate::forest::{build_forest, validate_forest};
    use crate::par::BuildMode;
    use crate::{build_cdf, Pmf};

    fn geometric(n: usize) -> Pmf {
        Pmf::new((0..n).map(|i| 0.5f64.powi(i as i32)).collect()).unwrap()
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(5), 3);
        assert_eq!(ceil_log2(16), 4);
    }

    #[test]
    fn chain_in_one_cell_is_rebuilt() {
        // Geometric bounds 1 - 2^-i all separate at successive bit levels,
        // producing a chain when they share a cell.
        let cdf = build_cdf(&geometric(16));
        let f = build_forest(&cdf, 1, BuildMode::Serial).unwrap();
        let before = depth_stats(&f).cells[0];
        assert_eq!(before.leaves, 16);
        assert!(before.depth > 4 + 2);
        let r = rebalance_degenerate(&f, 2);
        assert!(depth_stats(&r).cells[0].depth <= 5);
        assert!(validate_forest(&r).is_ok());
        for k in 0..100_000 {
            let xi = k as f64 / 100_000.0;
            assert_eq!(r.sample(xi), f.sample(xi));
            assert_eq!(r.sample(xi), sample_linear(&cdf, xi));
        }
    }

    #[test]
    fn balanced_forest_is_unchanged() {
        let cdf = build_cdf(&Pmf::new(vec![1.0; 37]).unwrap());
        let f = build_forest(&cdf, 37, BuildMode::Serial).unwrap();
        assert_eq!(rebalance_degenerate(&f, 2), f);

        let cdf = build_cdf(&geometric(20));
        let f = build_forest(&cdf, 3, BuildMode::Serial).unwrap();
        assert_eq!(rebalance_degenerate(&f, 64), f);
    }

    #[test]
    fn zero_slack_hits_the_bound() {
        let cdf = build_cdf(&geometric(32));
        let f = build_forest(&cdf, 1, BuildMode::Serial).unwrap();
        let r = rebalance_degenerate(&f, 0);
        let cell = depth_stats(&r).cells[0];
        assert!(cell.depth <= ceil_log2(cell.leaves) + 1);
    }
}
