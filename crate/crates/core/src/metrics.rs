//! Load statistics, density error and monotonicity checks.

use crate::distribution::{Histogram, Pmf};
use crate::error::{Error, Result};

/// Memory loads spent on each sample, in sampling order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadTrace {
    counts: Vec<u32>,
}

impl LoadTrace {
    pub fn new(counts: Vec<u32>) -> Self {
        debug_assert!(counts.iter().all(|&c| c >= 1));
        LoadTrace { counts }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn extend(&mut self, other: &LoadTrace) {
        self.counts.extend_from_slice(&other.counts);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadStats {
    pub max: u32,
    pub average: f64,
    /// Mean over consecutive groups of the per-group maximum: the cost of
    /// `group` lanes that must wait for their slowest member.
    pub average_group: f64,
}

/// Max, mean and grouped-max mean of a trace. A trailing partial group is
/// ignored by the grouped mean.
pub fn stats(trace: &LoadTrace, group: usize) -> Result<LoadStats> {
    let counts = &trace.counts;
    if counts.is_empty() {
        return Err(Error::EmptyTrace);
    }
    if group == 0 || counts.len() < group {
        return Err(Error::InvalidGroupSize {
            group,
            len: counts.len(),
        });
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    let groups = counts.len() / group;
    let group_total: u64 = counts
        .chunks_exact(group)
        .map(|g| u64::from(g.iter().copied().max().unwrap_or(0)))
        .sum();
    Ok(LoadStats {
        max,
        average: total as f64 / counts.len() as f64,
        average_group: group_total as f64 / groups as f64,
    })
}

/// `Σ_i (p_i − c_i / N)²` with `N` the histogram total.
pub fn quadratic_error(pmf: &Pmf, hist: &Histogram) -> Result<f64> {
    if pmf.len() != hist.len() {
        return Err(Error::LengthMismatch {
            expected: pmf.len(),
            found: hist.len(),
        });
    }
    if hist.total() == 0 {
        return Err(Error::EmptyTrace);
    }
    let total = hist.total() as f64;
    Ok(pmf
        .probabilities()
        .iter()
        .zip(hist.counts())
        .map(|(p, &c)| {
            let d = p - c as f64 / total;
            d * d
        })
        .sum())
}

/// Adjacent pairs of an ascending grid whose results decrease.
pub fn monotonicity_violations(sampler: impl Fn(f64) -> usize, grid: &[f64]) -> usize {
    let mut violations = 0;
    let mut prev: Option<usize> = None;
    for &xi in grid {
        let cur = sampler(xi);
        if prev.is_some_and(|p| p > cur) {
            violations += 1;
        }
        prev = Some(cur);
    }
    violations
}

pub fn histogram(
    sampler: impl Fn(f64) -> usize,
    xis: impl IntoIterator<Item = f64>,
    n: usize,
) -> Histogram {
    let mut h = Histogram::new(n);
    for xi in xis {
        h.record(sampler(xi));
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline::{build_alias_table, sample_alias};
    use crate::sampler::{Method, Sampler};
    use crate::sequences::PointStream;
    use proptest::prelude::*;

    #[test]
    fn constant_trace() {
        let s = stats(&LoadTrace::new(vec![3; 64]), 32).unwrap();
        assert_eq!((s.max, s.average, s.average_group), (3, 3.0, 3.0));
    }

    #[test]
    fn one_slow_lane_costs_the_group() {
        let mut c = vec![1; 32];
        c[17] = 5;
        let s = stats(&LoadTrace::new(c), 32).unwrap();
        assert_eq!(s.average_group, 5.0);
        assert_eq!(s.average, 36.0 / 32.0);
        assert_eq!(s.max, 5);
    }

    #[test]
    fn partial_group_dropped() {
        let mut c = vec![1; 40];
        c[35] = 9;
        let s = stats(&LoadTrace::new(c), 32).unwrap();
        assert_eq!(s.average_group, 1.0);
        assert_eq!(s.max, 9);
    }

    #[test]
    fn stats_errors() {
        assert!(matches!(stats(&LoadTrace::new(vec![]), 32), Err(Error::EmptyTrace)));
        assert!(matches!(
            stats(&LoadTrace::new(vec![1; 4]), 0),
            Err(Error::InvalidGroupSize { .. })
        ));
    }

    #[test]
    fn quadratic_error_examples() {
        let pmf = Pmf::new(vec![1.0, 3.0]).unwrap();
        let h = Histogram::from_counts(vec![25, 75]);
        assert_eq!(quadratic_error(&pmf, &h).unwrap(), 0.0);

        let pmf = Pmf::new(vec![0.5, 0.5]).unwrap();
        let h = Histogram::from_counts(vec![1, 0]);
        assert_eq!(quadratic_error(&pmf, &h).unwrap(), 0.5);

        assert!(matches!(
            quadratic_error(&pmf, &Histogram::from_counts(vec![1, 2, 3])),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn alias_is_not_monotone() {
        let at = build_alias_table(&Pmf::new(vec![1.0, 1.0, 2.0, 4.0]).unwrap()).unwrap();
        let grid: Vec<f64> = (0..10_000).map(|k| k as f64 / 10_000.0).collect();
        assert!(monotonicity_violations(|xi| sample_alias(&at, xi), &grid) > 0);
    }

    #[test]
    fn single_interval_is_monotone_everywhere() {
        let pmf = Pmf::new(vec![2.0]).unwrap();
        let grid: Vec<f64> = (0..1000).map(|k| k as f64 / 1000.0).collect();
        for m in Method::ALL {
            let s = Sampler::build(m, &pmf, None).unwrap();
            assert_eq!(monotonicity_violations(|xi| s.sample(xi), &grid), 0);
        }
    }

    #[test]
    fn histogram_examples() {
        let pmf = Pmf::new(vec![1.0; 4]).unwrap();
        let s = Sampler::build(Method::RadixForest, &pmf, None).unwrap();
        let h = histogram(|xi| s.sample(xi), PointStream::hammersley(4).first_components(), 4);
        assert_eq!(h.counts(), &[1, 1, 1, 1]);

        let one = Sampler::build(Method::Binary, &Pmf::new(vec![1.0]).unwrap(), None).unwrap();
        let h = histogram(|xi| one.sample(xi), PointStream::prng(3, 100).first_components(), 1);
        assert_eq!(h.counts(), &[100]);
        assert_eq!(h.total(), 100);
    }

    #[test]
    fn forest_on_uniform_costs_one_load() {
        let pmf = Pmf::new(vec![1.0; 256]).unwrap();
        let s = Sampler::build(Method::RadixForest, &pmf, None).unwrap();
        for k in 0..10_000 {
            assert_eq!(s.sample_counted(k as f64 / 10_000.0).1, 1);
        }
    }

    proptest! {
        #[test]
        fn grouped_mean_below_max(
            counts in prop::collection::vec(1u32..20, 1..300),
            group in 1usize..40,
        ) {
            prop_assume!(counts.len() >= group);
            let s = stats(&LoadTrace::new(counts), group).unwrap();
            prop_assert!(s.average_group <= f64::from(s.max));
        }

        #[test]
        fn full_groups_bracket_the_mean(
            counts in prop::collection::vec(1u32..20, 1..10),
            group in 1usize..40,
            reps in 1usize..8,
        ) {
            let full: Vec<u32> = counts.iter().copied().cycle().take(group * reps).collect();
            let s = stats(&LoadTrace::new(full), group).unwrap();
            prop_assert!(s.average <= s.average_group + 1e-12);
            prop_assert!(s.average_group <= f64::from(s.max));
        }

        #[test]
        fn quadratic_error_permutation_invariant(
            pairs in prop::collection::vec((0.01f64..10.0, 0u64..50), 1..40),
            rot in 0usize..40,
        ) {
            let (w, c): (Vec<f64>, Vec<u64>) = pairs.iter().copied().unzip();
            prop_assume!(c.iter().sum::<u64>() > 0);
            let e = quadratic_error(&Pmf::new(w.clone()).unwrap(), &Histogram::from_counts(c.clone())).unwrap();
            let k = rot % w.len();
            let (mut w2, mut c2) = (w, c);
            w2.rotate_left(k);
            c2.rotate_left(k);
            let e2 = quadratic_error(&Pmf::new(w2).unwrap(), &Histogram::from_counts(c2)).unwrap();
            prop_assert!((e - e2).abs() <= 1e-12 * e.max(1e-300));
        }
    }
}
