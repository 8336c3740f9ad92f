//! Discrete distributions and their cumulative bounds.
//!
//! Intervals are indexed from 0: interval `i` covers `[C[i], C[i+1])`.

use crate::error::{Error, Result};

/// Storage precision of cumulative bounds.
///
/// Bounds are always held as `f64`. In `F32` mode every bound is rounded to the
/// nearest `f32` and bit distances are taken on the `f32` patterns, which
/// reproduces a single-precision build bit for bit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Precision {
    #[default]
    F64,
    F32,
}

/// Unnormalized probability masses.
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    weights: Vec<f64>,
}

impl Pmf {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        for (index, &value) in weights.iter().enumerate() {
            if value.is_nan() || value.is_infinite() {
                return Err(Error::NonFiniteWeight { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        if weights.iter().all(|&w| w == 0.0) {
            return Err(Error::AllZeroWeights);
        }
        Ok(Pmf { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Normalized probabilities `p_i = w_i / Σw`.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = self.total();
        self.weights.iter().map(|w| w / total).collect()
    }
}

/// Neumaier-compensated sum.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

#[derive(Default)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Lower bounds `C[0..=n]` of the intervals of a distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct Cdf {
    bounds: Vec<f64>,
    precision: Precision,
}

impl Cdf {
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        Ok(build_cdf(&Pmf::new(weights.to_vec())?))
    }

    /// Wraps explicit bounds, checking `C[0] = 0`, `C[n] = 1` and monotonicity.
    pub fn from_bounds(bounds: Vec<f64>) -> Result<Self> {
        Self::from_bounds_with(bounds, Precision::F64)
    }

    pub fn from_bounds_with(bounds: Vec<f64>, precision: Precision) -> Result<Self> {
        if bounds.len() < 2 {
            return Err(Error::Empty);
        }
        if bounds[0] != 0.0 {
            return Err(Error::parse(0, "first bound must be 0"));
        }
        if bounds[bounds.len() - 1] != 1.0 {
            return Err(Error::parse(bounds.len() - 1, "last bound must be 1"));
        }
        for (i, w) in bounds.windows(2).enumerate() {
            if w[1].is_nan() || w[1] < w[0] {
                return Err(Error::parse(i + 1, "bounds must be non-decreasing"));
            }
        }
        Ok(Cdf { bounds, precision })
    }

    pub fn bounds(&self) -> &[f64] {
        &self.bounds
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Width of interval `i`.
    pub fn width(&self, i: usize) -> f64 {
        self.bounds[i + 1] - self.bounds[i]
    }

    /// Drops zero-width intervals, returning the strictly increasing remainder
    /// and the map back to the original indices.
    ///
    /// Of a run of equal bounds only the last interval has positive width, so the
    /// compacted CDF selects exactly the indices a search over `self` would.
    pub fn compact(&self) -> (Cdf, IndexRemap) {
        let mut bounds = Vec::with_capacity(self.bounds.len());
        let mut original = Vec::with_capacity(self.len());
        bounds.push(0.0);
        for i in 0..self.len() {
            if self.bounds[i] < self.bounds[i + 1] {
                bounds.push(self.bounds[i + 1]);
                original.push(i);
            }
        }
        (
            Cdf {
                bounds,
                precision: self.precision,
            },
            IndexRemap { original },
        )
    }
}

pub fn build_cdf(pmf: &Pmf) -> Cdf {
    build_cdf_with(pmf, Precision::F64)
}

pub fn build_cdf_with(pmf: &Pmf, precision: Precision) -> Cdf {
    let n = pmf.len();
    let total = pmf.total();
    let mut bounds = Vec::with_capacity(n + 1);
    bounds.push(0.0);
    let mut acc = Accumulator::default();
    let mut previous = 0.0f64;
    for &w in &pmf.weights[..n - 1] {
        acc.add(w);
        // Compensation can nudge a partial sum below its predecessor by an ulp.
        let mut c = (acc.value() / total).clamp(previous, 1.0);
        if precision == Precision::F32 {
            c = f64::from(c as f32);
        }
        bounds.push(c);
        previous = c;
    }
    bounds.push(1.0);
    Cdf { bounds, precision }
}

/// Map from a compacted index back to the original index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexRemap {
    original: Vec<usize>,
}

impl IndexRemap {
    pub fn identity(n: usize) -> Self {
        IndexRemap {
            original: (0..n).collect(),
        }
    }

    pub fn original(&self, compacted: usize) -> usize {
        self.original[compacted]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.original
    }

    pub fn len(&self) -> usize {
        self.original.len()
    }

    pub fn is_empty(&self) -> bool {
        self.original.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.original.iter().enumerate().all(|(i, &o)| i == o)
    }
}

/// Removes zero weights.
pub fn compact(pmf: &Pmf) -> Result<(Pmf, IndexRemap)> {
    let (original, weights): (Vec<usize>, Vec<f64>) = pmf
        .weights
        .iter()
        .copied()
        .enumerate()
        .filter(|&(_, w)| w > 0.0)
        .unzip();
    Ok((Pmf::new(weights)?, IndexRemap { original }))
}

pub fn validate_strictly_increasing(cdf: &Cdf) -> bool {
    cdf.bounds.windows(2).all(|w| w[0] < w[1])
}

/// Per-interval sample counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Histogram {
    counts: Vec<u64>,
    total: u64,
}

impl Histogram {
    pub fn new(n: usize) -> Self {
        Histogram {
            counts: vec![0; n],
            total: 0,
        }
    }

    pub fn from_counts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Histogram { counts, total }
    }

    pub fn record(&mut self, i: usize) {
        self.counts[i] += 1;
        self.total += 1;
    }

    pub fn merge(&mut self, other: &Histogram) {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        self.total += other.total;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}
