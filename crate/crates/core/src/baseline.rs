//! Classic inverse-CDF searches and the alias method.
//!
//! Load counting: one load per CDF bound probed, per guide-table fetch, and per
//! alias cell fetched. Every sampler has an uncounted entry point and a
//! `_counted` twin returning `(index, loads)`.

use crate::distribution::{Cdf, Pmf};
use crate::error::{Error, Result};

/// Sink for load events; `()` discards them.
pub(crate) trait Tally {
    fn load(&mut self);
}

impl Tally for () {
    #[inline(always)]
    fn load(&mut self) {}
}

impl Tally for u32 {
    #[inline(always)]
    fn load(&mut self) {
        *self += 1;
    }
}

/// Guide-table cell of `x`, clamped to the last cell.
#[inline]
pub fn cell_index(x: f64, cells: usize) -> usize {
    ((x * cells as f64) as usize).min(cells - 1)
}

/// Interval holding the smallest `ξ` that lands in cell `g`.
///
/// Works on cell indices rather than on `g / m` so that it agrees with
/// [`cell_index`] under floating-point rounding.
pub(crate) fn first_interval_of_cell(bounds: &[f64], cells: usize, g: usize) -> usize {
    let n = bounds.len() - 1;
    let j = bounds[..n].partition_point(|&c| cell_index(c, cells) < g);
    if j < n && cell_index(bounds[j], cells) == g {
        let below = bounds[j].next_down();
        if bounds[j] == 0.0 || cell_index(below.max(0.0), cells) < g {
            return j;
        }
    }
    j.saturating_sub(1)
}

#[inline]
fn linear_from<T: Tally>(bounds: &[f64], start: usize, xi: f64, tally: &mut T) -> usize {
    let mut i = start;
    loop {
        tally.load();
        if xi < bounds[i + 1] {
            return i;
        }
        i += 1;
    }
}

/// Largest `i` in `[lo, hi)` with `C[i] ≤ ξ`, given `C[lo] ≤ ξ < C[hi]`.
#[inline]
fn bisect<T: Tally>(bounds: &[f64], mut lo: usize, mut hi: usize, xi: f64, tally: &mut T) -> usize {
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        tally.load();
        if xi < bounds[mid] {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

pub fn sample_linear(cdf: &Cdf, xi: f64) -> usize {
    linear_from(cdf.bounds(), 0, xi, &mut ())
}

pub fn sample_linear_counted(cdf: &Cdf, xi: f64) -> (usize, u32) {
    let mut loads = 0;
    (linear_from(cdf.bounds(), 0, xi, &mut loads), loads)
}

pub fn sample_binary(cdf: &Cdf, xi: f64) -> usize {
    bisect(cdf.bounds(), 0, cdf.len(), xi, &mut ())
}

pub fn sample_binary_counted(cdf: &Cdf, xi: f64) -> (usize, u32) {
    let mut loads = 0;
    (bisect(cdf.bounds(), 0, cdf.len(), xi, &mut loads), loads)
}

/// First interval overlapping each of `m` equal cells of `[0, 1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuideTable {
    first: Vec<usize>,
}

impl GuideTable {
    pub fn cells(&self) -> usize {
        self.first.len()
    }

    pub fn first(&self) -> &[usize] {
        &self.first
    }
}

pub fn build_guide_table(cdf: &Cdf, cells: usize) -> Result<GuideTable> {
    if cells == 0 {
        return Err(Error::ZeroCells);
    }
    let first = (0..cells)
        .map(|g| first_interval_of_cell(cdf.bounds(), cells, g))
        .collect();
    Ok(GuideTable { first })
}

#[inline]
fn cutpoint_linear<T: Tally>(gt: &GuideTable, cdf: &Cdf, xi: f64, tally: &mut T) -> usize {
    let g = cell_index(xi, gt.cells());
    tally.load();
    linear_from(cdf.bounds(), gt.first[g], xi, tally)
}

#[inline]
fn cutpoint_binary<T: Tally>(gt: &GuideTable, cdf: &Cdf, xi: f64, tally: &mut T) -> usize {
    let g = cell_index(xi, gt.cells());
    // Both ends of the bracket come from adjacent table entries: one fetch.
    tally.load();
    let lo = gt.first[g];
    let hi = gt.first.get(g + 1).copied().unwrap_or(cdf.len() - 1);
    bisect(cdf.bounds(), lo, hi + 1, xi, tally)
}

pub fn sample_cutpoint_linear(gt: &GuideTable, cdf: &Cdf, xi: f64) -> usize {
    cutpoint_linear(gt, cdf, xi, &mut ())
}

pub fn sample_cutpoint_linear_counted(gt: &GuideTable, cdf: &Cdf, xi: f64) -> (usize, u32) {
    let mut loads = 0;
    (cutpoint_linear(gt, cdf, xi, &mut loads), loads)
}

pub fn sample_cutpoint_binary(gt: &GuideTable, cdf: &Cdf, xi: f64) -> usize {
    cutpoint_binary(gt, cdf, xi, &mut ())
}

pub fn sample_cutpoint_binary_counted(gt: &GuideTable, cdf: &Cdf, xi: f64) -> (usize, u32) {
    let mut loads = 0;
    (cutpoint_binary(gt, cdf, xi, &mut loads), loads)
}

/// Expected number of bound probes of the in-cell linear search for uniform `ξ`,
/// computed from the interval/cell overlaps (table fetch excluded).
pub fn cutpoint_linear_expected_probes(gt: &GuideTable, cdf: &Cdf) -> f64 {
    let m = gt.cells() as f64;
    let b = cdf.bounds();
    let mut expected = 0.0;
    for g in 0..gt.cells() {
        let lo = g as f64 / m;
        let hi = (g + 1) as f64 / m;
        let start = gt.first[g];
        let mut i = start;
        while i < cdf.len() && b[i] < hi {
            let overlap = b[i + 1].min(hi) - b[i].max(lo);
            if overlap > 0.0 {
                expected += overlap * (i - start + 1) as f64;
            }
            i += 1;
        }
    }
    expected
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AliasCell {
    /// Fraction of the cell kept by its own interval.
    pub threshold: f64,
    pub alias: usize,
}

/// Walker alias table with one cell per interval.
///
/// The threshold is stored normalized to the cell, so sampling compares the
/// in-cell fraction `ξn - ⌊ξn⌋` against it.
#[derive(Clone, Debug, PartialEq)]
pub struct AliasTable {
    cells: Vec<AliasCell>,
}

const RESIDUAL_CLAMP: f64 = 1e-9;

pub fn build_alias_table(pmf: &Pmf) -> Result<AliasTable> {
    let n = pmf.len();
    let total = pmf.total();
    if total <= 0.0 {
        return Err(Error::AllZeroWeights);
    }
    let mut scaled: Vec<f64> = pmf
        .weights()
        .iter()
        .map(|w| w * n as f64 / total)
        .collect();
    let mut cells: Vec<AliasCell> = (0..n)
        .map(|i| AliasCell {
            threshold: 1.0,
            alias: i,
        })
        .collect();

    let mut small = Vec::new();
    let mut large = Vec::new();
    for (i, &s) in scaled.iter().enumerate() {
        if s < 1.0 {
            small.push(i);
        } else if s > 1.0 {
            large.push(i);
        }
    }
    // Popping from the front keeps the table independent of worklist growth order.
    small.reverse();
    large.reverse();
    while let (Some(&s), Some(&l)) = (small.last(), large.last()) {
        small.pop();
        cells[s] = AliasCell {
            threshold: scaled[s],
            alias: l,
        };
        scaled[l] = (scaled[l] + scaled[s]) - 1.0;
        if scaled[l] < 1.0 {
            large.pop();
            small.push(l);
        } else if scaled[l] == 1.0 {
            large.pop();
        }
    }
    // Whatever is left sits within rounding distance of 1.
    for i in small.into_iter().chain(large) {
        debug_assert!((scaled[i] - 1.0).abs() < RESIDUAL_CLAMP.max(1e-6));
        cells[i] = AliasCell {
            threshold: 1.0,
            alias: i,
        };
    }
    Ok(AliasTable { cells })
}

impl AliasTable {
    pub fn cells(&self) -> &[AliasCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Lebesgue measure of `{ξ : sample_alias(ξ) = i}` for every `i`.
    pub fn selection_measure(&self) -> Vec<f64> {
        let n = self.cells.len() as f64;
        let mut measure = vec![0.0; self.cells.len()];
        for (j, c) in self.cells.iter().enumerate() {
            measure[j] += c.threshold / n;
            measure[c.alias] += (1.0 - c.threshold) / n;
        }
        measure
    }
}

pub fn sample_alias(at: &AliasTable, xi: f64) -> usize {
    let n = at.cells.len();
    let scaled = xi * n as f64;
    let m = (scaled as usize).min(n - 1);
    let cell = &at.cells[m];
    if scaled - (m as f64) < cell.threshold {
        m
    } else {
        cell.alias
    }
}

pub fn sample_alias_counted(at: &AliasTable, xi: f64) -> (usize, u32) {
    (sample_alias(at, xi), 1)
}
