//! Experiment drivers: load-count benchmarks and density-error convergence.

use crate::baseline::{build_alias_table, sample_alias};
use crate::distribution::{Histogram, Pmf};
use crate::error::{Error, Result};
use crate::metrics::{quadratic_error, stats, LoadStats};
use crate::par::{map_collect, BuildMode};
use crate::sampler::{Method, Sampler};
use crate::sampler2d::{AliasSampler2D, Density2D, Options2D, Sampler2D};
use crate::sequences::{PointStream, SequenceKind};

/// First components of `len` points of `kind`, generated in order.
pub fn uniform_inputs(kind: SequenceKind, len: u64) -> Vec<f64> {
    PointStream::new(kind, len).first_components().collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BenchRow {
    pub method: Method,
    pub stats: LoadStats,
}

/// Load statistics of every method over the same inputs.
pub fn run_bench(
    pmf: &Pmf,
    methods: &[Method],
    cells: Option<usize>,
    xis: &[f64],
    group: usize,
    mode: BuildMode,
) -> Result<Vec<BenchRow>> {
    if xis.is_empty() {
        return Err(Error::EmptyTrace);
    }
    methods
        .iter()
        .map(|&method| {
            let sampler = Sampler::build(method, pmf, cells)?;
            let trace = sampler.trace(xis, mode);
            Ok(BenchRow {
                method,
                stats: stats(&trace, group)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub samples: u64,
    pub e_alias: f64,
    /// Error of the monotone radix forest mapping.
    pub e_monotonic: f64,
}

fn check_range(log2_min: u32, log2_max: u32) -> Result<()> {
    if log2_min > log2_max || log2_max > 40 {
        return Err(Error::IndexOutOfRange {
            index: log2_max as usize,
            len: 41,
        });
    }
    Ok(())
}

/// Quadratic error of the alias method and of the forest on the first
/// component of `N`-point Hammersley sets, `N = 2^log2_min ..= 2^log2_max`.
pub fn run_convergence_1d(
    pmf: &Pmf,
    log2_min: u32,
    log2_max: u32,
    mode: BuildMode,
) -> Result<Vec<ConvergenceRow>> {
    check_range(log2_min, log2_max)?;
    let alias = build_alias_table(pmf)?;
    let forest = Sampler::build(Method::RadixForest, pmf, None)?;
    let n = pmf.len();
    (log2_min..=log2_max)
        .map(|k| {
            let samples = 1u64 << k;
            let xis = uniform_inputs(SequenceKind::Hammersley, samples);
            let bin = |idx: Vec<usize>| {
                let mut h = Histogram::new(n);
                idx.into_iter().for_each(|i| h.record(i));
                h
            };
            let ha = bin(map_collect(mode, &xis, |&x| sample_alias(&alias, x)));
            let hm = bin(forest.sample_batch(&xis, mode));
            Ok(ConvergenceRow {
                samples,
                e_alias: quadratic_error(pmf, &ha)?,
                e_monotonic: quadratic_error(pmf, &hm)?,
            })
        })
        .collect()
}

/// As [`run_convergence_1d`] on a density map, binning each 2D Hammersley
/// point by the pixel it selects.
pub fn run_convergence_2d(
    d: &Density2D,
    log2_min: u32,
    log2_max: u32,
    mode: BuildMode,
) -> Result<Vec<ConvergenceRow>> {
    check_range(log2_min, log2_max)?;
    let pmf = Pmf::new(d.values().to_vec())?;
    let alias = AliasSampler2D::build(d)?;
    let forest = Sampler2D::build(
        d,
        Options2D {
            mode,
            ..Options2D::default()
        },
    )?;
    let w = d.width();
    (log2_min..=log2_max)
        .map(|k| {
            let samples = 1u64 << k;
            let points: Vec<(f64, f64)> = PointStream::hammersley(samples).collect();
            let bin = |idx: Vec<usize>| {
                let mut h = Histogram::new(pmf.len());
                idx.into_iter().for_each(|i| h.record(i));
                h
            };
            let ha = bin(map_collect(mode, &points, |&(x, y)| {
                let (r, c) = alias.sample(x, y);
                r * w + c
            }));
            let hm = bin(map_collect(mode, &points, |&(x, y)| {
                let s = forest.sample(x, y);
                s.row * w + s.col
            }));
            Ok(ConvergenceRow {
                samples,
                e_alias: quadratic_error(&pmf, &ha)?,
                e_monotonic: quadratic_error(&pmf, &hm)?,
            })
        })
        .collect()
}

/// A smooth map with dynamic range 10^4: a bright lobe over a dim floor.
pub fn synthetic_hdr(width: usize, height: usize) -> Density2D {
    let (cx, cy) = (0.3 * width as f64, 0.6 * height as f64);
    let sigma2 = (width.min(height) as f64 / 6.0).powi(2);
    let values = (0..height)
        .flat_map(|r| (0..width).map(move |c| (r, c)))
        .map(|(r, c)| {
            let dx = c as f64 + 0.5 - cx;
            let dy = r as f64 + 0.5 - cy;
            1.0 + 9999.0 * (-(dx * dx + dy * dy) / sigma2).exp()
        })
        .collect();
    Density2D::new(width, height, values).expect("positive values")
}

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}
