//! Piecewise constant 2D densities: a marginal forest over the rows, then one
//! conditional forest per row, with the position inside the chosen pixel
//! recovered from the leftover of each lookup.

use crate::baseline::{build_alias_table, sample_alias, AliasTable};
use crate::distribution::{build_cdf, compensated_sum, Cdf, IndexRemap, Pmf};
use crate::error::{Error, Result};
use crate::forest::{build_segments, check_input, ForestOptions, RadixForest, Segment};
use crate::par::BuildMode;

/// Row-major grid of non-negative values.
#[derive(Clone, Debug, PartialEq)]
pub struct Density2D {
    width: usize,
    height: usize,
    values: Vec<f64>,
}

impl Density2D {
    pub fn new(width: usize, height: usize, values: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 || width.checked_mul(height) != Some(values.len()) {
            return Err(Error::DimensionMismatch {
                width,
                height,
                len: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(Error::NonFiniteWeight { index, value });
            }
            if value < 0.0 {
                return Err(Error::NegativeWeight { index, value });
            }
        }
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::AllZeroDensity);
        }
        Ok(Density2D {
            width,
            height,
            values,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.values[r * self.width..(r + 1) * self.width]
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.width + col]
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.height)
            .map(|r| compensated_sum(self.row(r).iter().copied()))
            .collect()
    }

    pub fn transpose(&self) -> Density2D {
        let values = (0..self.width)
            .flat_map(|c| (0..self.height).map(move |r| (r, c)))
            .map(|(r, c)| self.get(r, c))
            .collect();
        Density2D {
            width: self.height,
            height: self.width,
            values,
        }
    }

    /// Normalized per-pixel probabilities, row-major.
    pub fn probabilities(&self) -> Vec<f64> {
        let total = compensated_sum(self.values.iter().copied());
        self.values.iter().map(|v| v / total).collect()
    }
}

/// Builds one raw forest per CDF in a single pass over the concatenated leaves.
/// Neighbors in another row count as out of reach, so each result equals
/// [`build_forest`](crate::build_forest) on that row alone.
pub fn build_rows_flat(rows: &[Cdf], cells: usize, mode: BuildMode) -> Result<Vec<RadixForest>> {
    let mut bounds = Vec::with_capacity(rows.iter().map(|c| c.len() + 1).sum());
    let mut segments = Vec::with_capacity(rows.len());
    let mut leaf_start = 0;
    for (r, cdf) in rows.iter().enumerate() {
        check_input(cdf, cells)?;
        if cdf.precision() != rows[0].precision() {
            return Err(Error::UnsupportedFormat("rows of mixed precision".into()));
        }
        segments.push(Segment {
            leaf_start,
            bound_start: leaf_start + r,
            len: cdf.len(),
            table_start: r * cells,
            cells,
        });
        bounds.extend_from_slice(cdf.bounds());
        leaf_start += cdf.len();
    }
    let Some(first) = rows.first() else {
        return Ok(Vec::new());
    };
    let (nodes, table, _) = build_segments(&bounds, first.precision(), &segments, mode, false);
    Ok(rows
        .iter()
        .zip(&segments)
        .map(|(cdf, s)| {
            RadixForest::from_parts(
                cdf.clone(),
                nodes[s.leaf_start..s.leaf_start + s.len].to_vec(),
                table[s.table_start..s.table_start + cells].to_vec(),
            )
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options2D {
    /// Marginal guide-table size; defaults to the number of rows.
    pub m_marginal: Option<usize>,
    /// Guide-table size of every row; defaults to the row width.
    pub m_row: Option<usize>,
    /// Select the column first, then the row within it.
    pub transposed: bool,
    pub mode: BuildMode,
    pub rebalance_slack: Option<usize>,
    pub direct_single_interval_cells: bool,
}

impl Default for Options2D {
    fn default() -> Self {
        let f = ForestOptions::default();
        Options2D {
            m_marginal: None,
            m_row: None,
            transposed: false,
            mode: f.mode,
            rebalance_slack: f.rebalance_slack,
            direct_single_interval_cells: f.direct_single_interval_cells,
        }
    }
}

impl Options2D {
    /// Forests exactly as constructed.
    pub fn raw() -> Self {
        Options2D {
            rebalance_slack: None,
            direct_single_interval_cells: false,
            ..Options2D::default()
        }
    }

    fn forest(&self) -> ForestOptions {
        ForestOptions {
            cells: None,
            mode: self.mode,
            rebalance_slack: self.rebalance_slack,
            direct_single_interval_cells: self.direct_single_interval_cells,
        }
    }
}

/// A selected pixel and the position inside it, both in `[0, 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample2D {
    pub row: usize,
    pub col: usize,
    /// Horizontal position inside the pixel.
    pub u: f64,
    /// Vertical position inside the pixel.
    pub v: f64,
}

#[derive(Clone, Debug)]
struct Conditional {
    forest: RadixForest,
    remap: IndexRemap,
}

#[derive(Clone, Debug)]
pub struct Sampler2D {
    width: usize,
    height: usize,
    transposed: bool,
    marginal: RadixForest,
    outer_remap: IndexRemap,
    conditionals: Vec<Conditional>,
}

/// `(cdf, remap)` over the positive-width intervals of `weights`.
fn compacted_cdf(weights: Vec<f64>) -> Result<(Cdf, IndexRemap)> {
    Ok(build_cdf(&Pmf::new(weights)?).compact())
}

impl Sampler2D {
    pub fn build(d: &Density2D, opts: Options2D) -> Result<Self> {
        let owned;
        let grid = if opts.transposed {
            owned = d.transpose();
            &owned
        } else {
            d
        };
        let (marginal_cdf, outer_remap) =
            compacted_cdf(grid.row_sums()).map_err(|_| Error::AllZeroDensity)?;
        let m_marginal = opts.m_marginal.unwrap_or(grid.height());
        let marginal = RadixForest::build(
            &marginal_cdf,
            ForestOptions {
                cells: Some(m_marginal),
                ..opts.forest()
            },
        )?;

        let (row_cdfs, remaps): (Vec<Cdf>, Vec<IndexRemap>) = outer_remap
            .as_slice()
            .iter()
            .map(|&r| compacted_cdf(grid.row(r).to_vec()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        let m_row = opts.m_row.unwrap_or(grid.width());
        let forests = build_rows_flat(&row_cdfs, m_row, opts.mode)?;
        let refine = opts.forest();
        let conditionals = forests
            .into_iter()
            .zip(remaps)
            .map(|(f, remap)| Conditional {
                forest: f.refine(&refine),
                remap,
            })
            .collect();
        Ok(Sampler2D {
            width: d.width(),
            height: d.height(),
            transposed: opts.transposed,
            marginal,
            outer_remap,
            conditionals,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn marginal(&self) -> &RadixForest {
        &self.marginal
    }

    /// Number of rows (columns when transposed) with positive mass.
    pub fn outer_len(&self) -> usize {
        self.conditionals.len()
    }

    /// Conditional forest of the `k`-th positive row, over its positive columns.
    pub fn conditional(&self, k: usize) -> &RadixForest {
        &self.conditionals[k].forest
    }

    pub fn sample(&self, xi1: f64, xi2: f64) -> Sample2D {
        self.sample_counted(xi1, xi2).0
    }

    /// Sample plus the loads of both lookups.
    pub fn sample_counted(&self, xi1: f64, xi2: f64) -> (Sample2D, u32) {
        let (k, outer_loads) = self.marginal.sample_counted(xi1);
        let outer_frac = rescale(self.marginal.cdf(), k, xi1);
        let outer = self.outer_remap.original(k);
        let cond = &self.conditionals[k];
        let (j, inner_loads) = cond.forest.sample_counted(xi2);
        let inner_frac = rescale(cond.forest.cdf(), j, xi2);
        let inner = cond.remap.original(j);
        let s = if self.transposed {
            Sample2D {
                row: inner,
                col: outer,
                u: outer_frac,
                v: inner_frac,
            }
        } else {
            Sample2D {
                row: outer,
                col: inner,
                u: inner_frac,
                v: outer_frac,
            }
        };
        (s, outer_loads + inner_loads)
    }

    /// Exact probability of selecting each pixel, row-major, from the interval
    /// widths of the marginal and conditional CDFs.
    pub fn selection_measure(&self) -> Vec<f64> {
        let mut measure = vec![0.0; self.width * self.height];
        for (k, cond) in self.conditionals.iter().enumerate() {
            let pk = self.marginal.cdf().width(k);
            let outer = self.outer_remap.original(k);
            for j in 0..cond.forest.len() {
                let inner = cond.remap.original(j);
                let (row, col) = if self.transposed {
                    (inner, outer)
                } else {
                    (outer, inner)
                };
                measure[row * self.width + col] = pk * cond.forest.cdf().width(j);
            }
        }
        measure
    }
}

/// Position of `xi` inside interval `i`, mapped to `[0, 1)`.
fn rescale(cdf: &Cdf, i: usize, xi: f64) -> f64 {
    let b = cdf.bounds();
    ((xi - b[i]) / (b[i + 1] - b[i])).clamp(0.0, 1f64.next_down())
}

/// Marginal and conditional alias tables; the non-monotone counterpart of
/// [`Sampler2D`].
#[derive(Clone, Debug)]
pub struct AliasSampler2D {
    width: usize,
    marginal: AliasTable,
    rows: Vec<Option<AliasTable>>,
}

impl AliasSampler2D {
    pub fn build(d: &Density2D) -> Result<Self> {
        let marginal = build_alias_table(&Pmf::new(d.row_sums())?)?;
        let rows = (0..d.height())
            .map(|r| {
                Pmf::new(d.row(r).to_vec())
                    .and_then(|p| build_alias_table(&p))
                    .ok()
            })
            .collect();
        Ok(AliasSampler2D {
            width: d.width(),
            marginal,
            rows,
        })
    }

    /// `(row, col)`.
    pub fn sample(&self, xi1: f64, xi2: f64) -> (usize, usize) {
        let row = sample_alias(&self.marginal, xi1);
        let table = self.rows[row]
            .as_ref()
            .expect("rows without mass are never selected");
        (row, sample_alias(table, xi2))
    }

    pub fn selection_measure(&self) -> Vec<f64> {
        let rows = self.marginal.selection_measure();
        let mut measure = vec![0.0; self.width * rows.len()];
        for (r, table) in self.rows.iter().enumerate() {
            if let Some(t) = table {
                for (c, p) in t.selection_measure().into_iter().enumerate() {
                    measure[r * self.width + c] = rows[r] * p;
                }
            }
        }
        measure
    }
}
