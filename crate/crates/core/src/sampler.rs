//! Uniform front end over every sampling method.

use std::fmt;
use std::str::FromStr;

use crate::baseline::{
    build_alias_table, build_guide_table, sample_alias, sample_binary, sample_binary_counted,
    sample_cutpoint_binary, sample_cutpoint_binary_counted, sample_cutpoint_linear,
    sample_cutpoint_linear_counted, sample_linear, sample_linear_counted, AliasTable, GuideTable,
};
use crate::distribution::{build_cdf, validate_strictly_increasing, Cdf, IndexRemap, Pmf};
use crate::error::Result;
use crate::forest::{ForestOptions, RadixForest};
use crate::metrics::LoadTrace;
use crate::par::{map_collect, BuildMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Method {
    Linear,
    Binary,
    CutpointLinear,
    CutpointBinary,
    Alias,
    /// Guide table plus radix forest, degenerate cells rebalanced.
    RadixForest,
    /// Guide table plus radix forest exactly as constructed.
    RadixForestRaw,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::Linear,
        Method::Binary,
        Method::CutpointLinear,
        Method::CutpointBinary,
        Method::Alias,
        Method::RadixForest,
        Method::RadixForestRaw,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Linear => "linear",
            Method::Binary => "binary",
            Method::CutpointLinear => "cutpoint-linear",
            Method::CutpointBinary => "cutpoint-binary",
            Method::Alias => "alias",
            Method::RadixForest => "radix-forest",
            Method::RadixForestRaw => "radix-forest-raw",
        }
    }

    /// Whether `ξ1 ≤ ξ2` implies `i(ξ1) ≤ i(ξ2)`.
    pub fn is_monotone(self) -> bool {
        self != Method::Alias
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown sampler '{s}' (expected one of {})", names.join(", "))
            })
    }
}

#[derive(Clone, Debug)]
enum Kind {
    Linear(Cdf),
    Binary(Cdf),
    CutpointLinear(Cdf, GuideTable),
    CutpointBinary(Cdf, GuideTable),
    Alias(AliasTable),
    Forest(RadixForest, Option<IndexRemap>),
}

/// A built sampler of one method over one distribution.
#[derive(Clone, Debug)]
pub struct Sampler {
    method: Method,
    kind: Kind,
}

impl Sampler {
    /// `cells` sizes the guide table (default: one cell per interval). Forest
    /// methods drop zero-width intervals first and map results back.
    pub fn build(method: Method, pmf: &Pmf, cells: Option<usize>) -> Result<Self> {
        let cells = cells.unwrap_or(pmf.len());
        let kind = match method {
            Method::Linear => Kind::Linear(build_cdf(pmf)),
            Method::Binary => Kind::Binary(build_cdf(pmf)),
            Method::CutpointLinear => {
                let cdf = build_cdf(pmf);
                let gt = build_guide_table(&cdf, cells)?;
                Kind::CutpointLinear(cdf, gt)
            }
            Method::CutpointBinary => {
                let cdf = build_cdf(pmf);
                let gt = build_guide_table(&cdf, cells)?;
                Kind::CutpointBinary(cdf, gt)
            }
            Method::Alias => Kind::Alias(build_alias_table(pmf)?),
            Method::RadixForest | Method::RadixForestRaw => {
                let defaults = ForestOptions::default();
                let opts = if method == Method::RadixForest {
                    ForestOptions {
                        cells: Some(cells),
                        ..defaults
                    }
                } else {
                    ForestOptions {
                        cells: Some(cells),
                        rebalance_slack: None,
                        direct_single_interval_cells: false,
                        ..defaults
                    }
                };
                let cdf = build_cdf(pmf);
                if validate_strictly_increasing(&cdf) {
                    Kind::Forest(RadixForest::build(&cdf, opts)?, None)
                } else {
                    let (compacted, remap) = cdf.compact();
                    Kind::Forest(RadixForest::build(&compacted, opts)?, Some(remap))
                }
            }
        };
        Ok(Sampler { method, kind })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// The forest behind a forest method.
    pub fn forest(&self) -> Option<&RadixForest> {
        match &self.kind {
            Kind::Forest(f, _) => Some(f),
            _ => None,
        }
    }

    #[inline]
    pub fn sample(&self, xi: f64) -> usize {
        match &self.kind {
            Kind::Linear(c) => sample_linear(c, xi),
            Kind::Binary(c) => sample_binary(c, xi),
            Kind::CutpointLinear(c, gt) => sample_cutpoint_linear(gt, c, xi),
            Kind::CutpointBinary(c, gt) => sample_cutpoint_binary(gt, c, xi),
            Kind::Alias(a) => sample_alias(a, xi),
            Kind::Forest(f, remap) => {
                let i = f.sample(xi);
                remap.as_ref().map_or(i, |r| r.original(i))
            }
        }
    }

    #[inline]
    pub fn sample_counted(&self, xi: f64) -> (usize, u32) {
        match &self.kind {
            Kind::Linear(c) => sample_linear_counted(c, xi),
            Kind::Binary(c) => sample_binary_counted(c, xi),
            Kind::CutpointLinear(c, gt) => sample_cutpoint_linear_counted(gt, c, xi),
            Kind::CutpointBinary(c, gt) => sample_cutpoint_binary_counted(gt, c, xi),
            Kind::Alias(a) => (sample_alias(a, xi), 1),
            Kind::Forest(f, remap) => {
                let (i, loads) = f.sample_counted(xi);
                (remap.as_ref().map_or(i, |r| r.original(i)), loads)
            }
        }
    }

    /// Samples a batch, in order.
    pub fn sample_batch(&self, xis: &[f64], mode: BuildMode) -> Vec<usize> {
        map_collect(mode, xis, |&xi| self.sample(xi))
    }

    /// Load count of every sample in `xis`, in order.
    pub fn trace(&self, xis: &[f64], mode: BuildMode) -> LoadTrace {
        LoadTrace::new(map_collect(mode, xis, |&xi| self.sample_counted(xi).1))
    }
}
