//! Inverse-CDF sampling of discrete and piecewise constant distributions.
//!
//! The centerpiece is [`RadixForest`]: a guide table whose cells each hold a
//! radix tree over the interval bounds falling into them, built bottom-up with
//! one worker per interval. Lookups are monotone in `ξ`, so the stratification
//! of low-discrepancy input points survives the mapping. Linear search, binary
//! search, the cutpoint method and the alias method are provided alongside for
//! comparison, all instrumented to count memory loads.

pub mod baseline;
pub mod distribution;
mod error;
pub mod experiment;
pub mod families;
pub mod forest;
pub mod image;
pub mod metrics;
mod par;
pub mod sampler;
pub mod sampler2d;
pub mod sequences;

pub use distribution::{build_cdf, build_cdf_with, compact, Cdf, Histogram, IndexRemap, Pmf, Precision};
pub use error::{Error, Result};
pub use forest::{build_forest, build_tree, ForestOptions, NodeRef, RadixForest};
pub use par::BuildMode;
pub use families::Family;
pub use sampler::{Method, Sampler};
pub use sampler2d::{AliasSampler2D, Density2D, Options2D, Sample2D, Sampler2D};
