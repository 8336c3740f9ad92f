//! Data-parallel helpers. With the `parallel` feature these run on the rayon
//! pool; without it they run the same closures in order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution schedule for bulk work.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BuildMode {
    /// Fixed sequential schedule.
    Serial,
    /// Work-stealing over the current rayon pool (sequential without the
    /// `parallel` feature).
    #[default]
    Parallel,
}

pub(crate) fn for_each_index<F>(mode: BuildMode, len: usize, f: F)
where
    F: Fn(usize) + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        BuildMode::Parallel => (0..len).into_par_iter().for_each(f),
        _ => (0..len).for_each(f),
    }
}

/// Maps every element, preserving order.
pub(crate) fn map_collect<T, U, F>(mode: BuildMode, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        BuildMode::Parallel => items.par_iter().map(f).collect(),
        _ => items.iter().map(f).collect(),
    }
}
