//! Exhaustive scan kernels over index ranges.
//!
//! Every exhaustive check in the crate (ring axioms, derivation laws,
//! quasi-regularity scans, dense polynomial sweeps) funnels through these
//! functions. The sequential variants are always compiled; with the
//! `parallel` feature (default) the parallel variants run on rayon and
//! [`ScanMode::auto`] selects them. Witness searches use first-match
//! semantics in both modes, so results are deterministic.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl ScanMode {
    /// The default mode: parallel when the feature is enabled.
    pub fn auto() -> Self {
        #[cfg(feature = "parallel")]
        {
            ScanMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ScanMode::Sequential
        }
    }
}

/// First index in `0..n` satisfying `pred`, in index order.
pub fn find_index<F>(mode: ScanMode, n: usize, pred: F) -> Option<usize>
where
    F: Fn(usize) -> bool + Sync,
{
    match mode {
        ScanMode::Sequential => (0..n).find(|&i| pred(i)),
        #[cfg(feature = "parallel")]
        ScanMode::Parallel => (0..n).into_par_iter().find_first(|&i| pred(i)),
    }
}

/// First pair in row-major order satisfying `pred`.
pub fn find_pair<F>(mode: ScanMode, n: usize, pred: F) -> Option<(usize, usize)>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let row = |a: usize| (0..n).find(|&b| pred(a, b)).map(|b| (a, b));
    match mode {
        ScanMode::Sequential => (0..n).find_map(row),
        #[cfg(feature = "parallel")]
        ScanMode::Parallel => (0..n).into_par_iter().find_map_first(row),
    }
}

/// First triple in row-major order satisfying `pred`.
pub fn find_triple<F>(mode: ScanMode, n: usize, pred: F) -> Option<(usize, usize, usize)>
where
    F: Fn(usize, usize, usize) -> bool + Sync,
{
    let plane = |a: usize| {
        for b in 0..n {
            for c in 0..n {
                if pred(a, b, c) {
                    return Some((a, b, c));
                }
            }
        }
        None
    };
    match mode {
        ScanMode::Sequential => (0..n).find_map(plane),
        #[cfg(feature = "parallel")]
        ScanMode::Parallel => (0..n).into_par_iter().find_map_first(plane),
    }
}

/// Indices in `0..n` satisfying `pred`, in increasing order.
pub fn filter_indices<F>(mode: ScanMode, n: usize, pred: F) -> Vec<usize>
where
    F: Fn(usize) -> bool + Sync,
{
    match mode {
        ScanMode::Sequential => (0..n).filter(|&i| pred(i)).collect(),
        #[cfg(feature = "parallel")]
        ScanMode::Parallel => (0..n).into_par_iter().filter(|&i| pred(i)).collect(),
    }
}
