//! Execution backends for the data-parallel loops.
//!
//! Work is cut into fixed-size chunks of an index range. Each chunk maps to a
//! partial result and the partials are combined with an associative reducer,
//! so serial and parallel runs produce the same answer whenever the reducer is
//! exact (integer counts, ordered collections).

use std::ops::Range;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Indices per chunk.
pub const CHUNK: u64 = 8192;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Serial,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl Default for Backend {
    fn default() -> Self {
        #[cfg(feature = "parallel")]
        {
            Backend::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            Backend::Serial
        }
    }
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Serial => "serial",
            #[cfg(feature = "parallel")]
            Backend::Parallel => "parallel",
        }
    }

    /// Maps every chunk of `0..n` and folds the partials with `reduce`.
    pub fn map_reduce<T, M, R>(self, n: u64, identity: T, map: M, reduce: R) -> T
    where
        T: Send + Clone + Sync,
        M: Fn(Range<u64>) -> T + Sync + Send,
        R: Fn(T, T) -> T + Sync + Send,
    {
        let chunks = n.div_ceil(CHUNK);
        let span = move |c: u64| c * CHUNK..((c + 1) * CHUNK).min(n);
        match self {
            Backend::Serial => (0..chunks).map(|c| map(span(c))).fold(identity, &reduce),
            #[cfg(feature = "parallel")]
            Backend::Parallel => (0..chunks)
                .into_par_iter()
                .map(|c| map(span(c)))
                .reduce(|| identity.clone(), &reduce),
        }
    }

    /// Evaluates `f` at every item, preserving order.
    pub fn map_collect<I, T, F>(self, items: &[I], f: F) -> Vec<T>
    where
        I: Sync,
        T: Send,
        F: Fn(&I) -> T + Sync + Send,
    {
        match self {
            Backend::Serial => items.iter().map(f).collect(),
            #[cfg(feature = "parallel")]
            Backend::Parallel => items.par_iter().map(f).collect(),
        }
    }
}
