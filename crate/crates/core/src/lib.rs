//! Analytics for password datasets and password guessers: streaming multiset
//! ingestion, structural feature distributions, exact multiset similarity
//! (including against salted-and-hashed targets), the Identity guesser,
//! grid success statistics, and combination-attack evaluation.
//!
//! Data-parallel kernels run on rayon when the default `parallel` feature is
//! enabled; disabling it selects the sequential fallbacks. Every operation is
//! deterministic at any worker count: parallel reductions accumulate exact
//! integers (counts, tallies, minimum indices) and divide once at the end.

pub mod combo;
pub mod corpus;
pub mod error;
pub mod features;
pub mod guessers;
pub mod hashed;
pub mod metrics;
pub mod stats;

pub use error::{Error, Result};

/// Cap the worker pool used by the parallel kernels. Call once, before any
/// parallel work; later calls report an error from the pool builder. A no-op
/// without the `parallel` feature.
pub fn configure_threads(workers: usize) -> Result<()> {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(())
    }
}
