//! File formats, JSON reports, batch experiments and the `sgfp` command-line
//! tool built on [`sgfp_core`].

pub mod experiments;
pub mod ingest;
pub mod report;

pub use sgfp_core;
