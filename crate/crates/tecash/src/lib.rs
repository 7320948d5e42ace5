//! File formats, bulletin board storage, scenario harness, benchmarks and the
//! command line for [`tecash_core`].

pub mod artifact;
pub mod bench;
pub mod board;
pub mod cli;
pub mod error;
pub mod harness;
pub mod schemes;

pub use error::{Error, Result};
pub use tecash_core as core;
