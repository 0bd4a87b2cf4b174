pub mod counterexamples;
pub mod embedder;
pub mod error;
pub mod gadget;
pub mod geometry;
pub mod io;
pub mod line;
pub mod metric;
pub mod reductions;
pub mod rng;
pub mod svg;
pub mod topology;

pub use error::{Error, Result};
