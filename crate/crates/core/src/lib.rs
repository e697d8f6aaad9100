pub mod baselines;
pub mod distance;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod label;
pub mod mismatch;
pub mod pipeline;
pub mod seed;
pub mod segment;
pub mod symbolize;
pub mod synth;

pub use error::{Error, Result};
pub use label::{ClassLabel, SubjectDay};
