//! Configuration, pipeline orchestration, JSON reports and CSV field dumps
//! on top of `gaplab-core`.

pub mod config;
pub mod error;
pub mod fields;
pub mod pipeline;
pub mod report;
pub mod tabulated;

pub use config::RunConfig;
pub use error::{GaplabError, Result};
pub use pipeline::{run_pipeline, Run};
