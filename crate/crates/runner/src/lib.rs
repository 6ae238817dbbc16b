//! Library surface of the lte-lab runner: configuration, pipeline
//! composition, single-stage commands and the invariant suites.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod report;
pub mod verify;

pub use config::{ConfigError, ModelHandle, ScenarioConfig};
pub use pipeline::{run_pipeline, write_outputs, PipelineOutcome};
pub use report::{PipelineRecord, PipelineReport};
