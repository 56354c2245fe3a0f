//! Single-pass generation of approximate random walks from uniformly random
//! start vertices.

mod batch;
mod config;
mod instance;

pub use batch::{samples_with_reset, simulate_walks, simulate_walks_counted, walk_from_template, SamplerError};
pub use config::{ConfigError, Mode, SamplerConfig, DEFAULT_C, DEFAULT_D, DEFAULT_S_BUDGET};
pub use instance::{
    run_pass, run_pass_sharded, FailCause, Failure, SampleOutcome, SampleResult, StepRecord, Trace,
    WalkInstance,
};
