//! Library side of the `litscan` command line tool: configuration
//! loading and pipeline orchestration, kept callable for integration
//! tests.

pub mod config;
pub mod pipeline;

pub use config::{ConfigError, Overrides, RunConfig};
pub use pipeline::{
    check_stage_requirements, configured_stages, emit_plot_data, load_corpus, run_pipeline,
    write_canonical, OutputEntry, PipelineError, PlotKind, RunReport, Stage,
};
