//! End-to-end pipelines, model persistence, and the benchmark harness.

pub mod bench;
pub mod persist;
pub mod pipeline;

pub use bench::{run_benchmark, write_csv, write_json, BenchConfig, BenchRow, BenchmarkReport};
pub use persist::{load_model, save_model, PersistError};
pub use pipeline::{
    evaluate, fit_pipeline, oracle_eval, select_scale, Evaluation, PipelineModel,
};
