//! End-to-end runs: graph, reduction, embedding, k-means, lift-back,
//! accuracy. Also the ratio sweep and the coarsening-time scaling probe.

mod bench;
mod config;
mod run;

use thiserror::Error;

use crate::dataio::DataError;

pub use bench::{
    bench_sweep, scaling_probe, write_bench_csv, write_scaling_csv, BenchRow, ScaleFamily,
    ScaleRow, BENCH_HEADER,
};
pub use config::{DataSource, EigenSelection, KnnParams, Mode, RunConfig, Solver};
pub use run::{
    prepare_graph, run_on_dataset, run_pipeline, run_with_graph, EvalReport, LevelStat,
    PreparedGraph, StageTimes,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(#[from] DataError),
    #[error("{stage} stage failed: {message}")]
    Stage {
        stage: &'static str,
        message: String,
    },
}

impl PipelineError {
    pub(crate) fn stage(stage: &'static str, e: impl std::fmt::Display) -> Self {
        Self::Stage {
            stage,
            message: e.to_string(),
        }
    }

    /// 2 for configuration problems, 3 for anything the data caused.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Data(_) | Self::Stage { .. } => 3,
        }
    }
}
