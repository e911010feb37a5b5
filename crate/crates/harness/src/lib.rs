//! Dataset handling, synthetic workloads, experiments and reports for
//! `csprq-core`.

pub mod dataset;
pub mod experiment;
pub mod generate;
pub mod real;
pub mod report;

pub use dataset::{read_dataset, write_dataset, Dataset, DatasetError};
pub use experiment::{
    build_workspace, error_ranges, error_scene, measure_n_prime, measure_xi, query_ranges,
    run_experiment, ExperimentConfig, ExperimentResult, PdfKind, StrategyReport,
    WorkloadErrorReport,
};
pub use generate::{generate_synthetic, AreaShape, GenerateError, SyntheticConfig, SPACE};
pub use real::{filter_real, load_real, LoadReport, RealLoad, RealOptions};
