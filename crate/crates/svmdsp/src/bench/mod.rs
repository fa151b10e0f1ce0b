//! Synthetic experiment harness: seeded generators, reference estimators,
//! metrics, and the desk-scale experiment runners.

pub mod baselines;
pub mod experiments;
pub mod generators;
pub mod metrics;

pub use experiments::{run_experiment, write_report_csv, ExperimentConfig, ExperimentId};
pub use metrics::MetricsReport;
