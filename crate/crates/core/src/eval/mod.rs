//! Confusion matrices, metrics, experiment runners and the combined 5x2cv
//! F-test.

pub mod cv;
pub mod ftest;
pub mod metrics;
pub mod report;
pub mod stats;

pub use cv::{evaluate_split, run_cross_domain, run_cv, CVResult, CrossDomainResult, Evaluation, MeanStd};
pub use ftest::{combined_5x2cv_f, ftest_5x2cv, FTestResult};
pub use metrics::{confusion, metrics, ClassMetrics, ConfusionMatrix, Metric, MetricsReport};
pub use report::{report_emit, Report, ReportFormat};
