//! Evaluation: ground-truth matching, precision/recall/F1, output stability
//! across repeated runs, and cost and latency accounting.

mod cost;
mod matching;
mod metrics;
mod similarity;

pub use cost::{estimate_cost, measure_latency, summarize_latency, CostModel, LatencySummary};
pub use matching::{
    is_match, match_findings, parse_ground_truth, GroundTruthEntry, MatchResult, Prediction, SchemaError,
    LINE_TOLERANCE,
};
pub use metrics::{compute_metrics, MetricsSummary};
pub use similarity::{
    error_lines, lcs_len, similarity_ratio, stability_report, stability_study, StabilityReport, TooFewRuns,
};
