//! Offline evaluation: accuracy, ranking, discovery, cold start, reports.
//!
//! The harness measures a scorer against held-out logs along four tasks:
//! rating accuracy (decide), preference-pair ranking (compare), Top-N
//! list quality over the full catalog (discover), and seeded list quality
//! (explore). Every task is also broken down over the user-activity ×
//! item-popularity segment grid. [`cold_start_experiment`] replays the
//! same accuracy measurement over growing user samples and shrunken
//! profiles, and [`EvaluationReport`] serializes results.

mod coldstart;
mod discovery;
mod metrics;
mod report;
mod scoring;

pub use coldstart::{
    cold_start_experiment, ColdStartMode, ColdStartPoint, ProfileRegime, COLD_START_SAMPLE_SALT,
};
pub use discovery::{evaluate_discovery, DiscoveryCell, DiscoveryEvaluation, DiscoveryStrategy};
pub use metrics::{
    impact_of, mae, ndpm, ndpm_counts, precision_from_counts, rmse, rmse_in_out, InOutAccuracy,
    NdpmStats, PairCounts, PrecisionStats,
};
pub use report::{headline_metric, EvaluationReport, Record, RunMeta};
pub use scoring::{evaluate_scoring, RankingBreakdown, ScoringEvaluation};
