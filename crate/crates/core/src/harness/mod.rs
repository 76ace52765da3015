//! Scenario orchestration: configuration, the receding-horizon outer loop,
//! run logs, metrics and export.

mod config;
mod log;
mod oracle;
mod run;
pub mod scenarios;

pub use config::{AgentConfig, CollisionConfig, LinkDistance, PlantConfig, ScenarioConfig};
pub use log::{
    audit_constraints, consensus_time, export_csv, export_summary, min_pairwise_distance, read_csv, BoundViolation,
    CsvRow, RunLog, RunSummary, StepRecord, CSV_HEADER,
};
pub use oracle::{fit_log_slope, fit_oscillatory_rate, matched_game_weights, pair_oracle, PairOracle};
pub use run::run_scenario;
