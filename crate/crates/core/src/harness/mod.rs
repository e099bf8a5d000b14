//! Experiment orchestration: parameter sweeps, tables and the sensor
//! network study. Every table is a list of serializable rows written as
//! CSV after a `# config-hash=…, seed=…, version=…` comment line.
//!
//! Trials are independent and run through [`crate::par::map_indexed`];
//! their seeds depend only on the master seed and the trial coordinates,
//! so sequential and parallel runs produce identical tables.

mod config;
mod output;
mod sweeps;
mod tables;
pub mod wsn;

pub use config::{
    config_hash, load_json, BasisKind, ConditionConfig, DominatingConfig, ExperimentConfig,
    RuntimeConfig, SamplerKind, SignalConfig, Sweep, WsnScenario,
};
pub use output::{linear_to_db, mean, median, Metadata, Table};
pub use sweeps::{
    known_support_on, probability_at, run_known_support, run_unknown_support, signal_seed,
    transition_m, trial_seed, unknown_support_on, KnownSupportRow, RecoveryRow,
};
pub use tables::{
    condition_table, dominating_curve, graph_label, runtime_benchmark, ConditionRow, DominatingRow,
    RuntimeRow,
};
pub use wsn::{wsn_experiment, WsnRow};
