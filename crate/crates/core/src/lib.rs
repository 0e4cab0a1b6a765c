//! Gait speed drift detection from ambient sensor event streams.
//!
//! Event logs are reduced to daily statistics of transition durations
//! between pairs of sensors. A sliding-window Mann-Whitney U test per pair
//! feeds an ensemble vote that flags days on which the resident's walking
//! pace differs from an early reference period. No floor-plan knowledge is
//! needed. A small smart-home simulator and an evaluation harness are
//! included for experiments.

pub mod detector;
pub mod error;
pub mod eval;
pub mod event_model;
pub mod rank_stats;
pub mod simulator;
pub mod transition;

pub use detector::{detect, detect_from_stats, DayDecision, DetectorConfig, DriftSeries, PairVerdict, Weighting};
pub use error::{Error, Result};
pub use eval::{run_experiment, run_sweep, score, EvalResult, ScoringMode, SweepSpec};
pub use event_model::{load_event_log, EventLog, LoadOptions, SensorEvent, SensorId, Status};
pub use rank_stats::{mann_whitney_u, Alternative, Method, MwuResult};
pub use simulator::{simulate, FloorPlan, GroundTruth, Scenario};
pub use transition::{daily_stats, extract_transitions, filter_transitions, FilterConfig, PairKey, Transition};
