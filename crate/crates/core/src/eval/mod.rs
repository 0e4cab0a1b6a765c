//! Scoring of decision series and simulated experiments.

pub mod metrics;
pub mod sweep;

pub use metrics::{score, ConfusionCounts, EvalResult, ScoringMode};
pub use sweep::{run_sweep, SeedLabel, SweepMetrics, SweepRow, SweepSpec};

use crate::detector::{detect, DetectorConfig};
use crate::error::Result;
use crate::simulator::{simulate, FloorPlan, Scenario};
use crate::transition::FilterConfig;

/// Simulate, detect and score one scenario.
pub fn run_experiment(
    plan: &FloorPlan,
    scenario: &Scenario,
    filter_cfg: &FilterConfig,
    detector_cfg: &DetectorConfig,
    mode: ScoringMode,
) -> Result<EvalResult> {
    filter_cfg.validate()?;
    detector_cfg.validate()?;
    let (log, truth) = simulate(plan, scenario)?;
    let series = detect(&log, filter_cfg, detector_cfg)?;
    score(&series, &truth, mode)
}
