//! Parameter grids over simulated experiments.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use super::metrics::{score, EvalResult, ScoringMode};
use crate::detector::{detect_from_stats, DetectorConfig, Weighting};
use crate::error::{Error, Result};
use crate::simulator::{FloorPlan, Scenario, Simulator};
use crate::transition::{daily_stats, FilterConfig};

pub const CSV_HEADER: &str = "layout,baseline_speed,drifted_speed,percentile_k,t_min,t_max,min_support,weighting,seed,accuracy,precision,recall,f1,detection_delay";

#[derive(Clone, Debug, PartialEq)]
pub struct SweepSpec {
    /// Built-in layout names or layout file paths.
    pub layouts: Vec<String>,
    /// `(baseline, drifted)` speeds in m/s.
    pub speed_pairs: Vec<(f64, f64)>,
    pub seeds: Vec<u64>,
    pub percentile_k: Vec<f64>,
    pub t_min: Vec<f64>,
    pub t_max: Vec<f64>,
    pub min_support: Vec<usize>,
    pub weighting: Vec<Weighting>,
    /// Everything not swept; speeds and seed are overwritten per run.
    pub scenario: Scenario,
    /// Window length, alpha and threshold for every run.
    pub detector: DetectorConfig,
    pub mode: ScoringMode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        let filter = FilterConfig::default();
        let detector = DetectorConfig::default();
        SweepSpec {
            layouts: vec!["A".into()],
            speed_pairs: vec![(1.2, 0.4)],
            seeds: (0..10).collect(),
            percentile_k: vec![filter.percentile_k],
            t_min: vec![filter.t_min],
            t_max: vec![filter.t_max],
            min_support: vec![detector.min_support],
            weighting: vec![detector.weighting],
            scenario: Scenario::default(),
            detector,
            mode: ScoringMode::default(),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let sizes = [
            ("layouts", self.layouts.len()),
            ("speed pairs", self.speed_pairs.len()),
            ("seeds", self.seeds.len()),
            ("percentiles", self.percentile_k.len()),
            ("t_min values", self.t_min.len()),
            ("t_max values", self.t_max.len()),
            ("min_support values", self.min_support.len()),
            ("weightings", self.weighting.len()),
        ];
        if let Some((name, _)) = sizes.iter().find(|(_, n)| *n == 0) {
            return Err(Error::config(format!("sweep grid has no {name}")));
        }
        Ok(())
    }

    /// Result rows excluding aggregates.
    pub fn num_runs(&self) -> usize {
        self.grid_points() * self.seeds.len()
    }

    pub fn grid_points(&self) -> usize {
        self.layouts.len()
            * self.speed_pairs.len()
            * self.percentile_k.len()
            * self.t_min.len()
            * self.t_max.len()
            * self.min_support.len()
            * self.weighting.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeedLabel {
    Seed(u64),
    Mean,
    Std,
}

impl fmt::Display for SeedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedLabel::Seed(s) => write!(f, "{s}"),
            SeedLabel::Mean => f.write_str("MEAN"),
            SeedLabel::Std => f.write_str("STD"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub detection_delay: Option<f64>,
}

impl From<&EvalResult> for SweepMetrics {
    fn from(r: &EvalResult) -> Self {
        SweepMetrics {
            accuracy: r.accuracy,
            precision: r.precision,
            recall: r.recall,
            f1: r.f1,
            detection_delay: r.detection_delay.map(f64::from),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub layout: String,
    pub baseline_speed: f64,
    pub drifted_speed: f64,
    pub percentile_k: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub min_support: usize,
    pub weighting: Weighting,
    pub seed: SeedLabel,
    /// Absent when the run failed or, for aggregates, no run succeeded.
    pub metrics: Option<SweepMetrics>,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn to_csv_row(&self) -> String {
        let metrics = match &self.metrics {
            Some(m) => format!(
                "{},{},{},{},{}",
                m.accuracy,
                m.precision,
                m.recall,
                m.f1,
                m.detection_delay.map(|d| d.to_string()).unwrap_or_default()
            ),
            None => ",,,,".to_string(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            self.layout,
            self.baseline_speed,
            self.drifted_speed,
            self.percentile_k,
            self.t_min,
            self.t_max,
            self.min_support,
            self.weighting.as_str(),
            self.seed,
            metrics
        )
    }
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{}", r.to_csv_row())?;
    }
    Ok(())
}

/// Indices into the spec lists: layout, speeds, k, t_min, t_max, S_min, weighting.
type GridKey = [usize; 7];

type Outcome = std::result::Result<SweepMetrics, String>;

fn run_unit(spec: &SweepSpec, plan: &std::result::Result<FloorPlan, String>, layout: usize, speeds: usize, seed: usize) -> Vec<(GridKey, Outcome)> {
    let mut keys = Vec::new();
    for k in 0..spec.percentile_k.len() {
        for lo in 0..spec.t_min.len() {
            for hi in 0..spec.t_max.len() {
                for s in 0..spec.min_support.len() {
                    for w in 0..spec.weighting.len() {
                        keys.push([layout, speeds, k, lo, hi, s, w]);
                    }
                }
            }
        }
    }
    let fail_all = |msg: String| keys.iter().map(|&key| (key, Err(msg.clone()))).collect();

    let plan = match plan {
        Ok(p) => p,
        Err(e) => return fail_all(e.clone()),
    };
    let (baseline, drifted) = spec.speed_pairs[speeds];
    let scenario = Scenario {
        baseline_speed: baseline,
        drifted_speed: drifted,
        seed: spec.seeds[seed],
        ..spec.scenario.clone()
    };
    let simulated = scenario.validate().and_then(|_| {
        Simulator::new(plan.clone(), scenario.sensor_model(), scenario.spot_jitter)?.simulate(&scenario)
    });
    let (log, truth) = match simulated {
        Ok(v) => v,
        Err(e) => return fail_all(e.to_string()),
    };
    let last_day = log.last_day().unwrap_or(0);

    let mut out = Vec::with_capacity(keys.len());
    let mut stats_for: Option<([usize; 3], Result<_>)> = None;
    for key in keys {
        let filter_key = [key[2], key[3], key[4]];
        if stats_for.as_ref().is_none_or(|(k, _)| *k != filter_key) {
            let filter = FilterConfig {
                percentile_k: spec.percentile_k[key[2]],
                t_min: spec.t_min[key[3]],
                t_max: spec.t_max[key[4]],
            };
            stats_for = Some((filter_key, filter.validate().and_then(|_| daily_stats(&log, &filter))));
        }
        let stats = &stats_for.as_ref().unwrap().1;
        let detector = DetectorConfig {
            min_support: spec.min_support[key[5]],
            weighting: spec.weighting[key[6]],
            ..spec.detector
        };
        let outcome = match stats {
            Ok(stats) => detect_from_stats(stats, last_day, &detector)
                .and_then(|series| score(&series, &truth, spec.mode))
                .map(|r| SweepMetrics::from(&r))
                .map_err(|e| e.to_string()),
            Err(e) => Err(e.to_string()),
        };
        out.push((key, outcome));
    }
    out
}

fn mean_std(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = if values.len() < 2 {
        0.0
    } else {
        (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Some((mean, std))
}

/// Mean and sample standard deviation rows over successful runs.
pub fn aggregate(runs: &[SweepMetrics]) -> (Option<SweepMetrics>, Option<SweepMetrics>) {
    let column = |f: fn(&SweepMetrics) -> Option<f64>| -> Option<(f64, f64)> {
        mean_std(&runs.iter().filter_map(f).collect::<Vec<_>>())
    };
    let (Some(acc), Some(prec), Some(rec), Some(f1)) = (
        column(|m| Some(m.accuracy)),
        column(|m| Some(m.precision)),
        column(|m| Some(m.recall)),
        column(|m| Some(m.f1)),
    ) else {
        return (None, None);
    };
    let delay = column(|m| m.detection_delay);
    let mean = SweepMetrics {
        accuracy: acc.0,
        precision: prec.0,
        recall: rec.0,
        f1: f1.0,
        detection_delay: delay.map(|d| d.0),
    };
    let std = SweepMetrics {
        accuracy: acc.1,
        precision: prec.1,
        recall: rec.1,
        f1: f1.1,
        detection_delay: delay.map(|d| d.1),
    };
    (Some(mean), Some(std))
}

/// Runs every grid point for every seed.
///
/// Each (layout, speeds, seed) is simulated once and shared by all
/// detector settings. Work runs on the current rayon pool; rows come back
/// sorted by grid point in spec order, seeds in spec order, each grid point
/// followed by its `MEAN` and `STD` rows.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.validate()?;
    let plans: Vec<std::result::Result<FloorPlan, String>> = spec
        .layouts
        .iter()
        .map(|l| FloorPlan::resolve(l).map_err(|e| e.to_string()))
        .collect();
    let mut units = Vec::new();
    for layout in 0..spec.layouts.len() {
        for speeds in 0..spec.speed_pairs.len() {
            for seed in 0..spec.seeds.len() {
                units.push((layout, speeds, seed));
            }
        }
    }
    let results: Vec<(usize, Vec<(GridKey, Outcome)>)> = units
        .par_iter()
        .map(|&(l, s, seed)| (seed, run_unit(spec, &plans[l], l, s, seed)))
        .collect();

    let mut grid: BTreeMap<GridKey, Vec<Option<Outcome>>> = BTreeMap::new();
    for (seed, outcomes) in results {
        for (key, outcome) in outcomes {
            let slots = grid.entry(key).or_insert_with(|| vec![None; spec.seeds.len()]);
            slots[seed] = Some(outcome);
        }
    }

    let mut rows = Vec::with_capacity(spec.num_runs() + 2 * spec.grid_points());
    for (key, outcomes) in grid {
        let (baseline, drifted) = spec.speed_pairs[key[1]];
        let row = |seed: SeedLabel, metrics: Option<SweepMetrics>, error: Option<String>| SweepRow {
            layout: spec.layouts[key[0]].clone(),
            baseline_speed: baseline,
            drifted_speed: drifted,
            percentile_k: spec.percentile_k[key[2]],
            t_min: spec.t_min[key[3]],
            t_max: spec.t_max[key[4]],
            min_support: spec.min_support[key[5]],
            weighting: spec.weighting[key[6]],
            seed,
            metrics,
            error,
        };
        let mut ok = Vec::new();
        for (i, outcome) in outcomes.into_iter().enumerate() {
            let outcome = outcome.expect("every unit reports every grid point");
            let label = SeedLabel::Seed(spec.seeds[i]);
            match outcome {
                Ok(m) => {
                    ok.push(m);
                    rows.push(row(label, Some(m), None));
                }
                Err(e) => {
                    log::warn!("sweep run failed ({} seed {}): {e}", spec.layouts[key[0]], spec.seeds[i]);
                    rows.push(row(label, None, Some(e)));
                }
            }
        }
        let (mean, std) = aggregate(&ok);
        rows.push(row(SeedLabel::Mean, mean, None));
        rows.push(row(SeedLabel::Std, std, None));
    }
    Ok(rows)
}
