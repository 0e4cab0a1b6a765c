//! Windowed per-pair rank tests and the daily ensemble decision.
//!
//! For every day `γ ≥ 2π` each sensor pair compares its daily percentile
//! values over the query window (days `γ-π+1..=γ`) against the fixed
//! reference window (days `1..=π`). Per-pair flags are then averaged, either
//! plainly or weighted by each pair's support on day `γ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::event_model::EventLog;
use crate::rank_stats::{mann_whitney_u, Alternative};
use crate::transition::{daily_stats, DailyStats, FilterConfig, PairKey};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Weighting {
    #[default]
    Unweighted,
    SupportWeighted,
}

impl Weighting {
    pub fn as_str(self) -> &'static str {
        match self {
            Weighting::Unweighted => "unweighted",
            Weighting::SupportWeighted => "weighted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unweighted" | "none" => Some(Weighting::Unweighted),
            "weighted" | "support" | "support_weighted" | "support-weighted" => {
                Some(Weighting::SupportWeighted)
            }
            _ => None,
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    /// Window length π in days.
    pub window_len: u32,
    pub alpha: f64,
    /// A day enters a window only when its support exceeds this.
    pub min_support: usize,
    pub weighting: Weighting,
    pub decision_threshold: f64,
    pub alternative: Alternative,
}

impl Default for DetectorConfig {
    fn default() -> Self {
        DetectorConfig {
            window_len: 7,
            alpha: 0.05,
            min_support: 0,
            weighting: Weighting::Unweighted,
            decision_threshold: 0.5,
            alternative: Alternative::TwoSided,
        }
    }
}

impl DetectorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.window_len < 2 {
            return Err(Error::config(format!(
                "window length must be at least 2 days, got {}",
                self.window_len
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        if !(self.decision_threshold > 0.0 && self.decision_threshold <= 1.0) {
            return Err(Error::config(format!(
                "decision threshold must lie in (0, 1], got {}",
                self.decision_threshold
            )));
        }
        Ok(())
    }

    /// First day on which the query window no longer overlaps the reference.
    pub fn first_decided_day(&self) -> u32 {
        2 * self.window_len
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairVerdict {
    pub pair: PairKey,
    pub day: u32,
    pub flag: bool,
    pub p_value: Option<f64>,
    /// Share of this pair in the day's total support.
    pub weight: f64,
    /// False when either window held fewer than two values.
    pub tested: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DayDecision {
    pub day: u32,
    pub score: f64,
    pub decision: bool,
    pub verdicts: Vec<PairVerdict>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DriftSeries {
    pub days: Vec<DayDecision>,
}

impl DriftSeries {
    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn get(&self, day: u32) -> Option<&DayDecision> {
        self.days
            .binary_search_by_key(&day, |d| d.day)
            .ok()
            .map(|i| &self.days[i])
    }

    pub fn write_decisions_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "day,score,decision")?;
        for d in &self.days {
            writeln!(out, "{},{},{}", d.day, d.score, u8::from(d.decision))?;
        }
        Ok(())
    }

    pub fn write_diagnostics_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "day,pair_a,pair_b,p_value,flag,weight,tested")?;
        for d in &self.days {
            for v in &d.verdicts {
                let p = v.p_value.map(|p| p.to_string()).unwrap_or_default();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    v.day,
                    v.pair.first(),
                    v.pair.second(),
                    p,
                    u8::from(v.flag),
                    v.weight,
                    u8::from(v.tested)
                )?;
            }
        }
        Ok(())
    }

    /// Reads a `day,score,decision` file; per-pair verdicts are not restored.
    pub fn read_decisions_csv<R: BufRead>(source: R) -> Result<Self> {
        let mut days: Vec<DayDecision> = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.trim().split(',').collect();
            if fields.len() != 3 {
                return Err(Error::parse(line_no, "expected `day,score,decision`"));
            }
            let day: u32 = fields[0]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad day `{}`", fields[0])))?;
            let score: f64 = fields[1]
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad score `{}`", fields[1])))?;
            let decision = match fields[2] {
                "0" => false,
                "1" => true,
                other => return Err(Error::parse(line_no, format!("bad decision `{other}`"))),
            };
            if days.last().is_some_and(|d| d.day >= day) {
                return Err(Error::parse(line_no, "days must be strictly increasing"));
            }
            days.push(DayDecision {
                day,
                score,
                decision,
                verdicts: Vec::new(),
            });
        }
        Ok(DriftSeries { days })
    }
}

fn window_values(stats: &DailyStats, pair: &PairKey, days: std::ops::RangeInclusive<u32>, min_support: usize) -> Vec<f64> {
    days.filter_map(|day| stats.get(&(pair.clone(), day)))
        .filter(|s| s.support > min_support)
        .filter_map(|s| s.percentile_value)
        .collect()
}

/// Query and reference values for `pair` as seen on `day`.
pub fn build_windows(stats: &DailyStats, pair: &PairKey, day: u32, cfg: &DetectorConfig) -> (Vec<f64>, Vec<f64>) {
    let pi = cfg.window_len;
    debug_assert!(day >= 2 * pi);
    let query = window_values(stats, pair, (day + 1 - pi)..=day, cfg.min_support);
    let reference = window_values(stats, pair, 1..=pi, cfg.min_support);
    (query, reference)
}

/// Tests one pair; windows with fewer than two values default to no drift.
pub fn pair_verdict(query: &[f64], reference: &[f64], day: u32, pair: PairKey, cfg: &DetectorConfig) -> Result<PairVerdict> {
    if query.len().min(reference.len()) < 2 {
        return Ok(PairVerdict {
            pair,
            day,
            flag: false,
            p_value: None,
            weight: 0.0,
            tested: false,
        });
    }
    let result = mann_whitney_u(query, reference, cfg.alternative)?;
    Ok(PairVerdict {
        pair,
        day,
        flag: result.p_value < cfg.alpha,
        p_value: Some(result.p_value),
        weight: 0.0,
        tested: true,
    })
}

/// Fills in support weights and returns the ensemble score and decision.
///
/// Verdicts are expected in canonical pair order so the weight sums are
/// reproducible bit for bit.
pub fn ensemble_decision(
    verdicts: &mut [PairVerdict],
    last_day_supports: &BTreeMap<PairKey, usize>,
    cfg: &DetectorConfig,
) -> (f64, bool) {
    let support_of = |pair: &PairKey| last_day_supports.get(pair).copied().unwrap_or(0);
    let total: usize = verdicts.iter().map(|v| support_of(&v.pair)).sum();
    for v in verdicts.iter_mut() {
        v.weight = if total > 0 {
            support_of(&v.pair) as f64 / total as f64
        } else {
            0.0
        };
    }
    let score = match cfg.weighting {
        Weighting::SupportWeighted => verdicts
            .iter()
            .filter(|v| v.flag)
            .map(|v| v.weight)
            .sum::<f64>()
            .min(1.0),
        Weighting::Unweighted => {
            let tested = verdicts.iter().filter(|v| v.tested).count();
            if tested == 0 {
                0.0
            } else {
                verdicts.iter().filter(|v| v.flag).count() as f64 / tested as f64
            }
        }
    };
    (score, score >= cfg.decision_threshold)
}

/// Decision series from precomputed daily statistics, for days
/// `2π..=last_day`.
pub fn detect_from_stats(stats: &DailyStats, last_day: u32, cfg: &DetectorConfig) -> Result<DriftSeries> {
    cfg.validate()?;
    let pi = cfg.window_len;
    let mut observed: BTreeMap<PairKey, BTreeSet<u32>> = BTreeMap::new();
    for (pair, day) in stats.keys() {
        observed.entry(pair.clone()).or_default().insert(*day);
    }

    let mut days = Vec::new();
    for day in cfg.first_decided_day()..=last_day {
        let query_days = (day + 1 - pi)..=day;
        let mut verdicts = Vec::new();
        let mut supports = BTreeMap::new();
        for (pair, seen) in &observed {
            let in_reference = seen.range(1..=pi).next().is_some();
            let in_query = seen.range(query_days.clone()).next().is_some();
            if !in_reference && !in_query {
                continue;
            }
            if let Some(stat) = stats.get(&(pair.clone(), day)) {
                supports.insert(pair.clone(), stat.support);
            }
            let (query, reference) = build_windows(stats, pair, day, cfg);
            verdicts.push(pair_verdict(&query, &reference, day, pair.clone(), cfg)?);
        }
        let (score, decision) = ensemble_decision(&mut verdicts, &supports, cfg);
        days.push(DayDecision {
            day,
            score,
            decision,
            verdicts,
        });
    }
    Ok(DriftSeries { days })
}

/// Full pipeline: transitions, filtering, daily statistics, windowed tests.
pub fn detect(log: &EventLog, filter_cfg: &FilterConfig, cfg: &DetectorConfig) -> Result<DriftSeries> {
    filter_cfg.validate()?;
    cfg.validate()?;
    let Some(last_day) = log.last_day() else {
        return Ok(DriftSeries::default());
    };
    let stats = daily_stats(log, filter_cfg)?;
    detect_from_stats(&stats, last_day, cfg)
}
