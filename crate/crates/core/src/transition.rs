//! Sensor-to-sensor transitions and their daily per-pair summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use crate::error::{Error, Result};
use crate::event_model::{EventLog, SensorId};

/// Two consecutive events from different sensors.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub from_sensor: SensorId,
    pub to_sensor: SensorId,
    /// Seconds between the two events.
    pub duration: f64,
    /// Day of the later event.
    pub day: u32,
}

/// Unordered sensor pair, stored with the lexicographically smaller id first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    a: SensorId,
    b: SensorId,
}

impl PairKey {
    pub fn new(x: SensorId, y: SensorId) -> Self {
        if x <= y {
            PairKey { a: x, b: y }
        } else {
            PairKey { a: y, b: x }
        }
    }

    pub fn first(&self) -> &SensorId {
        &self.a
    }

    pub fn second(&self) -> &SensorId {
        &self.b
    }
}

impl fmt::Debug for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}, {}}}", self.a, self.b)
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}<->{}", self.a, self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    pub t_min: f64,
    /// May be `f64::INFINITY` to disable the upper bound.
    pub t_max: f64,
    pub percentile_k: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            t_min: 1.0,
            t_max: 60.0,
            percentile_k: 0.0,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_min >= 0.0) {
            return Err(Error::config(format!("t_min must be >= 0, got {}", self.t_min)));
        }
        if self.t_max.is_nan() || self.t_max <= self.t_min {
            return Err(Error::config(format!(
                "t_max ({}) must exceed t_min ({})",
                self.t_max, self.t_min
            )));
        }
        if !(0.0..=100.0).contains(&self.percentile_k) {
            return Err(Error::config(format!(
                "percentile must lie in [0, 100], got {}",
                self.percentile_k
            )));
        }
        Ok(())
    }

    pub fn accepts(&self, duration: f64) -> bool {
        self.t_min <= duration && duration <= self.t_max
    }
}

/// Emits one transition per adjacent pair of events with differing sensors.
///
/// A same-sensor pair emits nothing, but its later event stays the
/// predecessor of the next comparison.
pub fn extract_transitions(log: &EventLog) -> Vec<Transition> {
    log.events
        .windows(2)
        .filter(|w| w[0].sensor_id != w[1].sensor_id)
        .map(|w| Transition {
            from_sensor: w[0].sensor_id.clone(),
            to_sensor: w[1].sensor_id.clone(),
            duration: w[1].timestamp - w[0].timestamp,
            day: log.day_index(w[1].timestamp),
        })
        .collect()
}

/// Keeps transitions with `t_min <= duration <= t_max`, in order.
pub fn filter_transitions(ts: &[Transition], cfg: &FilterConfig) -> Vec<Transition> {
    ts.iter().filter(|t| cfg.accepts(t.duration)).cloned().collect()
}

/// Linear-interpolation percentile over the sorted values, `k` in `[0, 100]`.
///
/// `k = 0` yields the minimum and `k = 100` the maximum.
pub fn percentile(values: &[f64], k: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::EmptySample);
    }
    if !(0.0..=100.0).contains(&k) {
        return Err(Error::InvalidInput(format!("percentile {k} outside [0, 100]")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(percentile_sorted(&sorted, k))
}

fn percentile_sorted(sorted: &[f64], k: f64) -> f64 {
    let n = sorted.len();
    let rank = k / 100.0 * (n - 1) as f64;
    let lo = (rank.floor() as usize).min(n - 1);
    let frac = rank - lo as f64;
    if lo + 1 >= n || frac == 0.0 {
        return sorted[lo];
    }
    let (v_lo, v_hi) = (sorted[lo], sorted[lo + 1]);
    (v_lo + frac * (v_hi - v_lo)).clamp(v_lo, v_hi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DailyPairStat {
    pub pair: PairKey,
    pub day: u32,
    /// `None` exactly when `support == 0`.
    pub percentile_value: Option<f64>,
    pub support: usize,
}

/// Per-(pair, day) statistics in canonical pair-then-day order.
pub type DailyStats = BTreeMap<(PairKey, u32), DailyPairStat>;

/// Pools both directions of every pair per day and summarises the durations.
pub fn aggregate_daily(ts: &[Transition], cfg: &FilterConfig) -> DailyStats {
    let mut pooled: BTreeMap<(PairKey, u32), Vec<f64>> = BTreeMap::new();
    for t in ts {
        let key = PairKey::new(t.from_sensor.clone(), t.to_sensor.clone());
        pooled.entry((key, t.day)).or_default().push(t.duration);
    }
    pooled
        .into_iter()
        .map(|((pair, day), mut durations)| {
            durations.sort_by(f64::total_cmp);
            let stat = DailyPairStat {
                pair: pair.clone(),
                day,
                percentile_value: Some(percentile_sorted(&durations, cfg.percentile_k)),
                support: durations.len(),
            };
            ((pair, day), stat)
        })
        .collect()
}

/// Runs extraction, filtering and aggregation in one go.
pub fn daily_stats(log: &EventLog, cfg: &FilterConfig) -> Result<DailyStats> {
    cfg.validate()?;
    let all = extract_transitions(log);
    let kept = filter_transitions(&all, cfg);
    Ok(aggregate_daily(&kept, cfg))
}

pub fn write_daily_stats_csv<W: Write>(stats: &DailyStats, mut out: W) -> Result<()> {
    writeln!(out, "pair_a,pair_b,day,percentile_value,support")?;
    for stat in stats.values() {
        let value = stat
            .percentile_value
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{}",
            stat.pair.first(),
            stat.pair.second(),
            stat.day,
            value,
            stat.support
        )?;
    }
    Ok(())
}
