//! Daily binary classification metrics.

use std::fmt::Write as _;

use crate::detector::DriftSeries;
use crate::error::{Error, Result};
use crate::simulator::GroundTruth;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ConfusionCounts {
    pub tp: u32,
    pub tn: u32,
    pub fp: u32,
    pub fn_: u32,
}

impl ConfusionCounts {
    pub fn total(&self) -> u32 {
        self.tp + self.tn + self.fp + self.fn_
    }

    pub fn record(&mut self, predicted: bool, actual: bool) {
        match (predicted, actual) {
            (true, true) => self.tp += 1,
            (false, false) => self.tn += 1,
            (true, false) => self.fp += 1,
            (false, true) => self.fn_ += 1,
        }
    }

    pub fn accuracy(&self) -> f64 {
        ratio(self.tp + self.tn, self.total())
    }

    /// 0 when nothing was flagged.
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    /// 0 when no day is a drift day.
    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    /// Harmonic mean of precision and recall, written as
    /// `2tp / (2tp + fp + fn)`; 0 when there is no true positive.
    pub fn f1(&self) -> f64 {
        if self.tp == 0 {
            0.0
        } else {
            f64::from(2 * self.tp) / f64::from(2 * self.tp + self.fp + self.fn_)
        }
    }
}

fn ratio(num: u32, den: u32) -> f64 {
    if den == 0 {
        0.0
    } else {
        f64::from(num) / f64::from(den)
    }
}

/// How days without a detector decision are scored.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ScoringMode {
    /// Only days with a decision count.
    #[default]
    DecidedOnly,
    /// Every labelled day counts; undecided days are predicted negative.
    WarmupAsNegative,
}

impl ScoringMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ScoringMode::DecidedOnly => "decided",
            ScoringMode::WarmupAsNegative => "warmup-negative",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "decided" | "decided-only" => Some(ScoringMode::DecidedOnly),
            "warmup-negative" | "warmup" => Some(ScoringMode::WarmupAsNegative),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalResult {
    pub counts: ConfusionCounts,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Days from onset to the first alert on or after it.
    pub detection_delay: Option<u32>,
}

impl EvalResult {
    pub fn from_counts(counts: ConfusionCounts, detection_delay: Option<u32>) -> Self {
        EvalResult {
            counts,
            accuracy: counts.accuracy(),
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            detection_delay,
        }
    }

    /// `key=value` lines; an absent delay is printed as `none`.
    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let c = &self.counts;
        let delay = self.detection_delay.map_or_else(|| "none".to_string(), |d| d.to_string());
        for (k, v) in [
            ("accuracy", self.accuracy.to_string()),
            ("precision", self.precision.to_string()),
            ("recall", self.recall.to_string()),
            ("f1", self.f1.to_string()),
            ("detection_delay", delay),
            ("tp", c.tp.to_string()),
            ("tn", c.tn.to_string()),
            ("fp", c.fp.to_string()),
            ("fn", c.fn_.to_string()),
        ] {
            let _ = writeln!(s, "{k}={v}");
        }
        s
    }

    pub const CSV_HEADER: &'static str = "accuracy,precision,recall,f1,detection_delay,tp,tn,fp,fn";

    pub fn to_csv_row(&self) -> String {
        let c = &self.counts;
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.accuracy,
            self.precision,
            self.recall,
            self.f1,
            self.detection_delay.map(|d| d.to_string()).unwrap_or_default(),
            c.tp,
            c.tn,
            c.fp,
            c.fn_
        )
    }
}

/// Scores a decision series against per-day labels.
pub fn score(series: &DriftSeries, truth: &GroundTruth, mode: ScoringMode) -> Result<EvalResult> {
    let mut counts = ConfusionCounts::default();
    for d in &series.days {
        let actual = truth.label(d.day).ok_or(Error::DayMismatch(d.day))?;
        if mode == ScoringMode::DecidedOnly {
            counts.record(d.decision, actual);
        }
    }
    if mode == ScoringMode::WarmupAsNegative {
        for (i, &actual) in truth.labels.iter().enumerate() {
            let predicted = series.get(i as u32 + 1).is_some_and(|d| d.decision);
            counts.record(predicted, actual);
        }
    }
    let onset = truth.onset_day;
    let detection_delay = series
        .days
        .iter()
        .find(|d| d.day >= onset && d.decision)
        .map(|d| d.day - onset);
    Ok(EvalResult::from_counts(counts, detection_delay))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DayDecision;

    fn series(first: u32, decisions: &[bool]) -> DriftSeries {
        DriftSeries {
            days: decisions
                .iter()
                .enumerate()
                .map(|(i, &decision)| DayDecision {
                    day: first + i as u32,
                    score: f64::from(u8::from(decision)),
                    decision,
                    verdicts: Vec::new(),
                })
                .collect(),
        }
    }

    #[test]
    fn hand_computed_confusion() {
        let c = ConfusionCounts { tp: 2, fp: 1, fn_: 2, tn: 5 };
        assert_eq!(c.precision(), 2.0 / 3.0);
        assert_eq!(c.recall(), 0.5);
        assert_eq!(c.f1(), 4.0 / 7.0);
        assert_eq!(c.accuracy(), 0.7);
    }

    #[test]
    fn zero_denominators() {
        let c = ConfusionCounts { tn: 4, ..Default::default() };
        assert_eq!((c.precision(), c.recall(), c.f1(), c.accuracy()), (0.0, 0.0, 0.0, 1.0));
        assert_eq!(ConfusionCounts::default().accuracy(), 0.0);
    }

    #[test]
    fn perfect_detector() {
        let truth = GroundTruth::from_onset(16, 20);
        let s = series(14, &[false, false, true, true, true, true, true]);
        let r = score(&s, &truth, ScoringMode::DecidedOnly).unwrap();
        assert_eq!((r.accuracy, r.precision, r.recall, r.f1), (1.0, 1.0, 1.0, 1.0));
        assert_eq!(r.detection_delay, Some(0));
        assert_eq!(r.counts.total(), 7);
    }

    #[test]
    fn delay_ignores_pre_onset_alerts() {
        let truth = GroundTruth::from_onset(100, 110);
        let mut d = vec![false; 97];
        d[0] = true; // day 14
        d[89] = true; // day 103
        let r = score(&series(14, &d), &truth, ScoringMode::DecidedOnly).unwrap();
        assert_eq!(r.detection_delay, Some(3));
        assert_eq!(r.counts.fp, 1);
        let quiet = score(&series(14, &[false; 97]), &truth, ScoringMode::DecidedOnly).unwrap();
        assert_eq!(quiet.detection_delay, None);
    }

    #[test]
    fn warmup_days_count_as_negative() {
        let truth = GroundTruth::from_onset(3, 6);
        let s = series(4, &[true, true, false]);
        let decided = score(&s, &truth, ScoringMode::DecidedOnly).unwrap();
        assert_eq!(decided.counts, ConfusionCounts { tp: 2, fn_: 1, ..Default::default() });
        let warm = score(&s, &truth, ScoringMode::WarmupAsNegative).unwrap();
        assert_eq!(warm.counts, ConfusionCounts { tp: 2, tn: 2, fn_: 2, fp: 0 });
        assert_eq!(decided.detection_delay, Some(1));
    }

    #[test]
    fn days_beyond_truth_are_rejected() {
        let truth = GroundTruth::from_onset(3, 4);
        let err = score(&series(4, &[true, true]), &truth, ScoringMode::DecidedOnly).unwrap_err();
        assert!(matches!(err, Error::DayMismatch(5)));
        assert!(score(&series(4, &[true, true]), &truth, ScoringMode::WarmupAsNegative).is_err());
    }

    #[test]
    fn key_values_render() {
        let r = EvalResult::from_counts(ConfusionCounts { tp: 1, tn: 1, fp: 0, fn_: 0 }, None);
        let kv = r.to_key_values();
        assert!(kv.contains("f1=1\n"));
        assert!(kv.contains("detection_delay=none\n"));
    }
}
