//! Strategies, property checks and independent oracles shared by the
//! property suite and the acceptance gate.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use gaitdrift::detector::{detect, detect_from_stats, DetectorConfig, Weighting};
use gaitdrift::event_model::{day_index, load_event_log, EventLog, LoadOptions, SensorEvent, Status};
use gaitdrift::rank_stats::{mann_whitney_u, Alternative};
use gaitdrift::transition::{
    aggregate_daily, extract_transitions, filter_transitions, percentile, DailyPairStat, DailyStats, FilterConfig,
    PairKey, Transition,
};

pub type CheckResult = Result<(), TestCaseError>;

/// Runs `check` on `cases` generated inputs; returns the failure, if any.
pub fn run_cases<S: Strategy>(cases: u32, strategy: S, check: impl Fn(S::Value) -> CheckResult) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, check).map_err(|e| e.to_string())
}

// ---------------------------------------------------------------- rank test

/// Two samples of small integers, so ties are frequent.
pub fn tied_samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (vec(-20i32..20, 1..16), vec(-20i32..20, 1..16)).prop_map(|(a, b)| {
        (a.into_iter().map(f64::from).collect(), b.into_iter().map(f64::from).collect())
    })
}

/// Two samples of continuous values covering exact and approximate sizes.
pub fn continuous_samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (vec(-1.0e3..1.0e3f64, 1..18), vec(-1.0e3..1.0e3f64, 1..18))
}

pub fn any_samples() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    prop_oneof![tied_samples(), continuous_samples()]
}

pub fn check_complement((a, b): (Vec<f64>, Vec<f64>)) -> CheckResult {
    let ua = mann_whitney_u(&a, &b, Alternative::TwoSided).unwrap().u_statistic;
    let ub = mann_whitney_u(&b, &a, Alternative::TwoSided).unwrap().u_statistic;
    prop_assert_eq!(ua + ub, (a.len() * b.len()) as f64);
    Ok(())
}

pub fn check_swap_symmetry((a, b): (Vec<f64>, Vec<f64>)) -> CheckResult {
    let ab = mann_whitney_u(&a, &b, Alternative::TwoSided).unwrap();
    let ba = mann_whitney_u(&b, &a, Alternative::TwoSided).unwrap();
    prop_assert_eq!(ab.p_value, ba.p_value);
    prop_assert_eq!(ab.method, ba.method);
    Ok(())
}

/// Integer samples pushed through strictly increasing maps that keep ties.
pub fn check_monotone_invariance((a, b): (Vec<f64>, Vec<f64>)) -> CheckResult {
    let maps: [fn(f64) -> f64; 3] = [|x| x * x * x + 7.0 * x, |x| (x / 8.0).exp(), |x| 3.0 * x - 100.0];
    for alt in [Alternative::TwoSided, Alternative::Greater, Alternative::Less] {
        let base = mann_whitney_u(&a, &b, alt).unwrap();
        for f in maps {
            let fa: Vec<f64> = a.iter().map(|&x| f(x)).collect();
            let fb: Vec<f64> = b.iter().map(|&x| f(x)).collect();
            let mapped = mann_whitney_u(&fa, &fb, alt).unwrap();
            prop_assert_eq!(base.u_statistic, mapped.u_statistic);
            prop_assert_eq!(base.p_value, mapped.p_value);
        }
    }
    Ok(())
}

pub fn check_p_bounds((a, b): (Vec<f64>, Vec<f64>)) -> CheckResult {
    let two = mann_whitney_u(&a, &b, Alternative::TwoSided).unwrap().p_value;
    let greater = mann_whitney_u(&a, &b, Alternative::Greater).unwrap().p_value;
    let less = mann_whitney_u(&a, &b, Alternative::Less).unwrap().p_value;
    for p in [two, greater, less] {
        prop_assert!((0.0..=1.0).contains(&p), "p = {}", p);
    }
    prop_assert!(two >= greater.min(less) - 1e-15);
    Ok(())
}

/// Brute-force p-value: every assignment of the pooled values to the
/// first group, with U counted pairwise.
pub fn enumerate_p(a: &[f64], b: &[f64], alt: Alternative) -> f64 {
    fn pairwise_u(x: &[f64], y: &[f64]) -> f64 {
        let mut u = 0.0;
        for &xi in x {
            for &yj in y {
                u += if xi > yj {
                    1.0
                } else if xi == yj {
                    0.5
                } else {
                    0.0
                };
            }
        }
        u
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let observed = pairwise_u(a, b);
    let (mut total, mut lower, mut upper) = (0u64, 0u64, 0u64);
    let mut x = Vec::with_capacity(a.len());
    let mut y = Vec::with_capacity(b.len());
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        x.clear();
        y.clear();
        for (i, &v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                x.push(v);
            } else {
                y.push(v);
            }
        }
        let u = pairwise_u(&x, &y);
        total += 1;
        lower += u64::from(u <= observed);
        upper += u64::from(u >= observed);
    }
    let (lo, hi) = (lower as f64 / total as f64, upper as f64 / total as f64);
    match alt {
        Alternative::Less => lo,
        Alternative::Greater => hi,
        Alternative::TwoSided => (2.0 * lo.min(hi)).min(1.0),
    }
}

// ----------------------------------------------------------------- pipeline

/// Event logs over four sensors with millisecond timestamps spread over a
/// few 100-second days.
pub fn event_logs() -> impl Strategy<Value = EventLog> {
    vec((0u8..4, 0u32..40_000, any::<bool>()), 0..80).prop_map(|raw| {
        let events = raw
            .into_iter()
            .map(|(s, ms, on)| {
                let status = if on { Status::On } else { Status::Off };
                SensorEvent::new(f64::from(ms) / 1000.0, format!("s{s}"), status).unwrap()
            })
            .collect();
        EventLog::from_events(events, 100.0).unwrap()
    })
}

pub fn filter_configs() -> impl Strategy<Value = FilterConfig> {
    (0.0..5.0f64, 0.1..40.0f64, 0.0..=100.0f64).prop_map(|(t_min, span, k)| FilterConfig {
        t_min,
        t_max: t_min + span,
        percentile_k: k,
    })
}

pub fn check_transition_count(log: EventLog) -> CheckResult {
    let expected = log.events.windows(2).filter(|w| w[0].sensor_id != w[1].sensor_id).count();
    let ts = extract_transitions(&log);
    prop_assert_eq!(ts.len(), expected);
    for t in &ts {
        prop_assert!(t.from_sensor != t.to_sensor);
        prop_assert!(t.duration >= 0.0);
    }
    Ok(())
}

pub fn check_direction_symmetry((log, cfg): (EventLog, FilterConfig)) -> CheckResult {
    let ts = filter_transitions(&extract_transitions(&log), &cfg);
    let swapped: Vec<Transition> = ts
        .iter()
        .map(|t| Transition {
            from_sensor: t.to_sensor.clone(),
            to_sensor: t.from_sensor.clone(),
            ..t.clone()
        })
        .collect();
    prop_assert_eq!(aggregate_daily(&ts, &cfg), aggregate_daily(&swapped, &cfg));
    Ok(())
}

pub fn check_filter_idempotence((log, cfg): (EventLog, FilterConfig)) -> CheckResult {
    let once = filter_transitions(&extract_transitions(&log), &cfg);
    prop_assert_eq!(filter_transitions(&once, &cfg), once.clone());
    for t in &once {
        prop_assert!(cfg.t_min <= t.duration && t.duration <= cfg.t_max);
    }
    Ok(())
}

pub fn check_support_conservation((log, cfg): (EventLog, FilterConfig)) -> CheckResult {
    let kept = filter_transitions(&extract_transitions(&log), &cfg);
    let stats = aggregate_daily(&kept, &cfg);
    prop_assert_eq!(stats.values().map(|s| s.support).sum::<usize>(), kept.len());
    for s in stats.values() {
        prop_assert!(s.support > 0 && s.percentile_value.is_some());
    }
    Ok(())
}

pub fn check_percentile_endpoints((values, k): (Vec<f64>, f64)) -> CheckResult {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    prop_assert_eq!(percentile(&values, 0.0).unwrap(), min);
    prop_assert_eq!(percentile(&values, 100.0).unwrap(), max);
    let p = percentile(&values, k).unwrap();
    prop_assert!(min <= p && p <= max);
    Ok(())
}

pub fn check_percentile_monotonicity((values, k1, k2, extra): (Vec<f64>, f64, f64, f64)) -> CheckResult {
    let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
    prop_assert!(percentile(&values, lo).unwrap() <= percentile(&values, hi).unwrap());
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut grown = values.clone();
    grown.push(max + extra.abs());
    prop_assert!(percentile(&grown, k1).unwrap() >= percentile(&values, k1).unwrap());
    Ok(())
}

pub fn percentile_inputs() -> impl Strategy<Value = (Vec<f64>, f64)> {
    (vec(-1.0e3..1.0e3f64, 1..40), 0.0..=100.0f64)
}

pub fn check_load_permutation_invariance((log, seed): (EventLog, u64)) -> CheckResult {
    let mut distinct: Vec<&SensorEvent> = Vec::new();
    for e in &log.events {
        if distinct.last().is_none_or(|p| p.timestamp != e.timestamp) {
            distinct.push(e);
        }
    }
    let lines: Vec<String> =
        distinct.iter().map(|e| format!("{},{},{}", e.timestamp, e.sensor_id, e.status.as_str())).collect();
    let mut shuffled = lines.clone();
    let n = shuffled.len();
    let mut state = seed | 1;
    for i in (1..n).rev() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        shuffled.swap(i, (state % (i as u64 + 1)) as usize);
    }
    let opts = LoadOptions { day_length: 100.0, header: false };
    let a = load_event_log(lines.join("\n").as_bytes(), opts).unwrap();
    let b = load_event_log(shuffled.join("\n").as_bytes(), opts).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn check_day_index((t, len): (f64, f64)) -> CheckResult {
    prop_assert_eq!(day_index(t + len, len), day_index(t, len) + 1);
    prop_assert!(day_index(t, len) <= day_index(t + 0.5 * len, len));
    prop_assert_eq!(day_index(t, len), (t / len).floor() as u32 + 1);
    Ok(())
}

// ----------------------------------------------------------------- detector

/// A 20-day log where two to four sensors fire in loops with jittered gaps.
pub fn daily_logs() -> impl Strategy<Value = EventLog> {
    vec(vec((0u8..4, 1u32..30_000), 3..12), 20).prop_map(|days| {
        let mut events = Vec::new();
        for (d, day) in days.into_iter().enumerate() {
            let mut t = d as f64 * 1000.0;
            for (s, gap_ms) in day {
                t += f64::from(gap_ms) / 1000.0;
                events.push(SensorEvent::new(t, format!("s{s}"), Status::On).unwrap());
            }
        }
        EventLog::from_events(events, 1000.0).unwrap()
    })
}

pub fn check_scale_invariance((log, k, weighted): (EventLog, f64, bool)) -> CheckResult {
    const C: f64 = 2.0;
    let filter = FilterConfig {
        t_min: 1.0,
        t_max: 20.0,
        percentile_k: k,
    };
    let detector = DetectorConfig {
        weighting: if weighted { Weighting::SupportWeighted } else { Weighting::Unweighted },
        ..DetectorConfig::default()
    };
    let scaled_events = log
        .events
        .iter()
        .map(|e| SensorEvent { timestamp: e.timestamp * C, ..e.clone() })
        .collect();
    let scaled = EventLog::from_events(scaled_events, log.day_length * C).unwrap();
    let scaled_filter = FilterConfig {
        t_min: filter.t_min * C,
        t_max: filter.t_max * C,
        ..filter
    };
    let a = detect(&log, &filter, &detector).unwrap();
    let b = detect(&scaled, &scaled_filter, &detector).unwrap();
    prop_assert_eq!(a, b);
    Ok(())
}

pub fn check_weight_normalization(log: EventLog) -> CheckResult {
    let cfg = DetectorConfig { weighting: Weighting::SupportWeighted, ..DetectorConfig::default() };
    let series = detect(&log, &FilterConfig::default(), &cfg).unwrap();
    for d in &series.days {
        let total: f64 = d.verdicts.iter().map(|v| v.weight).sum();
        prop_assert!(total == 0.0 || (total - 1.0).abs() < 1e-12, "day {} weights sum {}", d.day, total);
        prop_assert!((0.0..=1.0).contains(&d.score));
    }
    Ok(())
}

pub fn check_default_safe(log: EventLog) -> CheckResult {
    for weighting in [Weighting::Unweighted, Weighting::SupportWeighted] {
        let cfg = DetectorConfig { weighting, ..DetectorConfig::default() };
        let series = detect(&log, &FilterConfig::default(), &cfg).unwrap();
        for d in &series.days {
            if d.verdicts.iter().all(|v| !v.tested) {
                prop_assert_eq!(d.score, 0.0);
                prop_assert!(!d.decision);
            }
        }
    }
    Ok(())
}

/// Daily statistics for one pair over `days` days.
pub fn single_pair_stats(values: &[f64]) -> DailyStats {
    let pair = PairKey::new("a".into(), "b".into());
    let mut stats = BTreeMap::new();
    for (i, &v) in values.iter().enumerate() {
        let day = i as u32 + 1;
        stats.insert(
            (pair.clone(), day),
            DailyPairStat {
                pair: pair.clone(),
                day,
                percentile_value: Some(v),
                support: 5,
            },
        );
    }
    stats
}

/// Flag of the single pair on the last day of `values`.
pub fn last_day_flag(values: &[f64], cfg: &DetectorConfig) -> bool {
    let stats = single_pair_stats(values);
    let series = detect_from_stats(&stats, values.len() as u32, cfg).unwrap();
    series.days.last().unwrap().verdicts[0].flag
}
