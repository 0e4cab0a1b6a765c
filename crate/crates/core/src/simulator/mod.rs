//! Synthetic smart-home event generator.
//!
//! A single resident follows a stochastic daily routine in a studio layout,
//! walking at constant speed along shortest obstacle-free paths between
//! activity spots. Sensor events are produced by sampling the trajectory at
//! a fixed rate. From `onset_day` on, the walking speed switches from the
//! baseline to the drifted value.

pub mod geometry;
pub mod kinematics;
pub mod layout;
pub mod path;
pub mod schedule;

use std::collections::HashMap;
use std::io::{BufRead, Write};
use std::sync::Arc;

pub use geometry::{Point, Rect};
pub use kinematics::{fire_sensors, walk, Sample, SensorModel, SensorTracker};
pub use layout::{FloorPlan, SensorKind, SensorSpec};
pub use path::{plan_path, Planner};
pub use schedule::{generate_schedule, Destination, Visit};

use crate::error::{Error, Result};
use crate::event_model::{EventLog, SensorEvent, DEFAULT_DAY_LENGTH};

/// Slowest and fastest gait speeds accepted unless the range check is relaxed.
pub const SPEED_RANGE: (f64, f64) = (0.4, 1.2);

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub baseline_speed: f64,
    pub drifted_speed: f64,
    /// First day walked at the drifted speed; `num_days + 1` means no drift.
    pub onset_day: u32,
    pub num_days: u32,
    pub seed: u64,
    pub sample_rate: f64,
    pub body_radius: f64,
    pub day_length: f64,
    /// Radius of the ring of alternative standing points around each spot.
    pub spot_jitter: f64,
    pub still_window: f64,
    pub still_threshold: f64,
    pub door_hold: f64,
    /// Reject speeds outside [`SPEED_RANGE`].
    pub check_speed_range: bool,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            baseline_speed: 1.2,
            drifted_speed: 0.4,
            onset_day: 100,
            num_days: 200,
            seed: 0,
            sample_rate: 10.0,
            body_radius: 0.5,
            day_length: DEFAULT_DAY_LENGTH,
            spot_jitter: 0.3,
            still_window: 1.0,
            still_threshold: 0.01,
            door_hold: 2.0,
            check_speed_range: true,
        }
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        for (name, speed) in [("baseline", self.baseline_speed), ("drifted", self.drifted_speed)] {
            if !(speed.is_finite() && speed > 0.0) {
                return Err(Error::config(format!("{name} speed must be positive")));
            }
            let (lo, hi) = SPEED_RANGE;
            if self.check_speed_range && !(lo - 1e-9..=hi + 1e-9).contains(&speed) {
                return Err(Error::config(format!(
                    "{name} speed {speed} outside [{lo}, {hi}] m/s"
                )));
            }
        }
        if self.num_days == 0 {
            return Err(Error::config("num_days must be positive"));
        }
        if self.onset_day == 0 || self.onset_day > self.num_days + 1 {
            return Err(Error::config(format!(
                "onset day must lie in 1..={}",
                self.num_days + 1
            )));
        }
        let positive = [
            ("sample rate", self.sample_rate),
            ("body radius", self.body_radius),
            ("still window", self.still_window),
            ("still threshold", self.still_threshold),
            ("door hold", self.door_hold),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive")));
            }
        }
        if !(self.spot_jitter.is_finite() && self.spot_jitter >= 0.0) {
            return Err(Error::config("spot jitter must be non-negative"));
        }
        if !(self.day_length.is_finite() && self.day_length >= 3600.0) {
            return Err(Error::config("day length must be at least one hour"));
        }
        Ok(())
    }

    pub fn speed_on(&self, day: u32) -> f64 {
        if day < self.onset_day {
            self.baseline_speed
        } else {
            self.drifted_speed
        }
    }

    pub fn sensor_model(&self) -> SensorModel {
        SensorModel {
            body_radius: self.body_radius,
            still_window: self.still_window,
            still_threshold: self.still_threshold,
            door_hold: self.door_hold,
        }
    }
}

/// Per-day drift labels of a simulated scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundTruth {
    pub onset_day: u32,
    /// `labels[d - 1]` is the label of day `d`.
    pub labels: Vec<bool>,
}

impl GroundTruth {
    pub fn from_onset(onset_day: u32, num_days: u32) -> Self {
        GroundTruth {
            onset_day,
            labels: (1..=num_days).map(|d| d >= onset_day).collect(),
        }
    }

    pub fn num_days(&self) -> u32 {
        self.labels.len() as u32
    }

    pub fn label(&self, day: u32) -> Option<bool> {
        day.checked_sub(1).and_then(|i| self.labels.get(i as usize)).copied()
    }

    pub fn has_drift(&self) -> bool {
        self.onset_day <= self.num_days()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "day,label")?;
        for (i, &l) in self.labels.iter().enumerate() {
            writeln!(out, "{},{}", i + 1, u8::from(l))?;
        }
        Ok(())
    }

    /// Reads `day,label` rows; days must run 1, 2, 3, ... and labels must
    /// never fall back from 1 to 0.
    pub fn read_csv<R: BufRead>(source: R) -> Result<Self> {
        let mut labels = Vec::new();
        for (idx, line) in source.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if idx == 0 || line.trim().is_empty() {
                continue;
            }
            let (day, label) = line
                .trim()
                .split_once(',')
                .ok_or_else(|| Error::parse(line_no, "expected `day,label`"))?;
            let day: usize = day
                .parse()
                .map_err(|_| Error::parse(line_no, format!("bad day `{day}`")))?;
            if day != labels.len() + 1 {
                return Err(Error::parse(line_no, format!("expected day {}", labels.len() + 1)));
            }
            let label = match label {
                "0" => false,
                "1" => true,
                other => return Err(Error::parse(line_no, format!("bad label `{other}`"))),
            };
            if labels.last() == Some(&true) && !label {
                return Err(Error::parse(line_no, "labels must be non-decreasing"));
            }
            labels.push(label);
        }
        let onset_day = labels
            .iter()
            .position(|&l| l)
            .map_or(labels.len() + 1, |i| i + 1) as u32;
        Ok(GroundTruth { onset_day, labels })
    }
}

/// Reusable simulator for one floor plan and sensor model.
///
/// Walking paths depend only on the plan and body size, so they are cached
/// across scenarios.
pub struct Simulator {
    plan: FloorPlan,
    model: SensorModel,
    jitter: f64,
    planner: Planner,
    /// `standing[spot][variant]`
    standing: Vec<Vec<Point>>,
    paths: HashMap<(u64, u64), Arc<Vec<Point>>>,
}

fn point_key(p: Point) -> u64 {
    // millimetre lattice keeps keys exact for cached standing points
    let x = (p.x * 1000.0).round() as i64 as u64;
    let y = (p.y * 1000.0).round() as i64 as u64;
    (x << 32) ^ y
}

impl Simulator {
    pub fn new(plan: FloorPlan, model: SensorModel, jitter: f64) -> Result<Self> {
        plan.validate()?;
        let planner = Planner::new(&plan, model.body_radius);
        let mut standing = Vec::with_capacity(plan.spots.len());
        let centres = plan
            .spots
            .iter()
            .map(|s| (s.name.as_str(), s.position))
            .chain(std::iter::once(("door", plan.door.spot)));
        for (name, centre) in centres {
            if !planner.point_clear(centre) {
                return Err(Error::config(format!(
                    "spot `{name}` is closer than {} m to a wall or obstacle",
                    model.body_radius
                )));
            }
            let mut variants = vec![centre];
            for k in 1..schedule::STANDING_VARIANTS {
                let angle = std::f64::consts::FRAC_PI_4 + f64::from(k - 1) * std::f64::consts::FRAC_PI_2;
                let p = Point::new(centre.x + jitter * angle.cos(), centre.y + jitter * angle.sin());
                variants.push(if planner.point_clear(p) { p } else { centre });
            }
            standing.push(variants);
        }
        Ok(Simulator {
            plan,
            model,
            jitter,
            planner,
            standing,
            paths: HashMap::new(),
        })
    }

    pub fn plan(&self) -> &FloorPlan {
        &self.plan
    }

    fn path(&mut self, from: Point, to: Point) -> Result<Arc<Vec<Point>>> {
        let key = (point_key(from), point_key(to));
        if let Some(p) = self.paths.get(&key) {
            return Ok(p.clone());
        }
        let path = Arc::new(self.planner.plan_path(from, to)?);
        let reversed: Vec<Point> = path.iter().rev().copied().collect();
        self.paths.insert((key.1, key.0), Arc::new(reversed));
        self.paths.insert(key, path.clone());
        Ok(path)
    }

    fn door_point(&self) -> Point {
        *self.standing.last().unwrap().first().unwrap()
    }

    /// Events of one day, in absolute time.
    pub fn simulate_day(&mut self, scenario: &Scenario, day: u32) -> Result<Vec<SensorEvent>> {
        let rate = scenario.sample_rate;
        let speed = scenario.speed_on(day);
        let day_start = f64::from(day - 1) * scenario.day_length;
        let sleep = self.plan.sleep_spot();
        let tail = self.model.still_window + 0.2;

        let mut here = self.standing[sleep][0];
        let mut tracker = SensorTracker::settled_at(&self.plan, self.model, here);
        let mut free_at = 0.0;
        for visit in generate_schedule(day, scenario, &self.plan) {
            let target = match visit.destination {
                Destination::Spot(i) => self.standing[i][usize::from(visit.variant)],
                Destination::Outside => self.door_point(),
            };
            let path = self.path(here, target)?;
            let travel = geometry::polyline_length(&path) / speed;
            let depart = (visit.arrival - travel).max(free_at);
            let arrived = depart + travel;
            for s in walk(&path, speed, rate, day_start + depart) {
                tracker.observe(s);
            }
            match visit.destination {
                Destination::Outside => {
                    tracker.observe(Sample {
                        t: day_start + arrived + 1.0 / rate,
                        pos: target,
                        outside: true,
                    });
                    let back = arrived + visit.dwell;
                    tracker.observe(Sample::at(day_start + back, target));
                    free_at = back;
                }
                Destination::Spot(_) => {
                    let mut k = 1;
                    while f64::from(k) / rate < visit.dwell.min(tail) {
                        tracker.observe(Sample::at(day_start + arrived + f64::from(k) / rate, target));
                        k += 1;
                    }
                    free_at = arrived + visit.dwell;
                }
            }
            here = target;
        }
        let mut events = tracker.finish();
        for e in &mut events {
            e.timestamp = (e.timestamp * 1000.0).round() / 1000.0;
        }
        Ok(events)
    }

    pub fn simulate(&mut self, scenario: &Scenario) -> Result<(EventLog, GroundTruth)> {
        scenario.validate()?;
        if scenario.sensor_model() != self.model || scenario.spot_jitter != self.jitter {
            return Err(Error::config("scenario sensor model differs from the simulator's"));
        }
        let mut events = Vec::new();
        for day in 1..=scenario.num_days {
            events.extend(self.simulate_day(scenario, day)?);
        }
        let log = EventLog::from_events(events, scenario.day_length)?;
        Ok((log, GroundTruth::from_onset(scenario.onset_day, scenario.num_days)))
    }
}

/// Simulates `scenario` in `plan`.
pub fn simulate(plan: &FloorPlan, scenario: &Scenario) -> Result<(EventLog, GroundTruth)> {
    scenario.validate()?;
    Simulator::new(plan.clone(), scenario.sensor_model(), scenario.spot_jitter)?.simulate(scenario)
}
