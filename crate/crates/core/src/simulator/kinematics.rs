//! Constant-speed walking and the sensor firing rules applied to sampled
//! trajectories.

use std::collections::VecDeque;

use super::geometry::Point;
use super::layout::{FloorPlan, SensorKind};
use crate::event_model::{SensorEvent, SensorId, Status};

/// One trajectory sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub pos: Point,
    /// The agent has left the apartment.
    pub outside: bool,
}

impl Sample {
    pub fn at(t: f64, pos: Point) -> Self {
        Sample {
            t,
            pos,
            outside: false,
        }
    }
}

/// Samples a constant-speed walk along `path` every `1 / rate` seconds from
/// `t0`, closing with a sample at the exact arrival time.
pub fn walk(path: &[Point], speed: f64, rate: f64, t0: f64) -> Vec<Sample> {
    assert!(speed > 0.0 && rate > 0.0, "speed and rate must be positive");
    let Some(&start) = path.first() else {
        return Vec::new();
    };
    let cumulative: Vec<f64> = std::iter::once(0.0)
        .chain(path.windows(2).scan(0.0, |acc, w| {
            *acc += w[0].dist(w[1]);
            Some(*acc)
        }))
        .collect();
    let total = *cumulative.last().unwrap();
    let duration = total / speed;
    let steps = (duration * rate + 1e-9).floor() as usize;

    let mut samples = Vec::with_capacity(steps + 2);
    let mut seg = 0;
    for i in 0..=steps {
        let elapsed = i as f64 / rate;
        let s = (elapsed * speed).min(total);
        while seg + 1 < path.len() - 1 && cumulative[seg + 1] < s {
            seg += 1;
        }
        let pos = if path.len() == 1 {
            start
        } else {
            let seg_len = cumulative[seg + 1] - cumulative[seg];
            let f = if seg_len > 0.0 { (s - cumulative[seg]) / seg_len } else { 0.0 };
            path[seg].lerp(path[seg + 1], f.clamp(0.0, 1.0))
        };
        samples.push(Sample::at(t0 + elapsed, pos));
    }
    let arrival = t0 + duration;
    let end = *path.last().unwrap();
    match samples.last_mut() {
        Some(last) if (arrival - last.t).abs() < 1e-9 => *last = Sample::at(arrival, end),
        _ => samples.push(Sample::at(arrival, end)),
    }
    samples
}

/// Physical parameters of the sensor models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SensorModel {
    pub body_radius: f64,
    /// Trailing window over which a PIR decides the agent stands still.
    pub still_window: f64,
    /// Displacement below which the agent counts as still.
    pub still_threshold: f64,
    /// Seconds between a door opening and closing.
    pub door_hold: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        SensorModel {
            body_radius: 0.5,
            still_window: 1.0,
            still_threshold: 0.01,
            door_hold: 2.0,
        }
    }
}

#[derive(Clone, Debug)]
struct Tracked {
    id: SensorId,
    kind: SensorKind,
    position: Point,
    on: bool,
}

/// Incremental sensor state machine over a time-ordered sample stream.
#[derive(Clone, Debug)]
pub struct SensorTracker {
    sensors: Vec<Tracked>,
    model: SensorModel,
    history: VecDeque<Sample>,
    last_outside: Option<bool>,
    events: Vec<SensorEvent>,
}

impl SensorTracker {
    /// All sensors start inactive.
    pub fn new(plan: &FloorPlan, model: SensorModel) -> Self {
        SensorTracker {
            sensors: plan
                .sensors
                .iter()
                .map(|s| Tracked {
                    id: SensorId::new(&s.id),
                    kind: s.kind.clone(),
                    position: s.position,
                    on: false,
                })
                .collect(),
            model,
            history: VecDeque::new(),
            last_outside: None,
            events: Vec::new(),
        }
    }

    /// Starts as if the agent had been resting at `pos` for a long time:
    /// pressure mats under the body are already active, nothing else is.
    pub fn settled_at(plan: &FloorPlan, model: SensorModel, pos: Point) -> Self {
        let mut tracker = Self::new(plan, model);
        for s in &mut tracker.sensors {
            if let SensorKind::Pressure { mat } = s.kind {
                s.on = mat.inflate(model.body_radius).contains(pos);
            }
        }
        tracker.last_outside = Some(false);
        tracker
    }

    fn is_still(&mut self, now: Sample) -> bool {
        let cutoff = now.t - self.model.still_window + 1e-9;
        // keep only the newest sample at or before the cutoff
        while self.history.len() >= 2 && self.history[1].t <= cutoff {
            self.history.pop_front();
        }
        match self.history.front() {
            Some(reference) if reference.t <= cutoff => {
                now.pos.dist(reference.pos) < self.model.still_threshold
            }
            _ => false,
        }
    }

    pub fn observe(&mut self, sample: Sample) {
        let still = self.is_still(sample);
        let crossed = self.last_outside.is_some_and(|prev| prev != sample.outside);
        let reach = self.model.body_radius;
        for s in &mut self.sensors {
            let active = match s.kind {
                SensorKind::Pir { radius } => {
                    !sample.outside && !still && sample.pos.dist(s.position) <= radius + reach
                }
                SensorKind::Pressure { mat } => !sample.outside && mat.inflate(reach).contains(sample.pos),
                SensorKind::Door => {
                    if crossed {
                        self.events.push(SensorEvent {
                            timestamp: sample.t,
                            sensor_id: s.id.clone(),
                            status: Status::On,
                        });
                        self.events.push(SensorEvent {
                            timestamp: sample.t + self.model.door_hold,
                            sensor_id: s.id.clone(),
                            status: Status::Off,
                        });
                    }
                    continue;
                }
            };
            if active != s.on {
                s.on = active;
                self.events.push(SensorEvent {
                    timestamp: sample.t,
                    sensor_id: s.id.clone(),
                    status: if active { Status::On } else { Status::Off },
                });
            }
        }
        self.last_outside = Some(sample.outside);
        self.history.push_back(sample);
    }

    /// Events so far, stably ordered by time.
    pub fn finish(mut self) -> Vec<SensorEvent> {
        self.events.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        self.events
    }
}

/// Runs the sensor rules over a whole trajectory, starting with every sensor
/// inactive.
pub fn fire_sensors(samples: &[Sample], plan: &FloorPlan, model: SensorModel) -> Vec<SensorEvent> {
    let mut tracker = SensorTracker::new(plan, model);
    for &s in samples {
        tracker.observe(s);
    }
    tracker.finish()
}
