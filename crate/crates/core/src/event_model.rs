//! Sensor event records and event-log ingestion.
//!
//! The on-disk format is a header-less UTF-8 CSV with exactly three columns,
//! `timestamp,sensor_id,status`. Timestamps are seconds relative to the log
//! epoch; day 1 starts at the epoch.

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

pub const DEFAULT_DAY_LENGTH: f64 = 86_400.0;

/// Opaque sensor identifier. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SensorId(Arc<str>);

impl SensorId {
    pub fn new(id: impl AsRef<str>) -> Self {
        SensorId(Arc::from(id.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl Deref for SensorId {
    type Target = str;

    fn deref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for SensorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for SensorId {
    fn from(s: &str) -> Self {
        SensorId::new(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Status {
    On,
    Off,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::On => "ON",
            Status::Off => "OFF",
        }
    }

    fn parse(token: &str) -> Option<Status> {
        if token.eq_ignore_ascii_case("on") {
            Some(Status::On)
        } else if token.eq_ignore_ascii_case("off") {
            Some(Status::Off)
        } else {
            None
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One record of the raw stream: which sensor fired, when, and with what status.
#[derive(Clone, Debug, PartialEq)]
pub struct SensorEvent {
    pub timestamp: f64,
    pub sensor_id: SensorId,
    pub status: Status,
}

impl SensorEvent {
    pub fn new(timestamp: f64, sensor_id: impl Into<SensorId>, status: Status) -> Result<Self> {
        if !timestamp.is_finite() || timestamp < 0.0 {
            return Err(Error::InvalidInput(format!(
                "timestamp must be finite and non-negative, got {timestamp}"
            )));
        }
        let sensor_id = sensor_id.into();
        if sensor_id.is_empty() {
            return Err(Error::InvalidInput("empty sensor id".into()));
        }
        Ok(SensorEvent {
            timestamp,
            sensor_id,
            status,
        })
    }
}

impl From<String> for SensorId {
    fn from(s: String) -> Self {
        SensorId(Arc::from(s))
    }
}

/// A time-ordered sequence of events plus the day geometry used to index it.
#[derive(Clone, Debug, PartialEq)]
pub struct EventLog {
    pub events: Vec<SensorEvent>,
    pub day_length: f64,
    /// Instant at which day 1 begins.
    pub epoch: f64,
}

impl EventLog {
    /// Builds a log from arbitrary-order events; they are stably sorted by time.
    pub fn from_events(mut events: Vec<SensorEvent>, day_length: f64) -> Result<Self> {
        check_day_length(day_length)?;
        events.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
        Ok(EventLog {
            events,
            day_length,
            epoch: 0.0,
        })
    }

    pub fn empty(day_length: f64) -> Self {
        EventLog {
            events: Vec::new(),
            day_length,
            epoch: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn day_index(&self, t: f64) -> u32 {
        day_index(t - self.epoch, self.day_length)
    }

    /// Day of the latest event, if any.
    pub fn last_day(&self) -> Option<u32> {
        self.events.last().map(|e| self.day_index(e.timestamp))
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        for e in &self.events {
            writeln!(out, "{},{},{}", e.timestamp, e.sensor_id, e.status)?;
        }
        Ok(())
    }
}

fn check_day_length(day_length: f64) -> Result<()> {
    if !(day_length.is_finite() && day_length > 0.0) {
        return Err(Error::config(format!(
            "day length must be positive, got {day_length}"
        )));
    }
    Ok(())
}

/// Maps a time offset to its 1-based day: `floor(t / day_length) + 1`.
pub fn day_index(t: f64, day_length: f64) -> u32 {
    debug_assert!(t >= 0.0);
    (t / day_length).floor() as u32 + 1
}

/// Parses one CSV record. `line_no` is only used to label errors.
pub fn parse_event_record(line: &str, line_no: usize) -> Result<SensorEvent> {
    let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split(',').collect();
    if fields.len() != 3 {
        return Err(Error::parse(
            line_no,
            format!("expected 3 fields, found {}", fields.len()),
        ));
    }
    let ts_field = fields[0].trim();
    let timestamp: f64 = ts_field
        .parse()
        .map_err(|_| Error::parse(line_no, format!("unparsable timestamp `{ts_field}`")))?;
    if !timestamp.is_finite() || timestamp < 0.0 {
        return Err(Error::parse(
            line_no,
            format!("timestamp must be finite and non-negative, got `{ts_field}`"),
        ));
    }
    let sensor = fields[1].trim();
    if sensor.is_empty() {
        return Err(Error::parse(line_no, "empty sensor id"));
    }
    let status_field = fields[2].trim();
    let status = Status::parse(status_field)
        .ok_or_else(|| Error::parse(line_no, format!("unknown status token `{status_field}`")))?;
    Ok(SensorEvent {
        timestamp,
        sensor_id: SensorId::new(sensor),
        status,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LoadOptions {
    pub day_length: f64,
    /// Skip the first line as a header.
    pub header: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            day_length: DEFAULT_DAY_LENGTH,
            header: false,
        }
    }
}

/// Reads a whole event CSV. Blank lines are ignored; the first malformed
/// record aborts the load.
pub fn load_event_log<R: BufRead>(source: R, opts: LoadOptions) -> Result<EventLog> {
    check_day_length(opts.day_length)?;
    let mut events = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        if opts.header && idx == 0 {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        events.push(parse_event_record(&line, line_no)?);
    }
    EventLog::from_events(events, opts.day_length)
}
