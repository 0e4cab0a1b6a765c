//! Floor plans: room bounds, furniture, sensor placements and activity spots.
//!
//! Plans are stored as TOML. Four sparse studio layouts ship with the crate.

use std::collections::HashSet;
use std::path::Path;

use serde::Deserialize;

use super::geometry::{Point, Rect};
use crate::error::{Error, Result};

pub const DEFAULT_PIR_RADIUS: f64 = 1.0;

const BUILTIN: [(&str, &str); 4] = [
    ("A", include_str!("../../layouts/A.toml")),
    ("B", include_str!("../../layouts/B.toml")),
    ("C", include_str!("../../layouts/C.toml")),
    ("D", include_str!("../../layouts/D.toml")),
];

#[derive(Clone, Debug, PartialEq)]
pub enum SensorKind {
    Pir { radius: f64 },
    /// Pressure mat covering a rectangle of floor.
    Pressure { mat: Rect },
    Door,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SensorSpec {
    pub id: String,
    pub kind: SensorKind,
    /// Mount point; the mat centre for pressure sensors.
    pub position: Point,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstacle {
    pub label: String,
    pub rect: Rect,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ActivitySpot {
    pub name: String,
    pub position: Point,
    /// Uniform dwell range in seconds.
    pub dwell: (f64, f64),
    /// Relative frequency among daytime activities.
    pub weight: f64,
    /// The spot where each day starts and ends.
    pub sleep: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Door {
    /// Point on the room boundary.
    pub position: Point,
    /// Interior standing point used when leaving or entering.
    pub spot: Point,
    /// Uniform range of time spent outside, seconds.
    pub away: (f64, f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloorPlan {
    pub name: String,
    pub width: f64,
    pub height: f64,
    pub obstacles: Vec<Obstacle>,
    pub sensors: Vec<SensorSpec>,
    pub door: Door,
    pub spots: Vec<ActivitySpot>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlan {
    name: Option<String>,
    width: f64,
    height: f64,
    door: RawDoor,
    #[serde(default)]
    obstacles: Vec<RawObstacle>,
    sensors: Vec<RawSensor>,
    spots: Vec<RawSpot>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDoor {
    position: [f64; 2],
    spot: [f64; 2],
    #[serde(default = "default_away")]
    away: [f64; 2],
}

fn default_away() -> [f64; 2] {
    [1800.0, 7200.0]
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObstacle {
    #[serde(default)]
    label: String,
    rect: [f64; 4],
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSensor {
    id: String,
    kind: String,
    position: Option<[f64; 2]>,
    radius: Option<f64>,
    rect: Option<[f64; 4]>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSpot {
    name: String,
    position: [f64; 2],
    dwell: [f64; 2],
    #[serde(default = "one")]
    weight: f64,
    #[serde(default)]
    sleep: bool,
}

fn one() -> f64 {
    1.0
}

fn rect_of(r: [f64; 4]) -> Rect {
    Rect::new(r[0], r[1], r[2], r[3])
}

fn point_of(p: [f64; 2]) -> Point {
    Point::new(p[0], p[1])
}

impl FloorPlan {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let raw: RawPlan = toml::from_str(text).map_err(|e| Error::config(format!("layout: {e}")))?;
        let mut sensors = Vec::with_capacity(raw.sensors.len());
        for s in raw.sensors {
            let kind = match s.kind.to_ascii_lowercase().as_str() {
                "pir" => SensorKind::Pir {
                    radius: s.radius.unwrap_or(DEFAULT_PIR_RADIUS),
                },
                "pressure" => {
                    let rect = s.rect.ok_or_else(|| {
                        Error::config(format!("pressure sensor `{}` needs a rect", s.id))
                    })?;
                    SensorKind::Pressure { mat: rect_of(rect) }
                }
                "door" => SensorKind::Door,
                other => return Err(Error::config(format!("unknown sensor kind `{other}`"))),
            };
            let position = match (&kind, s.position) {
                (_, Some(p)) => point_of(p),
                (SensorKind::Pressure { mat }, None) => mat.min.lerp(mat.max, 0.5),
                (_, None) => {
                    return Err(Error::config(format!("sensor `{}` needs a position", s.id)))
                }
            };
            sensors.push(SensorSpec {
                id: s.id,
                kind,
                position,
            });
        }
        let plan = FloorPlan {
            name: raw.name.unwrap_or_else(|| "custom".to_string()),
            width: raw.width,
            height: raw.height,
            obstacles: raw
                .obstacles
                .into_iter()
                .map(|o| Obstacle {
                    label: o.label,
                    rect: rect_of(o.rect),
                })
                .collect(),
            sensors,
            door: Door {
                position: point_of(raw.door.position),
                spot: point_of(raw.door.spot),
                away: (raw.door.away[0], raw.door.away[1]),
            },
            spots: raw
                .spots
                .into_iter()
                .map(|s| ActivitySpot {
                    name: s.name,
                    position: point_of(s.position),
                    dwell: (s.dwell[0], s.dwell[1]),
                    weight: s.weight,
                    sleep: s.sleep,
                })
                .collect(),
        };
        plan.validate()?;
        Ok(plan)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// One of the bundled layouts `A`..`D`.
    pub fn builtin(name: &str) -> Result<Self> {
        BUILTIN
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::UnknownLayout(name.to_string()))
            .and_then(|(_, text)| Self::from_toml_str(text))
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    /// A bundled layout by name, or else a layout file path.
    pub fn resolve(name_or_path: &str) -> Result<Self> {
        match Self::builtin(name_or_path) {
            Err(Error::UnknownLayout(_)) if !Path::new(name_or_path).exists() => {
                Err(Error::UnknownLayout(name_or_path.to_string()))
            }
            Err(Error::UnknownLayout(_)) => Self::from_file(Path::new(name_or_path)),
            other => other,
        }
    }

    pub fn bounds(&self) -> Rect {
        Rect::new(0.0, 0.0, self.width, self.height)
    }

    fn inside_obstacle(&self, p: Point) -> bool {
        self.obstacles.iter().any(|o| o.rect.contains(p))
    }

    fn on_boundary(&self, p: Point) -> bool {
        const EPS: f64 = 1e-9;
        let b = self.bounds();
        b.contains(p)
            && ((p.x - 0.0).abs() < EPS
                || (p.x - self.width).abs() < EPS
                || (p.y - 0.0).abs() < EPS
                || (p.y - self.height).abs() < EPS)
    }

    pub fn sleep_spot(&self) -> usize {
        self.spots.iter().position(|s| s.sleep).expect("validated plan has a sleep spot")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::config("layout bounds must be positive"));
        }
        let bounds = self.bounds();
        if self.spots.len() < 2 {
            return Err(Error::config("layout needs at least 2 activity spots"));
        }
        if self.sensors.len() < 2 {
            return Err(Error::config("layout needs at least 2 sensors"));
        }
        let mut ids = HashSet::new();
        for s in &self.sensors {
            if s.id.is_empty() || s.id.contains([',', '\n', '\r']) {
                return Err(Error::config(format!("invalid sensor id `{}`", s.id)));
            }
            if !ids.insert(s.id.as_str()) {
                return Err(Error::config(format!("duplicate sensor id `{}`", s.id)));
            }
            if !bounds.contains(s.position) {
                return Err(Error::config(format!("sensor `{}` outside the room", s.id)));
            }
            match &s.kind {
                SensorKind::Pir { radius } => {
                    if radius.is_nan() || *radius <= 0.0 {
                        return Err(Error::config(format!("PIR `{}` needs a positive radius", s.id)));
                    }
                    if self.inside_obstacle(s.position) {
                        return Err(Error::config(format!("sensor `{}` inside an obstacle", s.id)));
                    }
                }
                SensorKind::Pressure { mat } => {
                    if !(bounds.contains(mat.min) && bounds.contains(mat.max)) || mat.min.x >= mat.max.x || mat.min.y >= mat.max.y {
                        return Err(Error::config(format!("mat of `{}` is not a valid in-room rectangle", s.id)));
                    }
                }
                SensorKind::Door => {
                    if !self.on_boundary(s.position) {
                        return Err(Error::config(format!("door sensor `{}` must sit on the boundary", s.id)));
                    }
                }
            }
        }
        if !self.on_boundary(self.door.position) {
            return Err(Error::config("door must lie on the room boundary"));
        }
        let (lo, hi) = self.door.away;
        if !(lo >= 1.0 && hi >= lo) {
            return Err(Error::config("door away range must satisfy 1 <= lo <= hi"));
        }
        let mut points = vec![("door spot", self.door.spot)];
        points.extend(self.spots.iter().map(|s| (s.name.as_str(), s.position)));
        for (name, p) in points {
            if !bounds.contains(p) || self.inside_obstacle(p) {
                return Err(Error::config(format!("spot `{name}` must be inside the room and off obstacles")));
            }
        }
        for s in &self.spots {
            let (lo, hi) = s.dwell;
            if !(lo >= 1.0 && hi >= lo) {
                return Err(Error::config(format!("spot `{}` dwell range must satisfy 1 <= lo <= hi", s.name)));
            }
            if !(s.weight >= 0.0 && s.weight.is_finite()) {
                return Err(Error::config(format!("spot `{}` weight must be non-negative", s.name)));
            }
        }
        match self.spots.iter().filter(|s| s.sleep).count() {
            1 => {}
            n => return Err(Error::config(format!("layout needs exactly one sleep spot, found {n}"))),
        }
        if !self.spots.iter().any(|s| !s.sleep && s.weight > 0.0) {
            return Err(Error::config("layout needs a daytime spot with positive weight"));
        }
        Ok(())
    }
}
