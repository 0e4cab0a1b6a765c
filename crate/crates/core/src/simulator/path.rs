//! Obstacle-avoiding walking paths.
//!
//! A* over an 8-connected lattice with 0.1 m spacing, keeping the body disc
//! clear of walls and furniture, followed by line-of-sight smoothing.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::geometry::{polyline_length, Point, Rect};
use super::layout::FloorPlan;
use crate::error::{Error, Result};

pub const GRID_RESOLUTION: f64 = 0.1;

const EPS: f64 = 1e-9;

/// Connector search radius, in lattice steps, around free endpoints.
const CONNECT_STEPS: i64 = 3;

#[derive(Clone, Debug)]
pub struct Planner {
    width: f64,
    height: f64,
    clearance: f64,
    obstacles: Vec<Rect>,
    nx: usize,
    ny: usize,
    free: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq)]
struct Open {
    f: f64,
    node: usize,
}

impl Eq for Open {}

impl Ord for Open {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on f, ties broken by node index for determinism
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Open {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Planner {
    /// Builds the occupancy lattice for a body of radius `clearance`.
    pub fn new(plan: &FloorPlan, clearance: f64) -> Self {
        let nx = (plan.width / GRID_RESOLUTION).round() as usize + 1;
        let ny = (plan.height / GRID_RESOLUTION).round() as usize + 1;
        let mut planner = Planner {
            width: plan.width,
            height: plan.height,
            clearance,
            obstacles: plan.obstacles.iter().map(|o| o.rect).collect(),
            nx,
            ny,
            free: Vec::new(),
        };
        planner.free = (0..nx * ny)
            .map(|idx| planner.point_clear(planner.node_point(idx)))
            .collect();
        planner
    }

    fn node_point(&self, idx: usize) -> Point {
        let (i, j) = (idx % self.nx, idx / self.nx);
        Point::new(i as f64 * GRID_RESOLUTION, j as f64 * GRID_RESOLUTION)
    }

    /// Clearance of `p` from walls and furniture.
    pub fn clearance_at(&self, p: Point) -> f64 {
        let walls = p.x.min(self.width - p.x).min(p.y).min(self.height - p.y);
        self.obstacles
            .iter()
            .map(|r| r.distance_to(p))
            .fold(walls, f64::min)
    }

    pub fn point_clear(&self, p: Point) -> bool {
        self.clearance_at(p) >= self.clearance - EPS
    }

    /// True when the body can slide along the whole segment.
    pub fn segment_clear(&self, p: Point, q: Point) -> bool {
        // the wall-shrunk room is convex, so endpoint checks cover the walls
        self.point_clear_of_walls(p)
            && self.point_clear_of_walls(q)
            && self
                .obstacles
                .iter()
                .all(|r| r.distance_to_segment(p, q) >= self.clearance - EPS)
    }

    fn point_clear_of_walls(&self, p: Point) -> bool {
        let walls = p.x.min(self.width - p.x).min(p.y).min(self.height - p.y);
        walls >= self.clearance - EPS
    }

    fn connectors(&self, p: Point) -> Vec<(usize, f64)> {
        let ci = (p.x / GRID_RESOLUTION).round() as i64;
        let cj = (p.y / GRID_RESOLUTION).round() as i64;
        let mut out = Vec::new();
        for dj in -CONNECT_STEPS..=CONNECT_STEPS {
            for di in -CONNECT_STEPS..=CONNECT_STEPS {
                let (i, j) = (ci + di, cj + dj);
                if i < 0 || j < 0 || i >= self.nx as i64 || j >= self.ny as i64 {
                    continue;
                }
                let idx = j as usize * self.nx + i as usize;
                let node = self.node_point(idx);
                if self.free[idx] && self.segment_clear(p, node) {
                    out.push((idx, p.dist(node)));
                }
            }
        }
        out
    }

    /// Shortest smoothed path from `from` to `to`; endpoints are preserved.
    pub fn plan_path(&self, from: Point, to: Point) -> Result<Vec<Point>> {
        let unreachable = || Error::Unreachable {
            from_x: from.x,
            from_y: from.y,
            to_x: to.x,
            to_y: to.y,
        };
        if !self.point_clear(from) || !self.point_clear(to) {
            return Err(unreachable());
        }
        if from == to {
            return Ok(vec![from]);
        }
        if self.segment_clear(from, to) {
            return Ok(vec![from, to]);
        }

        let n = self.nx * self.ny;
        let mut goal_link = vec![f64::INFINITY; n];
        for (idx, d) in self.connectors(to) {
            goal_link[idx] = d;
        }
        let goal = n;
        let mut g = vec![f64::INFINITY; n + 1];
        let mut parent = vec![usize::MAX; n + 1];
        let mut closed = vec![false; n + 1];
        let mut open = BinaryHeap::new();
        let h = |p: Point| {
            let (dx, dy) = ((p.x - to.x).abs(), (p.y - to.y).abs());
            dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy)
        };
        for (idx, d) in self.connectors(from) {
            if d < g[idx] {
                g[idx] = d;
                open.push(Open {
                    f: d + h(self.node_point(idx)),
                    node: idx,
                });
            }
        }

        while let Some(Open { node, .. }) = open.pop() {
            if closed[node] {
                continue;
            }
            closed[node] = true;
            if node == goal {
                break;
            }
            let here = self.node_point(node);
            if goal_link[node].is_finite() {
                let cand = g[node] + goal_link[node];
                if cand < g[goal] {
                    g[goal] = cand;
                    parent[goal] = node;
                    open.push(Open { f: cand, node: goal });
                }
            }
            let (i, j) = ((node % self.nx) as i64, (node / self.nx) as i64);
            for dj in -1..=1i64 {
                for di in -1..=1i64 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni >= self.nx as i64 || nj >= self.ny as i64 {
                        continue;
                    }
                    let next = nj as usize * self.nx + ni as usize;
                    if !self.free[next] || closed[next] {
                        continue;
                    }
                    let there = self.node_point(next);
                    if !self.segment_clear(here, there) {
                        continue;
                    }
                    let cand = g[node] + here.dist(there);
                    if cand < g[next] {
                        g[next] = cand;
                        parent[next] = node;
                        open.push(Open {
                            f: cand + h(there),
                            node: next,
                        });
                    }
                }
            }
        }
        if !g[goal].is_finite() {
            return Err(unreachable());
        }

        let mut raw = vec![to];
        let mut cur = parent[goal];
        while cur != usize::MAX {
            raw.push(self.node_point(cur));
            cur = parent[cur];
        }
        raw.push(from);
        raw.reverse();
        Ok(self.smooth(&raw))
    }

    /// Greedy string pulling: jump to the farthest visible vertex.
    fn smooth(&self, raw: &[Point]) -> Vec<Point> {
        let mut out = vec![raw[0]];
        let mut i = 0;
        while i + 1 < raw.len() {
            let mut j = raw.len() - 1;
            while j > i + 1 && !self.segment_clear(raw[i], raw[j]) {
                j -= 1;
            }
            out.push(raw[j]);
            i = j;
        }
        out
    }
}

/// Convenience wrapper building a one-off planner.
pub fn plan_path(plan: &FloorPlan, body_radius: f64, from: Point, to: Point) -> Result<Vec<Point>> {
    Planner::new(plan, body_radius).plan_path(from, to)
}

pub fn path_length(path: &[Point]) -> f64 {
    polyline_length(path)
}
