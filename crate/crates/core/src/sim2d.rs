//! The planar variant: agents on the convex hull step one unit along the
//! interior angle bisector of their hull corner, inward w.p. `1 - ε` and
//! outward w.p. `ε`. All hull vertices move in the same tick.
//!
//! Orientation tests use the adaptive exact predicate from the `robust`
//! crate, so hull membership is decided exactly for the given `f64`
//! coordinates.
//!
//! Degenerate hulls: a lone point stays put; when every point is collinear
//! the hull is the two endpoints, which step toward (or away from) each
//! other along the segment. Coincident points count once; the lowest index
//! at a hull vertex is the one that moves.

use rand::Rng;
use robust::{orient2d, Coord};
use serde::Serialize;

use crate::analytics::WalkParams;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Coin, SimRng};
use crate::sum::fsum;
use crate::trajectory::{TrajectoryRow2D, TrajectorySink};

pub type Point = [f64; 2];

fn orient(a: Point, b: Point, c: Point) -> f64 {
    orient2d(
        Coord { x: a[0], y: a[1] },
        Coord { x: b[0], y: b[1] },
        Coord { x: c[0], y: c[1] },
    )
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(v: Point) -> f64 {
    v[0].hypot(v[1])
}

fn unit(v: Point) -> Option<Point> {
    let n = norm(v);
    (n > 0.0 && n.is_finite()).then(|| [v[0] / n, v[1] / n])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullInfo {
    /// Indices of the strictly extreme points, counter-clockwise, starting
    /// from the lowest-x (then lowest-y) point.
    pub vertices: Vec<usize>,
    /// Unit inward direction per vertex; empty when the hull is one point.
    pub bisectors: Vec<Point>,
}

impl HullInfo {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Strict interior test against the hull polygon (needs three vertices).
    pub fn strictly_contains(&self, points: &[Point], q: Point) -> bool {
        let h = self.vertices.len();
        h >= 3
            && (0..h).all(|i| {
                let a = points[self.vertices[i]];
                let b = points[self.vertices[(i + 1) % h]];
                orient(a, b, q) > 0.0
            })
    }
}

/// Monotone-chain hull. Collinear edge points and duplicates are dropped.
pub fn convex_hull(points: &[Point]) -> Result<HullInfo> {
    if points.is_empty() {
        return Err(Error::Validation("hull of an empty point set".into()));
    }
    if points.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Validation("non-finite coordinate".into()));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (points[i], points[j]);
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(i.cmp(&j))
    });
    order.dedup_by(|j, i| points[*i] == points[*j]);
    if order.len() == 1 {
        return Ok(HullInfo {
            vertices: order,
            bisectors: Vec::new(),
        });
    }

    let mut hull: Vec<usize> = Vec::with_capacity(order.len() + 1);
    let chain = |hull: &mut Vec<usize>, idx: usize, floor: usize| {
        while hull.len() >= floor + 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if orient(points[a], points[b], points[idx]) > 0.0 {
                break;
            }
            hull.pop();
        }
        hull.push(idx);
    };
    for &i in &order {
        chain(&mut hull, i, 0);
    }
    let lower = hull.len() - 1;
    for &i in order.iter().rev().skip(1) {
        chain(&mut hull, i, lower);
    }
    hull.pop();

    let bisectors = hull_bisectors(points, &hull)?;
    Ok(HullInfo {
        vertices: hull,
        bisectors,
    })
}

fn hull_bisectors(points: &[Point], hull: &[usize]) -> Result<Vec<Point>> {
    let h = hull.len();
    if h == 2 {
        let (a, b) = (points[hull[0]], points[hull[1]]);
        let ab = unit(sub(b, a)).ok_or_else(|| Error::Degenerate("zero-length hull".into()))?;
        return Ok(vec![ab, [-ab[0], -ab[1]]]);
    }
    (0..h)
        .map(|i| {
            let v = points[hull[i]];
            let prev = points[hull[(i + h - 1) % h]];
            let next = points[hull[(i + 1) % h]];
            let (u, w) = match (unit(sub(prev, v)), unit(sub(next, v))) {
                (Some(u), Some(w)) => (u, w),
                _ => return Err(Error::Degenerate(format!("repeated hull vertex at {v:?}"))),
            };
            unit([u[0] + w[0], u[1] + w[1]])
                .ok_or_else(|| Error::Degenerate(format!("straight angle at hull vertex {v:?}")))
        })
        .collect()
}

/// Inward unit direction at hull position `vertex` (an index into
/// `hull.vertices`, not into the point set).
pub fn bisector_direction(hull: &HullInfo, vertex: usize) -> Result<Point> {
    if hull.vertices.len() < 2 {
        return Err(Error::Degenerate("a single point has no hull angle".into()));
    }
    hull.bisectors.get(vertex).copied().ok_or_else(|| {
        Error::Validation(format!("hull has {} vertices, asked for {vertex}", hull.len()))
    })
}

/// Largest pairwise distance, taken over the hull vertices.
pub fn diameter(points: &[Point], hull: &HullInfo) -> f64 {
    let vs: Vec<Point> = hull.vertices.iter().map(|&i| points[i]).collect();
    let mut best = 0.0f64;
    for (i, a) in vs.iter().enumerate() {
        for b in &vs[i + 1..] {
            best = best.max(norm(sub(*a, *b)));
        }
    }
    best
}

/// `n` points i.i.d. uniform on the square `[0, side]^2`.
pub fn uniform_square(rng: &mut SimRng, n: usize, side: f64) -> Vec<Point> {
    (0..n)
        .map(|_| [rng.random::<f64>() * side, rng.random::<f64>() * side])
        .collect()
}

#[derive(Debug, Clone)]
pub struct SwarmState2D {
    points: Vec<Point>,
    t: u64,
    params: WalkParams,
    coin: Coin,
    rng: SimRng,
}

impl SwarmState2D {
    pub fn new(points: &[Point], epsilon: f64, seed: u64) -> Result<Self> {
        Self::with_rng(points, WalkParams::new(epsilon)?, rng_from_seed(seed))
    }

    pub fn with_rng(points: &[Point], params: WalkParams, rng: SimRng) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Validation("swarm needs at least one agent".into()));
        }
        if points.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Validation("non-finite coordinate".into()));
        }
        Ok(SwarmState2D {
            points: points.to_vec(),
            t: 0,
            params,
            coin: Coin::new(params.epsilon()),
            rng,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn params(&self) -> WalkParams {
        self.params
    }

    pub fn centroid(&self) -> Point {
        let n = self.points.len() as f64;
        [
            fsum(self.points.iter().map(|p| p[0])) / n,
            fsum(self.points.iter().map(|p| p[1])) / n,
        ]
    }

    pub fn hull(&self) -> HullInfo {
        convex_hull(&self.points).expect("state holds finite, non-empty points")
    }

    pub fn diameter(&self) -> f64 {
        diameter(&self.points, &self.hull())
    }

    /// Moves every hull vertex one unit. Draws are taken in increasing agent
    /// index. Returns the indices that moved.
    pub fn step(&mut self) -> Result<Vec<usize>> {
        let hull = self.hull();
        let mut moves: Vec<(usize, Point)> = if hull.len() < 2 {
            Vec::new()
        } else {
            hull.vertices
                .iter()
                .zip(&hull.bisectors)
                .map(|(&i, &b)| (i, b))
                .collect()
        };
        moves.sort_by_key(|m| m.0);
        for (i, b) in &moves {
            let s = if self.coin.flip(&mut self.rng) { -1.0 } else { 1.0 };
            let p = &mut self.points[*i];
            *p = [p[0] + s * b[0], p[1] + s * b[1]];
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(Error::Validation("coordinates overflowed".into()));
            }
        }
        self.t += 1;
        Ok(moves.into_iter().map(|m| m.0).collect())
    }

    pub fn row(&self) -> TrajectoryRow2D {
        let hull = self.hull();
        let c = self.centroid();
        TrajectoryRow2D {
            t: self.t,
            cx: c[0],
            cy: c[1],
            diameter: diameter(&self.points, &hull),
            hull_count: hull.len(),
        }
    }

    /// Runs `steps` ticks, emitting a row at the start, every `stride`
    /// ticks, and after the last tick.
    pub fn run<S>(&mut self, steps: u64, stride: u64, sink: &mut S) -> Result<()>
    where
        S: TrajectorySink<TrajectoryRow2D> + ?Sized,
    {
        if steps == 0 || stride == 0 {
            return Err(Error::Validation("steps and stride must be positive".into()));
        }
        sink.push(&self.row())?;
        for i in 1..=steps {
            self.step()?;
            if i % stride == 0 || i == steps {
                sink.push(&self.row())?;
            }
        }
        Ok(())
    }
}
