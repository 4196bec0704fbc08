//! The one-dimensional erratic-extremist process.
//!
//! Agents sit on the real line, kept sorted. Each tick only the extremists
//! move: the leftmost jumps +1 with probability `1 - ε` and -1 with
//! probability `ε`, the rightmost mirror-wise. Both draw independently in the
//! same tick, left first. Everyone else stays put.
//!
//! Conventions where the rule alone is ambiguous:
//!
//! * a single agent never moves;
//! * two agents are both extremists and both move;
//! * when several agents share an extreme position only one of them moves,
//!   the one with the lowest index in the sorted vector. If every agent shares
//!   one point, the left mover is index 0 and the right mover index 1.
//!
//! Agent identity is not tracked across ticks; [`StepOutcome`] reports
//! indices into the vector as it was before the tick.

mod opinion;
mod walks;

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

pub use opinion::{Opinion, MAX_ABS_POSITION};
pub use walks::{
    first_passage, simulate_hit_before, simulate_reflected_chain, simulate_walk_first_passage,
    FirstPassage, FirstPassageStats, HitEstimate, ReflectedChainSample, WALK_STEP_CAP,
};

use crate::analytics::WalkParams;
use crate::error::{Error, Result};
use crate::rng::{rng_from_seed, Coin, SimRng};
use crate::sum::fsum;
use crate::trajectory::{TrajectoryRow, TrajectorySink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Both extremists move every tick.
    Bilateral,
    /// Only the rightmost agent moves; it sweeps the group to the left.
    UnilateralRight,
    /// Only the leftmost agent moves.
    UnilateralLeft,
}

impl Mode {
    fn left_moves(self) -> bool {
        matches!(self, Mode::Bilateral | Mode::UnilateralLeft)
    }

    fn right_moves(self) -> bool {
        matches!(self, Mode::Bilateral | Mode::UnilateralRight)
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bilateral" => Ok(Mode::Bilateral),
            "unilateral-right" => Ok(Mode::UnilateralRight),
            "unilateral-left" => Ok(Mode::UnilateralLeft),
            other => Err(Error::Validation(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Move {
    /// Index in the sorted vector before the tick.
    pub index: usize,
    /// +1 or -1.
    pub direction: i8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StepOutcome {
    pub moved: ArrayVec<Move, 2>,
}

impl StepOutcome {
    /// Net displacement of the position sum, in units.
    pub fn net_displacement(&self) -> i64 {
        self.moved.iter().map(|m| i64::from(m.direction)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub centroid: f64,
    /// Mean squared deviation from the current centroid.
    pub variance: f64,
    pub core_span: f64,
    pub total_span: f64,
}

/// Counts of invariant violations observed by [`SwarmState1D::step_monitored`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Monitor {
    /// Ticks where a core already within one unit spread beyond it.
    pub regathering_violations: u64,
    /// Ticks before gathering where `x_2` decreased or `x_{N-1}` increased.
    pub monotonicity_violations: u64,
    pub ticks: u64,
}

impl Monitor {
    pub fn total(&self) -> u64 {
        self.regathering_violations + self.monotonicity_violations
    }

    pub fn merge(&mut self, other: &Monitor) {
        self.regathering_violations += other.regathering_violations;
        self.monotonicity_violations += other.monotonicity_violations;
        self.ticks += other.ticks;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GatheringResult {
    /// First tick at which `x_{N-1} - x_2 <= 1`, or the tick count when the
    /// budget ran out.
    pub t: u64,
    pub reached: bool,
    pub monitor: Monitor,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepResult {
    /// Ticks until the beacon first became the extreme agent on the moving side.
    pub t: u64,
    pub finished: bool,
    /// Jumps that carried an agent across the beacon.
    pub crossings: u64,
    /// Every non-beacon agent ends within one unit of the beacon on the far side.
    pub all_within_unit: bool,
}

#[derive(Debug, Clone)]
pub struct SwarmState1D {
    positions: Vec<Opinion>,
    t: u64,
    params: WalkParams,
    coin: Coin,
    rng: SimRng,
    mode: Mode,
    distinct_fractions: bool,
}

impl SwarmState1D {
    pub fn new(positions: &[f64], epsilon: f64, seed: u64, mode: Mode) -> Result<Self> {
        Self::with_rng(positions, WalkParams::new(epsilon)?, rng_from_seed(seed), mode)
    }

    pub fn with_rng(positions: &[f64], params: WalkParams, rng: SimRng, mode: Mode) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Validation("swarm needs at least one agent".into()));
        }
        let mut ps = positions
            .iter()
            .map(|&x| Opinion::from_f64(x))
            .collect::<Result<Vec<_>>>()?;
        ps.sort();
        let mut fr: Vec<u64> = ps.iter().map(|p| p.frac().to_bits()).collect();
        fr.sort_unstable();
        let distinct_fractions = fr.windows(2).all(|w| w[0] != w[1]);
        Ok(SwarmState1D {
            positions: ps,
            t: 0,
            params,
            coin: Coin::new(params.epsilon()),
            rng,
            mode,
            distinct_fractions,
        })
    }

    pub fn positions(&self) -> &[Opinion] {
        &self.positions
    }

    pub fn values(&self) -> Vec<f64> {
        self.positions.iter().map(|p| p.value()).collect()
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn params(&self) -> WalkParams {
        self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// False when two agents share a fractional part, i.e. when agents can
    /// land on top of each other and the coincident-extremist rule applies.
    pub fn distinct_fractions(&self) -> bool {
        self.distinct_fractions
    }

    pub fn x_min(&self) -> Opinion {
        self.positions[0]
    }

    pub fn x_max(&self) -> Opinion {
        self.positions[self.positions.len() - 1]
    }

    /// Sorted bit patterns of the fractional parts. Constant over a run.
    pub fn fraction_multiset(&self) -> Vec<u64> {
        let mut fr: Vec<u64> = self.positions.iter().map(|p| p.frac().to_bits()).collect();
        fr.sort_unstable();
        fr
    }

    /// Exact sum of the integer parts.
    pub fn whole_sum(&self) -> i128 {
        self.positions.iter().map(|p| i128::from(p.whole())).sum()
    }

    /// Mean position, correctly rounded. Because unit jumps leave the exact
    /// sum unchanged whenever the two extremists move in opposite directions,
    /// the returned bits are unchanged too.
    pub fn centroid(&self) -> f64 {
        let parts = self
            .positions
            .iter()
            .flat_map(|p| [p.whole() as f64, p.frac()]);
        fsum(parts) / self.positions.len() as f64
    }

    /// Mean squared deviation from `reference`.
    pub fn variance_about(&self, reference: f64) -> f64 {
        let sq = self.positions.iter().map(|p| {
            let d = (p.whole() as f64 - reference) + p.frac();
            d * d
        });
        fsum(sq) / self.positions.len() as f64
    }

    pub fn variance(&self) -> f64 {
        self.variance_about(self.centroid())
    }

    /// `x_{N-1} - x_2` (1-based), defined as 0 for fewer than four agents.
    pub fn core_span(&self) -> f64 {
        let n = self.positions.len();
        if n < 4 {
            return 0.0;
        }
        self.positions[n - 2].minus(self.positions[1])
    }

    pub fn total_span(&self) -> f64 {
        self.x_max().minus(self.x_min())
    }

    /// Exact test of `core_span <= 1`.
    pub fn is_gathered(&self) -> bool {
        let n = self.positions.len();
        n < 4 || self.positions[n - 2].within(self.positions[1], 1)
    }

    /// Mean of the inner agents `x_2..x_{N-1}`; the centroid when `N < 3`.
    pub fn core_center(&self) -> f64 {
        let n = self.positions.len();
        if n < 3 {
            return self.centroid();
        }
        let inner = &self.positions[1..n - 1];
        fsum(inner.iter().flat_map(|p| [p.whole() as f64, p.frac()])) / inner.len() as f64
    }

    pub fn metrics(&self) -> Metrics {
        Metrics {
            centroid: self.centroid(),
            variance: self.variance(),
            core_span: self.core_span(),
            total_span: self.total_span(),
        }
    }

    /// Indices of the agents that move this tick, as `(left, right)`.
    fn movers(&self) -> (Option<usize>, Option<usize>) {
        let n = self.positions.len();
        if n < 2 {
            return (None, None);
        }
        let left = self.mode.left_moves().then_some(0);
        let right = self.mode.right_moves().then(|| {
            let max = self.x_max();
            let first = self.positions.partition_point(|p| *p < max);
            if left == Some(first) {
                first + 1
            } else {
                first
            }
        });
        (left, right)
    }

    /// Advances the process by one tick.
    pub fn step(&mut self) -> StepOutcome {
        let (left, right) = self.movers();
        let mut out = StepOutcome::default();
        let left_dir = left.map(|_| if self.coin.flip(&mut self.rng) { -1i8 } else { 1 });
        let right_dir = right.map(|_| if self.coin.flip(&mut self.rng) { 1i8 } else { -1 });

        let right_new = right.zip(right_dir).map(|(i, d)| self.positions[i].shifted(d.into()));
        let mut right_at = right;
        if let (Some(i), Some(d)) = (left, left_dir) {
            let new = self.positions[i].shifted(d.into());
            let dest = relocate(&mut self.positions, i, new);
            if let Some(r) = right_at.as_mut() {
                if i < *r && *r <= dest {
                    *r -= 1;
                } else if dest <= *r && *r < i {
                    *r += 1;
                }
            }
            out.moved.push(Move { index: i, direction: d });
        }
        if let (Some(r), Some(new)) = (right_at, right_new) {
            relocate(&mut self.positions, r, new);
            out.moved.push(Move {
                index: right.unwrap_or(r),
                direction: right_dir.unwrap_or(0),
            });
        }
        self.t += 1;
        out
    }

    /// [`step`](Self::step), counting violations of the two order invariants:
    /// a gathered core stays gathered, and before gathering `x_2` never
    /// decreases while `x_{N-1}` never increases.
    pub fn step_monitored(&mut self, monitor: &mut Monitor) -> StepOutcome {
        let n = self.positions.len();
        if n < 4 {
            monitor.ticks += 1;
            return self.step();
        }
        let was_gathered = self.is_gathered();
        let (lo, hi) = (self.positions[1], self.positions[n - 2]);
        let out = self.step();
        if was_gathered {
            if !self.is_gathered() {
                monitor.regathering_violations += 1;
            }
        } else if self.positions[1] < lo || self.positions[n - 2] > hi {
            monitor.monotonicity_violations += 1;
        }
        monitor.ticks += 1;
        out
    }

    /// Steps until the inner agents fit in a unit interval or `max_steps`
    /// ticks have been spent.
    pub fn run_until_gathered(&mut self, max_steps: u64) -> GatheringResult {
        let mut monitor = Monitor::default();
        let mut spent = 0;
        while !self.is_gathered() {
            if spent == max_steps {
                return GatheringResult {
                    t: self.t,
                    reached: false,
                    monitor,
                };
            }
            self.step_monitored(&mut monitor);
            spent += 1;
        }
        GatheringResult {
            t: self.t,
            reached: true,
            monitor,
        }
    }

    /// Runs `ticks` more ticks, calling `observe` after each one.
    pub fn run_observed<F>(&mut self, ticks: u64, monitor: &mut Monitor, mut observe: F)
    where
        F: FnMut(&SwarmState1D, &StepOutcome),
    {
        for _ in 0..ticks {
            let out = self.step_monitored(monitor);
            observe(self, &out);
        }
    }

    pub fn trajectory_row(&self) -> TrajectoryRow {
        TrajectoryRow {
            t: self.t,
            centroid: self.centroid(),
            core_span: self.core_span(),
            total_span: self.total_span(),
            x_min: self.x_min().value(),
            x_max: self.x_max().value(),
        }
    }

    /// Runs `steps` ticks, sending a row to `sink` at the start and then
    /// every `stride` ticks (and after the last tick).
    pub fn record_trajectory<S>(&mut self, steps: u64, stride: u64, sink: &mut S) -> Result<Monitor>
    where
        S: TrajectorySink<TrajectoryRow> + ?Sized,
    {
        if stride == 0 {
            return Err(Error::Validation("stride must be positive".into()));
        }
        let mut monitor = Monitor::default();
        sink.push(&self.trajectory_row())?;
        for i in 1..=steps {
            self.step_monitored(&mut monitor);
            if i % stride == 0 || i == steps {
                sink.push(&self.trajectory_row())?;
            }
        }
        Ok(monitor)
    }

    /// Steps until `stop` holds or `max_steps` ticks have been spent,
    /// recording a row at the start, every `stride` ticks, and at the end.
    /// Returns whether `stop` was reached, with the invariant monitor.
    pub fn run_recorded<S, F>(
        &mut self,
        max_steps: u64,
        stride: u64,
        sink: &mut S,
        mut stop: F,
    ) -> Result<(bool, Monitor)>
    where
        S: TrajectorySink<TrajectoryRow> + ?Sized,
        F: FnMut(&Self) -> bool,
    {
        if stride == 0 {
            return Err(Error::Validation("stride must be positive".into()));
        }
        let mut monitor = Monitor::default();
        let mut last = self.t;
        sink.push(&self.trajectory_row())?;
        let mut spent = 0;
        let mut done = stop(self);
        while !done && spent < max_steps {
            self.step_monitored(&mut monitor);
            spent += 1;
            done = stop(self);
            if spent % stride == 0 {
                sink.push(&self.trajectory_row())?;
                last = self.t;
            }
        }
        if last != self.t {
            sink.push(&self.trajectory_row())?;
        }
        Ok((done, monitor))
    }

    /// Unilateral sweep against a fixed beacon.
    ///
    /// In `UnilateralRight` mode the beacon is the leftmost agent at the
    /// start; the run ends the first tick it is the rightmost agent. In
    /// `UnilateralLeft` mode everything is mirrored. The beacon never moves
    /// before that moment, and all other agents then lie in `(x_0 - 1, x_0]`
    /// (mirrored: `[x_0, x_0 + 1)`).
    ///
    /// Requires distinct fractional parts so no agent can land on the beacon.
    pub fn run_unilateral_sweep(&mut self, max_steps: u64) -> Result<SweepResult> {
        let right = match self.mode {
            Mode::UnilateralRight => true,
            Mode::UnilateralLeft => false,
            Mode::Bilateral => {
                return Err(Error::Validation("sweep needs a unilateral mode".into()));
            }
        };
        if !self.distinct_fractions {
            return Err(Error::Degenerate(
                "sweep needs distinct fractional parts so nobody lands on the beacon".into(),
            ));
        }
        let beacon = if right { self.x_min() } else { self.x_max() };
        let done = |s: &Self| if right { s.x_max() == beacon } else { s.x_min() == beacon };
        let mut crossings = 0;
        let mut spent = 0;
        while !done(self) && spent < max_steps {
            let before = if right { self.x_max() } else { self.x_min() };
            let out = self.step();
            if let Some(m) = out.moved.first() {
                let after = before.shifted(m.direction.into());
                if (before > beacon) != (after > beacon) {
                    crossings += 1;
                }
            }
            spent += 1;
        }
        let finished = done(self);
        let all_within_unit = self.positions.iter().filter(|p| **p != beacon).all(|p| {
            if right {
                *p < beacon && p.shifted(1) > beacon
            } else {
                *p > beacon && *p < beacon.shifted(1)
            }
        });
        Ok(SweepResult {
            t: self.t,
            finished,
            crossings,
            all_within_unit,
        })
    }
}

/// Replaces `v[i]` by `new` and restores sorted order, assuming every other
/// element is already sorted. Returns the final index of `new`.
fn relocate(v: &mut [Opinion], i: usize, new: Opinion) -> usize {
    if new > v[i] {
        let j = i + v[i + 1..].partition_point(|p| *p <= new);
        v[i..=j].rotate_left(1);
        v[j] = new;
        j
    } else {
        let j = v[..i].partition_point(|p| *p <= new);
        v[j..=i].rotate_right(1);
        v[j] = new;
        j
    }
}
