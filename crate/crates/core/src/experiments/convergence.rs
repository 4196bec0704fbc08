use rayon::prelude::*;
use serde::Serialize;

use super::{
    require_kind, trial_seed, uniform_placement, ExperimentDetail, ExperimentResult,
    ExperimentSpec, ResultRow,
};
use crate::analytics::{gathering_time_bound, InitialConfiguration, WalkParams};
use crate::error::Result;
use crate::rng::derived_rng;
use crate::sim1d::{Mode, Monitor, SwarmState1D};
use crate::stats::SampleStats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialOutcome {
    pub t: u64,
    pub reached: bool,
    /// Gathering bound evaluated on this trial's initial positions.
    pub bound: f64,
    pub s0_realized: f64,
    pub monitor: Monitor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergencePoint {
    pub epsilon: f64,
    pub n: usize,
    pub s0: f64,
    pub trials: Vec<TrialOutcome>,
    /// Statistics of T over the trials that gathered.
    pub t: SampleStats,
    pub mean_bound: f64,
    pub mean_s0_realized: f64,
    /// Trials that ran out of steps.
    pub incomplete: u64,
    /// Trials whose T exceeded their own bound. The bound holds in
    /// expectation, so a few of these are not an error.
    pub bound_exceeded: u64,
    pub monitor: Monitor,
}

impl ConvergencePoint {
    pub fn ratio(&self) -> f64 {
        self.mean_bound / self.t.mean
    }
}

/// Runs one gathering trial from a fresh uniform placement.
pub fn gathering_trial(p: WalkParams, n: usize, s0: f64, seed: u64, max_steps: u64) -> Result<TrialOutcome> {
    let xs = uniform_placement(&mut derived_rng(seed, "placement", 0), n, s0);
    let cfg = InitialConfiguration::new(xs.clone(), p)?;
    let bound = gathering_time_bound(&cfg)?.steps();
    let s0_realized = cfg.inner_excess().unwrap_or(0.0);
    let mut state = SwarmState1D::with_rng(&xs, p, derived_rng(seed, "dynamics", 0), Mode::Bilateral)?;
    let r = state.run_until_gathered(max_steps);
    Ok(TrialOutcome {
        t: r.t,
        reached: r.reached,
        bound,
        s0_realized,
        monitor: r.monitor,
    })
}

/// Gathering times over the spec's grid, each with the per-trial bound.
pub fn run_convergence_sweep(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    require_kind(spec, spec.kind.is_convergence(), "run_convergence_sweep")?;
    let mut points = Vec::new();
    for (gi, (e, n, s0)) in spec.grid().into_iter().enumerate() {
        let p = WalkParams::new(e)?;
        let trials = (0..spec.trials)
            .into_par_iter()
            .map(|i| gathering_trial(p, n, s0, trial_seed(spec.seed, gi, i), spec.max_steps))
            .collect::<Result<Vec<_>>>()?;
        let done: Vec<&TrialOutcome> = trials.iter().filter(|t| t.reached).collect();
        let ts: Vec<f64> = done.iter().map(|t| t.t as f64).collect();
        let bounds: Vec<f64> = done.iter().map(|t| t.bound).collect();
        let s0r: Vec<f64> = trials.iter().map(|t| t.s0_realized).collect();
        let mut monitor = Monitor::default();
        for t in &trials {
            monitor.merge(&t.monitor);
        }
        points.push(ConvergencePoint {
            epsilon: e,
            n,
            s0,
            t: SampleStats::from_slice(&ts),
            mean_bound: SampleStats::from_slice(&bounds).mean,
            mean_s0_realized: SampleStats::from_slice(&s0r).mean,
            incomplete: trials.iter().filter(|t| !t.reached).count() as u64,
            bound_exceeded: done.iter().filter(|t| t.t as f64 > t.bound).count() as u64,
            monitor,
            trials,
        });
    }
    let rows = points
        .iter()
        .map(|pt| {
            ResultRow::from_stats(
                spec.kind.name(),
                pt.epsilon,
                Some(pt.n),
                Some(pt.s0),
                &pt.t,
                Some(pt.mean_bound),
            )
        })
        .collect();
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        histogram: Vec::new(),
        detail: ExperimentDetail::Convergence { points },
    })
}
