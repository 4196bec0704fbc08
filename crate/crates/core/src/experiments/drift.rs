use rayon::prelude::*;
use serde::Serialize;

use super::span::split;
use super::{
    require_kind, trial_seed, uniform_placement, ExperimentDetail, ExperimentKind,
    ExperimentResult, ExperimentSpec, ResultRow,
};
use crate::analytics::WalkParams;
use crate::error::Result;
use crate::rng::derived_rng;
use crate::sim1d::{Mode, Monitor, SwarmState1D};
use crate::stats::{linear_fit, proportion_stderr, SampleStats};
use crate::sum::fsum;

/// Largest lag, in recorded samples, used for the MSD fit.
const MAX_LAGS: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DriftPoint {
    pub epsilon: f64,
    pub n: usize,
    pub s0: f64,
    pub ticks: u64,
    /// Ticks whose centroid increment was `+2/N`, `0` and `-2/N`.
    pub up: u64,
    pub zero: u64,
    pub down: u64,
    /// Per-trial least-squares slopes of the centroid MSD against lag.
    pub msd_slope: SampleStats,
    /// Same for the mean of the inner agents.
    pub core_msd_slope: SampleStats,
    /// `8 ε (1 - ε) / N^2`.
    pub msd_slope_reference: f64,
    pub incomplete: u64,
    pub monitor: Monitor,
}

impl DriftPoint {
    pub fn frequencies(&self) -> [f64; 3] {
        let t = self.ticks as f64;
        [self.up as f64 / t, self.zero as f64 / t, self.down as f64 / t]
    }

    pub fn frequency_stderrs(&self) -> [f64; 3] {
        self.frequencies().map(|p| proportion_stderr(p, self.ticks))
    }
}

struct DriftTrial {
    counts: [u64; 3],
    msd_slope: Option<f64>,
    core_msd_slope: Option<f64>,
    reached: bool,
    monitor: Monitor,
}

/// Least-squares slope of the sliding-window mean squared displacement of
/// `path` (sampled every `stride` ticks) against the lag in ticks.
pub fn msd_slope(path: &[f64], stride: u64) -> Option<f64> {
    let lags = MAX_LAGS.min(path.len() / 10);
    if lags < 2 {
        return None;
    }
    let (mut xs, mut ys) = (Vec::with_capacity(lags), Vec::with_capacity(lags));
    for lag in 1..=lags {
        let sq = path.windows(lag + 1).map(|w| {
            let d = w[lag] - w[0];
            d * d
        });
        xs.push((lag as u64 * stride) as f64);
        ys.push(fsum(sq) / (path.len() - lag) as f64);
    }
    linear_fit(&xs, &ys).map(|(m, _)| m)
}

fn drift_trial(p: WalkParams, n: usize, s0: f64, seed: u64, spec: &ExperimentSpec, ticks: u64) -> Result<DriftTrial> {
    let xs = uniform_placement(&mut derived_rng(seed, "placement", 0), n, s0);
    let mut state = SwarmState1D::with_rng(&xs, p, derived_rng(seed, "dynamics", 0), Mode::Bilateral)?;
    let g = state.run_until_gathered(spec.max_steps);
    let mut monitor = g.monitor;
    if !g.reached {
        return Ok(DriftTrial {
            counts: [0; 3],
            msd_slope: None,
            core_msd_slope: None,
            reached: false,
            monitor,
        });
    }
    state.run_observed(spec.warmup, &mut monitor, |_, _| {});

    let nf = n as f64;
    let base = state.whole_sum();
    let mut counts = [0u64; 3];
    let mut centroid = vec![0.0];
    let mut core = vec![state.core_center()];
    let mut since = 0;
    state.run_observed(ticks, &mut monitor, |s, out| {
        match out.net_displacement() {
            2 => counts[0] += 1,
            0 => counts[1] += 1,
            _ => counts[2] += 1,
        }
        since += 1;
        if since == spec.stride {
            since = 0;
            centroid.push((s.whole_sum() - base) as f64 / nf);
            core.push(s.core_center());
        }
    });
    Ok(DriftTrial {
        counts,
        msd_slope: msd_slope(&centroid, spec.stride),
        core_msd_slope: msd_slope(&core, spec.stride),
        reached: true,
        monitor,
    })
}

/// Centroid increments and mean-square displacement after gathering.
///
/// `spec.samples` post-gathering ticks in total are split across
/// `spec.trials` independent runs. Positions are recorded every
/// `spec.stride` ticks for the MSD fit.
pub fn run_centroid_drift(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    require_kind(spec, spec.kind == ExperimentKind::CentroidDrift, "run_centroid_drift")?;
    let mut points = Vec::new();
    for (gi, (e, n, s0)) in spec.grid().into_iter().enumerate() {
        let p = WalkParams::new(e)?;
        let shares: Vec<u64> = split(spec.samples, spec.trials).collect();
        let trials = shares
            .par_iter()
            .enumerate()
            .map(|(i, &m)| drift_trial(p, n, s0, trial_seed(spec.seed, gi, i as u64), spec, m))
            .collect::<Result<Vec<_>>>()?;
        let mut monitor = Monitor::default();
        let mut c = [0u64; 3];
        for t in &trials {
            monitor.merge(&t.monitor);
            for (a, b) in c.iter_mut().zip(t.counts) {
                *a += b;
            }
        }
        let slopes: Vec<f64> = trials.iter().filter_map(|t| t.msd_slope).collect();
        let core: Vec<f64> = trials.iter().filter_map(|t| t.core_msd_slope).collect();
        let nf = n as f64;
        points.push(DriftPoint {
            epsilon: e,
            n,
            s0,
            ticks: c.iter().sum(),
            up: c[0],
            zero: c[1],
            down: c[2],
            msd_slope: SampleStats::from_slice(&slopes),
            core_msd_slope: SampleStats::from_slice(&core),
            msd_slope_reference: 8.0 * e * (1.0 - e) / (nf * nf),
            incomplete: trials.iter().filter(|t| !t.reached).count() as u64,
            monitor,
        });
    }

    let mut rows = Vec::new();
    for pt in &points {
        let e = pt.epsilon;
        let q = e * (1.0 - e);
        let freqs = pt.frequencies();
        for (name, f, want) in [("up", freqs[0], q), ("zero", freqs[1], 1.0 - 2.0 * q), ("down", freqs[2], q)] {
            let stats = SampleStats {
                n: pt.ticks,
                mean: f,
                variance: f * (1.0 - f),
            };
            rows.push(ResultRow::from_stats(
                format!("centroid-drift.{name}"),
                e,
                Some(pt.n),
                Some(pt.s0),
                &stats,
                Some(want),
            ));
        }
        for (name, stats) in [("msd-slope", &pt.msd_slope), ("core-msd-slope", &pt.core_msd_slope)] {
            rows.push(ResultRow::from_stats(
                format!("centroid-drift.{name}"),
                e,
                Some(pt.n),
                Some(pt.s0),
                stats,
                Some(pt.msd_slope_reference),
            ));
        }
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        histogram: Vec::new(),
        detail: ExperimentDetail::CentroidDrift { points },
    })
}
