//! Monte Carlo studies of the gathering process: convergence-time sweeps
//! with their theoretical bounds, the long-run span distribution, centroid
//! drift after gathering, and checks of the single-walk facts.
//!
//! Every random draw descends from `spec.seed` through [`derive_seed`], one
//! stream per (grid point, trial), and trials are collected in index order.
//! Results therefore do not depend on thread count or scheduling.

mod convergence;
mod drift;
mod output;
mod span;
mod walk;

use std::path::PathBuf;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::analytics::{min_fractional_distance, WalkParams};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SimRng};
use crate::stats::SampleStats;

pub use convergence::{run_convergence_sweep, ConvergencePoint, TrialOutcome};
pub use drift::{run_centroid_drift, DriftPoint};
pub use output::{histogram_path, read_csv_rows, write_results, OutputFormat, Table};
pub use span::{run_span_distribution, SpanBin, SpanPoint};
pub use walk::{run_walk_validation, WalkPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ConvergenceVsEpsilon,
    #[serde(rename = "convergence-vs-S0")]
    ConvergenceVsS0,
    #[serde(rename = "convergence-vs-N")]
    ConvergenceVsN,
    SpanDistribution,
    CentroidDrift,
    WalkValidation,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ConvergenceVsEpsilon => "convergence-vs-epsilon",
            ExperimentKind::ConvergenceVsS0 => "convergence-vs-S0",
            ExperimentKind::ConvergenceVsN => "convergence-vs-N",
            ExperimentKind::SpanDistribution => "span-distribution",
            ExperimentKind::CentroidDrift => "centroid-drift",
            ExperimentKind::WalkValidation => "walk-validation",
        }
    }

    pub fn is_convergence(self) -> bool {
        matches!(
            self,
            ExperimentKind::ConvergenceVsEpsilon
                | ExperimentKind::ConvergenceVsS0
                | ExperimentKind::ConvergenceVsN
        )
    }
}

impl std::str::FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.to_string()))
            .map_err(|_| Error::Validation(format!("unknown experiment kind {s:?}")))
    }
}

fn default_max_steps() -> u64 {
    10_000_000
}

fn default_stride() -> u64 {
    10
}

fn default_warmup() -> u64 {
    1_000
}

fn default_samples() -> u64 {
    100_000
}

/// One experiment, as read from a JSON config.
///
/// The grid is the Cartesian product of `epsilons`, `ns` and `s0s`; the
/// walk validation ignores `ns` and `s0s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub epsilons: Vec<f64>,
    #[serde(default)]
    pub ns: Vec<usize>,
    #[serde(default, rename = "s0s")]
    pub s0s: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    /// Ticks to discard after gathering (span and drift) or before sampling
    /// (reflected chain).
    #[serde(default = "default_warmup")]
    pub warmup: u64,
    /// Post-gathering samples in total, split across trials (span and
    /// drift), or reflected-chain states (walk validation).
    #[serde(default = "default_samples")]
    pub samples: u64,
    /// Ticks between recorded span samples.
    #[serde(default = "default_stride")]
    pub stride: u64,
    /// Directory for the result files.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind, epsilons: Vec<f64>, ns: Vec<usize>, s0s: Vec<f64>) -> Self {
        ExperimentSpec {
            kind,
            epsilons,
            ns,
            s0s,
            trials: 100,
            seed: 0,
            max_steps: default_max_steps(),
            warmup: default_warmup(),
            samples: default_samples(),
            stride: default_stride(),
            output: None,
            format: OutputFormat::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if self.trials < 2 {
            return bad(format!("trials must be at least 2, got {}", self.trials));
        }
        if self.epsilons.is_empty() {
            return bad("epsilon grid is empty".into());
        }
        for &e in &self.epsilons {
            WalkParams::new(e)?;
        }
        if self.stride == 0 {
            return bad("stride must be positive".into());
        }
        match self.kind {
            ExperimentKind::WalkValidation => {
                if self.samples < 100 {
                    return bad("walk validation needs at least 100 chain samples".into());
                }
            }
            k => {
                if self.ns.is_empty() || self.s0s.is_empty() {
                    return bad(format!("{} needs non-empty ns and s0s", k.name()));
                }
                if let Some(n) = self.ns.iter().find(|&&n| n < 4) {
                    return bad(format!("gathering experiments need N >= 4, got {n}"));
                }
                if let Some(s) = self.s0s.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
                    return bad(format!("S0 must be finite and non-negative, got {s}"));
                }
                if k == ExperimentKind::CentroidDrift && self.epsilons.contains(&0.0) {
                    return bad("centroid drift needs epsilon > 0".into());
                }
                if matches!(k, ExperimentKind::SpanDistribution | ExperimentKind::CentroidDrift)
                    && self.samples < 100
                {
                    return bad("need at least 100 post-gathering samples".into());
                }
            }
        }
        Ok(())
    }

    /// Grid points in a fixed order: epsilon outermost, then N, then S0.
    pub fn grid(&self) -> Vec<(f64, usize, f64)> {
        let mut g = Vec::new();
        for &e in &self.epsilons {
            for &n in &self.ns {
                for &s in &self.s0s {
                    g.push((e, n, s));
                }
            }
        }
        g
    }
}

/// Seed of trial `trial` at grid point `point`.
pub fn trial_seed(seed: u64, point: usize, trial: u64) -> u64 {
    derive_seed(derive_seed(seed, "grid-point", point as u64), "trial", trial)
}

/// `n` sorted positions i.i.d. uniform on `[0, 1 + s0 + 2]`, redrawn until
/// all fractional parts are distinct.
pub fn uniform_placement(rng: &mut SimRng, n: usize, s0: f64) -> Vec<f64> {
    let len = 1.0 + s0 + 2.0;
    loop {
        let mut xs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * len).collect();
        xs.sort_by(f64::total_cmp);
        if min_fractional_distance(&xs).is_ok() {
            return xs;
        }
    }
}

/// One line of the fixed-column result table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub kind: String,
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    #[serde(rename = "S0")]
    pub s0: Option<f64>,
    pub trials: u64,
    pub mean: f64,
    pub stddev: f64,
    pub stderr: f64,
    pub bound: Option<f64>,
    pub ratio: Option<f64>,
}

impl ResultRow {
    pub(crate) fn from_stats(
        kind: impl Into<String>,
        epsilon: f64,
        n: Option<usize>,
        s0: Option<f64>,
        stats: &SampleStats,
        bound: Option<f64>,
    ) -> Self {
        ResultRow {
            kind: kind.into(),
            epsilon,
            n,
            s0,
            trials: stats.n,
            mean: stats.mean,
            stddev: stats.stddev(),
            stderr: stats.stderr(),
            bound,
            ratio: bound.map(|b| b / stats.mean),
        }
    }
}

/// Long-format histogram line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub epsilon: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub k: u64,
    /// Samples with `k <= span < k + 1`.
    pub count: u64,
    /// Empirical `P(span >= k)`.
    pub empirical_p: f64,
    /// Stationary bound on `P(span >= k)`; absent for `k < 2`.
    pub bound_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentDetail {
    Convergence { points: Vec<ConvergencePoint> },
    SpanDistribution { points: Vec<SpanPoint> },
    CentroidDrift { points: Vec<DriftPoint> },
    WalkValidation { points: Vec<WalkPoint> },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub rows: Vec<ResultRow>,
    pub histogram: Vec<HistogramRow>,
    pub detail: ExperimentDetail,
}

impl ExperimentResult {
    /// True when some grid point had a trial run out of steps.
    pub fn incomplete(&self) -> bool {
        match &self.detail {
            ExperimentDetail::Convergence { points } => points.iter().any(|p| p.incomplete > 0),
            ExperimentDetail::SpanDistribution { points } => points.iter().any(|p| p.incomplete > 0),
            ExperimentDetail::CentroidDrift { points } => points.iter().any(|p| p.incomplete > 0),
            ExperimentDetail::WalkValidation { .. } => false,
        }
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    match spec.kind {
        k if k.is_convergence() => run_convergence_sweep(spec),
        ExperimentKind::SpanDistribution => run_span_distribution(spec),
        ExperimentKind::CentroidDrift => run_centroid_drift(spec),
        _ => run_walk_validation(spec),
    }
}

fn require_kind(spec: &ExperimentSpec, ok: bool, op: &'static str) -> Result<()> {
    spec.validate()?;
    if ok {
        Ok(())
    } else {
        Err(Error::domain(op, format!("cannot run a {} spec", spec.kind.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trips_and_defaults() {
        let text = r#"{"kind":"convergence-vs-S0","epsilons":[0.1],"ns":[10],"s0s":[5],"trials":3,"seed":9}"#;
        let spec: ExperimentSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec.kind, ExperimentKind::ConvergenceVsS0);
        assert_eq!(spec.max_steps, 10_000_000);
        assert_eq!(spec.stride, 10);
        let back: ExperimentSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<ExperimentSpec>(r#"{"kind":"x","epsilons":[],"trials":2,"seed":1}"#).is_err());
        assert!(serde_json::from_str::<ExperimentSpec>(&text.replace("\"seed\"", "\"bogus\":1,\"seed\"")).is_err());
        assert_eq!("convergence-vs-N".parse::<ExperimentKind>().unwrap(), ExperimentKind::ConvergenceVsN);
    }

    #[test]
    fn validation() {
        let mut s = ExperimentSpec::new(ExperimentKind::ConvergenceVsEpsilon, vec![0.1], vec![10], vec![5.0]);
        assert!(s.validate().is_ok());
        s.trials = 1;
        assert!(s.validate().is_err());
        s.trials = 2;
        s.ns = vec![3];
        assert!(s.validate().is_err());
        s.ns = vec![4];
        s.epsilons = vec![0.5];
        assert!(s.validate().is_err());
        let mut d = ExperimentSpec::new(ExperimentKind::CentroidDrift, vec![0.0], vec![10], vec![5.0]);
        assert!(d.validate().is_err());
        d.epsilons = vec![0.1];
        assert!(d.validate().is_ok());
    }

    #[test]
    fn placement_stays_in_interval() {
        let mut rng = crate::rng::rng_from_seed(3);
        let xs = uniform_placement(&mut rng, 50, 20.0);
        assert_eq!(xs.len(), 50);
        assert!(xs.windows(2).all(|w| w[0] <= w[1]));
        assert!(xs[0] >= 0.0 && xs[49] < 23.0);
    }

    #[test]
    fn trial_seeds_differ() {
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 0, 1));
        assert_ne!(trial_seed(1, 0, 0), trial_seed(1, 1, 0));
        assert_eq!(trial_seed(1, 2, 3), trial_seed(1, 2, 3));
    }
}
