use rayon::prelude::*;
use serde::Serialize;

use super::{
    require_kind, trial_seed, uniform_placement, ExperimentDetail, ExperimentKind,
    ExperimentResult, ExperimentSpec, HistogramRow, ResultRow,
};
use crate::analytics::{markov_span_bound, tail_prob_sum, WalkParams};
use crate::error::Result;
use crate::rng::derived_rng;
use crate::sim1d::{Mode, Monitor, SwarmState1D};
use crate::stats::{batch_means, linear_fit, SampleStats};

const BATCHES: usize = 100;
/// Smallest tail count used in the semi-log slope fit.
const FIT_MIN_COUNT: u64 = 100;
/// First `k` used in the slope fit; below it the core width still matters.
const FIT_FIRST_K: u64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpanBin {
    pub k: u64,
    /// Samples with `k <= span < k + 1`.
    pub count: u64,
    /// Samples with `span >= k`.
    pub tail_count: u64,
    pub empirical_p: f64,
    /// Batch-means standard error of `empirical_p`.
    pub stderr: f64,
    pub bound_p: Option<f64>,
    pub markov_p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpanPoint {
    pub epsilon: f64,
    pub n: usize,
    pub s0: f64,
    pub samples: u64,
    pub bins: Vec<SpanBin>,
    /// Batch-means statistics of the sampled span.
    pub span: SampleStats,
    /// Least-squares slope of `ln P(span >= k)` against `k`.
    pub slope: Option<f64>,
    /// `ln(ε / (1 - ε))`.
    pub slope_reference: f64,
    pub incomplete: u64,
    pub monitor: Monitor,
}

impl SpanPoint {
    pub fn bin(&self, k: u64) -> Option<&SpanBin> {
        self.bins.iter().find(|b| b.k == k)
    }
}

/// Splits `total` into `parts` near-equal shares, larger shares first.
pub(crate) fn split(total: u64, parts: u64) -> impl Iterator<Item = u64> {
    (0..parts).map(move |i| total / parts + u64::from(i < total % parts))
}

struct Chain {
    spans: Vec<f64>,
    reached: bool,
    monitor: Monitor,
}

fn span_chain(p: WalkParams, n: usize, s0: f64, seed: u64, spec: &ExperimentSpec, samples: u64) -> Result<Chain> {
    let xs = uniform_placement(&mut derived_rng(seed, "placement", 0), n, s0);
    let mut state = SwarmState1D::with_rng(&xs, p, derived_rng(seed, "dynamics", 0), Mode::Bilateral)?;
    let g = state.run_until_gathered(spec.max_steps);
    let mut monitor = g.monitor;
    if !g.reached {
        return Ok(Chain {
            spans: Vec::new(),
            reached: false,
            monitor,
        });
    }
    state.run_observed(spec.warmup, &mut monitor, |_, _| {});
    let mut spans = Vec::with_capacity(samples as usize);
    for _ in 0..samples {
        state.run_observed(spec.stride, &mut monitor, |_, _| {});
        spans.push(state.total_span());
    }
    Ok(Chain {
        spans,
        reached: true,
        monitor,
    })
}

/// Long-run distribution of the total span after gathering.
///
/// `spec.samples` spans are taken in total, split across `spec.trials`
/// independent runs, one every `spec.stride` ticks after a warm-up of
/// `spec.warmup` ticks past the gathering time.
pub fn run_span_distribution(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    require_kind(spec, spec.kind == ExperimentKind::SpanDistribution, "run_span_distribution")?;
    let mut points = Vec::new();
    for (gi, (e, n, s0)) in spec.grid().into_iter().enumerate() {
        let p = WalkParams::new(e)?;
        let shares: Vec<u64> = split(spec.samples, spec.trials).collect();
        let chains = shares
            .par_iter()
            .enumerate()
            .map(|(i, &m)| span_chain(p, n, s0, trial_seed(spec.seed, gi, i as u64), spec, m))
            .collect::<Result<Vec<_>>>()?;
        let mut monitor = Monitor::default();
        for c in &chains {
            monitor.merge(&c.monitor);
        }
        let incomplete = chains.iter().filter(|c| !c.reached).count() as u64;
        let spans: Vec<f64> = chains.into_iter().flat_map(|c| c.spans).collect();
        points.push(summarize(p, n, s0, &spans, incomplete, monitor)?);
    }

    let mut rows = Vec::new();
    let mut histogram = Vec::new();
    for pt in &points {
        let rough = 1.0 + 2.0 * pt.epsilon / (1.0 - 2.0 * pt.epsilon);
        rows.push(ResultRow::from_stats(
            "span-distribution.span",
            pt.epsilon,
            Some(pt.n),
            Some(pt.s0),
            &pt.span,
            Some(rough),
        ));
        if let Some(slope) = pt.slope {
            rows.push(ResultRow {
                kind: "span-distribution.log-slope".into(),
                epsilon: pt.epsilon,
                n: Some(pt.n),
                s0: Some(pt.s0),
                trials: pt.samples,
                mean: slope,
                stddev: f64::NAN,
                stderr: f64::NAN,
                bound: Some(pt.slope_reference),
                ratio: Some(pt.slope_reference / slope),
            });
        }
        for b in &pt.bins {
            histogram.push(HistogramRow {
                epsilon: pt.epsilon,
                n: pt.n,
                k: b.k,
                count: b.count,
                empirical_p: b.empirical_p,
                bound_p: b.bound_p,
            });
        }
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        histogram,
        detail: ExperimentDetail::SpanDistribution { points },
    })
}

fn summarize(
    p: WalkParams,
    n: usize,
    s0: f64,
    spans: &[f64],
    incomplete: u64,
    monitor: Monitor,
) -> Result<SpanPoint> {
    let total = spans.len() as u64;
    let kmax = spans.iter().fold(0.0f64, |m, &s| m.max(s)).floor() as u64;
    let mut counts = vec![0u64; kmax as usize + 1];
    for &s in spans {
        counts[s.floor() as usize] += 1;
    }
    let mut bins = Vec::with_capacity(counts.len());
    let mut tail = total;
    for (k, &count) in counts.iter().enumerate() {
        let k = k as u64;
        let kf = k as f64;
        let indicator: Vec<f64> = spans.iter().map(|&s| f64::from(u8::from(s >= kf))).collect();
        let se = if total as usize >= BATCHES {
            batch_means(&indicator, BATCHES).stderr()
        } else {
            f64::NAN
        };
        bins.push(SpanBin {
            k,
            count,
            tail_count: tail,
            empirical_p: tail as f64 / total as f64,
            stderr: se,
            bound_p: if k >= 2 { Some(tail_prob_sum(p, k)?) } else { None },
            markov_p: if k >= 1 { Some(markov_span_bound(p, kf)?) } else { None },
        });
        tail -= count;
    }

    let fit: Vec<(f64, f64)> = bins
        .iter()
        .filter(|b| b.k >= FIT_FIRST_K && b.tail_count >= FIT_MIN_COUNT)
        .map(|b| (b.k as f64, b.empirical_p.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = fit.into_iter().unzip();
    let slope = linear_fit(&xs, &ys).map(|(m, _)| m);

    let span = if spans.len() >= BATCHES {
        batch_means(spans, BATCHES)
    } else {
        SampleStats::from_slice(spans)
    };
    Ok(SpanPoint {
        epsilon: p.epsilon(),
        n,
        s0,
        samples: total,
        bins,
        span: SampleStats {
            mean: SampleStats::from_slice(spans).mean,
            ..span
        },
        slope,
        slope_reference: p.ratio().ln(),
        incomplete,
        monitor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_is_exact() {
        assert_eq!(split(10, 3).collect::<Vec<_>>(), vec![4, 3, 3]);
        assert_eq!(split(10, 3).sum::<u64>(), 10);
    }

    #[test]
    fn histogram_from_known_spans() {
        let p = WalkParams::new(0.1).unwrap();
        let spans = [0.5, 1.2, 1.9, 2.0, 3.7];
        let pt = summarize(p, 10, 5.0, &spans, 0, Monitor::default()).unwrap();
        let counts: Vec<u64> = pt.bins.iter().map(|b| b.count).collect();
        assert_eq!(counts, vec![1, 2, 1, 1]);
        assert_eq!(pt.bin(2).unwrap().empirical_p, 0.4);
        assert_eq!(pt.bin(0).unwrap().empirical_p, 1.0);
        assert_eq!(pt.bin(1).unwrap().bound_p, None);
        assert!(pt.bin(3).unwrap().bound_p.is_some());
    }

    #[test]
    fn small_run_respects_tail_bound() {
        let mut spec = ExperimentSpec::new(ExperimentKind::SpanDistribution, vec![0.1], vec![12], vec![6.0]);
        spec.trials = 4;
        spec.samples = 40_000;
        spec.seed = 17;
        let r = run_span_distribution(&spec).unwrap();
        let ExperimentDetail::SpanDistribution { points } = &r.detail else { panic!() };
        let pt = &points[0];
        assert_eq!(pt.samples, 40_000);
        assert_eq!(pt.incomplete, 0);
        assert_eq!(pt.monitor.total(), 0);
        for b in pt.bins.iter().filter(|b| b.k >= 3) {
            assert!(b.empirical_p <= b.bound_p.unwrap() + 3.0 * b.stderr, "{b:?}");
        }
        assert_eq!(r.histogram.len(), pt.bins.len());
    }
}
