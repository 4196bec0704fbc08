use serde::Serialize;

use super::{require_kind, ExperimentDetail, ExperimentKind, ExperimentResult, ExperimentSpec, ResultRow};
use crate::analytics::{
    expected_steps_to_minus_one, farthest_excursion_bound, finite_chain_oracle,
    prob_hit_plus_one, stationary_mean, WalkParams,
};
use crate::error::Result;
use crate::rng::derive_seed;
use crate::sim1d::{
    simulate_hit_before, simulate_reflected_chain, simulate_walk_first_passage,
    FirstPassageStats, HitEstimate,
};
use crate::stats::SampleStats;

/// Floors `-M` for the hit-before estimates.
pub const HIT_FLOORS: [i64; 2] = [10, 50];
/// States compared in the total-variation check.
pub const TV_STATES: u64 = 30;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HitCheck {
    pub floor: i64,
    pub simulated: HitEstimate,
    /// Exact probability from the absorbing-chain solve.
    pub exact: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WalkPoint {
    pub epsilon: f64,
    pub first_passage: FirstPassageStats,
    pub hits: Vec<HitCheck>,
    /// `ε / (1 - ε)`, the limit of the hit probabilities as the floor recedes.
    pub hit_limit: f64,
    pub chain_mean: SampleStats,
    pub chain_tv: f64,
    pub chain_samples: u64,
}

/// Simulated first-passage, hit and reflected-chain statistics beside
/// their closed forms, one block per epsilon.
pub fn run_walk_validation(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    require_kind(spec, spec.kind == ExperimentKind::WalkValidation, "run_walk_validation")?;
    let mut points = Vec::new();
    for (i, &e) in spec.epsilons.iter().enumerate() {
        let p = WalkParams::new(e)?;
        let idx = i as u64;
        let first_passage = simulate_walk_first_passage(p, derive_seed(spec.seed, "first-passage", idx), spec.trials)?;
        let hits = HIT_FLOORS
            .iter()
            .map(|&m| {
                let simulated = simulate_hit_before(p, derive_seed(spec.seed, "hit-before", idx * 1000 + m as u64), spec.trials, m)?;
                let exact = finite_chain_oracle(p, 1, -m)?.prob_right();
                Ok(HitCheck {
                    floor: m,
                    simulated,
                    exact,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let chain = simulate_reflected_chain(p, derive_seed(spec.seed, "reflected-chain", idx), spec.warmup, spec.samples)?;
        points.push(WalkPoint {
            epsilon: e,
            first_passage,
            hits,
            hit_limit: prob_hit_plus_one(p),
            chain_mean: chain.mean,
            chain_tv: chain.tv_distance(p, TV_STATES)?,
            chain_samples: chain.samples,
        });
    }

    let mut rows = Vec::new();
    for pt in &points {
        let p = WalkParams::new(pt.epsilon)?;
        let e = pt.epsilon;
        rows.push(ResultRow::from_stats(
            "walk-validation.steps",
            e,
            None,
            None,
            &pt.first_passage.steps,
            Some(expected_steps_to_minus_one(p)),
        ));
        rows.push(ResultRow::from_stats(
            "walk-validation.excursion",
            e,
            None,
            None,
            &pt.first_passage.max_excursion,
            Some(farthest_excursion_bound(p)),
        ));
        for h in &pt.hits {
            let f = h.simulated.p_hat;
            let stats = SampleStats {
                n: h.simulated.trials,
                mean: f,
                variance: f * (1.0 - f),
            };
            rows.push(ResultRow::from_stats(
                format!("walk-validation.hit-before-{}", h.floor),
                e,
                None,
                None,
                &stats,
                Some(h.exact),
            ));
        }
        rows.push(ResultRow::from_stats(
            "walk-validation.chain-mean",
            e,
            None,
            None,
            &pt.chain_mean,
            Some(stationary_mean(p)),
        ));
        rows.push(ResultRow {
            kind: "walk-validation.chain-tv".into(),
            epsilon: e,
            n: None,
            s0: None,
            trials: pt.chain_samples,
            mean: pt.chain_tv,
            stddev: f64::NAN,
            stderr: f64::NAN,
            bound: None,
            ratio: None,
        });
    }
    Ok(ExperimentResult {
        spec: spec.clone(),
        rows,
        histogram: Vec::new(),
        detail: ExperimentDetail::WalkValidation { points },
    })
}
