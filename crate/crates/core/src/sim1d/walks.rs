//! Single-walker simulators for the biased ±1 walk and the reflected chain.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::{stationary_pi, WalkParams};
use crate::error::{Error, Result};
use crate::rng::{derived_rng, rng_from_seed, Coin, SimRng};
use crate::stats::{proportion_stderr, SampleStats};
use crate::sum::fsum;

/// Per-trial step budget for first-passage walks.
pub const WALK_STEP_CAP: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FirstPassage {
    pub steps: u64,
    /// Largest position visited before hitting -1 (the walk starts at 0).
    pub max_excursion: i64,
}

/// Runs one walk from 0 that steps +1 w.p. ε and -1 otherwise, until it
/// hits -1. `None` if `cap` steps pass first.
pub fn first_passage(coin: &Coin, rng: &mut SimRng, cap: u64) -> Option<FirstPassage> {
    let (mut x, mut max, mut steps) = (0i64, 0i64, 0u64);
    while x > -1 {
        if steps == cap {
            return None;
        }
        x += if coin.flip(rng) { 1 } else { -1 };
        max = max.max(x);
        steps += 1;
    }
    Some(FirstPassage {
        steps,
        max_excursion: max,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstPassageStats {
    pub steps: SampleStats,
    pub max_excursion: SampleStats,
}

/// Monte Carlo estimate of the time to first hit -1 and of the farthest
/// excursion to the right on the way. Trials run in parallel on independent
/// derived streams; the result does not depend on the thread count.
pub fn simulate_walk_first_passage(p: WalkParams, seed: u64, trials: u64) -> Result<FirstPassageStats> {
    if trials == 0 {
        return Err(Error::Validation("need at least one trial".into()));
    }
    let coin = Coin::new(p.epsilon());
    let runs = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived_rng(seed, "walk-first-passage", i);
            first_passage(&coin, &mut rng, WALK_STEP_CAP).ok_or(Error::StepCapExceeded {
                cap: WALK_STEP_CAP,
                trial: i,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let steps: Vec<f64> = runs.iter().map(|r| r.steps as f64).collect();
    let exc: Vec<f64> = runs.iter().map(|r| r.max_excursion as f64).collect();
    Ok(FirstPassageStats {
        steps: SampleStats::from_slice(&steps),
        max_excursion: SampleStats::from_slice(&exc),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
}

/// Fraction of walks from 0 that reach `+1` before `-floor`.
pub fn simulate_hit_before(p: WalkParams, seed: u64, trials: u64, floor: i64) -> Result<HitEstimate> {
    if trials == 0 || floor < 1 {
        return Err(Error::Validation(format!(
            "need trials >= 1 and floor >= 1, got {trials} and {floor}"
        )));
    }
    let coin = Coin::new(p.epsilon());
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = derived_rng(seed, "walk-hit-before", i);
            let mut x = 0i64;
            while x > -floor && x < 1 {
                x += if coin.flip(&mut rng) { 1 } else { -1 };
            }
            u64::from(x == 1)
        })
        .sum();
    let p_hat = hits as f64 / trials as f64;
    Ok(HitEstimate {
        p_hat,
        stderr: proportion_stderr(p_hat, trials),
        trials,
    })
}

/// Occupancy of the reflected chain after burn-in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReflectedChainSample {
    /// `occupancy[k - 1]` counts visits to state `k`.
    pub occupancy: Vec<u64>,
    pub samples: u64,
    /// Mean state with a batch-means standard error.
    pub mean: SampleStats,
}

impl ReflectedChainSample {
    pub fn empirical(&self, k: u64) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.occupancy.get(k as usize - 1).copied().unwrap_or(0) as f64 / self.samples as f64
    }

    /// Total-variation distance to the stationary law over states
    /// `1..=kmax`, with everything above `kmax` lumped into one cell.
    pub fn tv_distance(&self, p: WalkParams, kmax: u64) -> Result<f64> {
        let mut diffs = Vec::with_capacity(kmax as usize + 1);
        let (mut emp_head, mut pi_head) = (Vec::new(), Vec::new());
        for k in 1..=kmax {
            let (e, q) = (self.empirical(k), stationary_pi(p, k)?);
            diffs.push((e - q).abs());
            emp_head.push(e);
            pi_head.push(q);
        }
        let emp_tail = (1.0 - fsum(emp_head)).max(0.0);
        let pi_tail = (1.0 - fsum(pi_head)).max(0.0);
        diffs.push((emp_tail - pi_tail).abs());
        Ok(0.5 * fsum(diffs))
    }
}

const CHAIN_BATCHES: u64 = 100;

/// Simulates the chain `k -> k + 1` w.p. ε and `k -> max(1, k - 1)`
/// otherwise, started at 1. After `burn_in` ticks, records `samples`
/// consecutive states.
pub fn simulate_reflected_chain(
    p: WalkParams,
    seed: u64,
    burn_in: u64,
    samples: u64,
) -> Result<ReflectedChainSample> {
    if samples < CHAIN_BATCHES {
        return Err(Error::Validation(format!(
            "need at least {CHAIN_BATCHES} samples, got {samples}"
        )));
    }
    let coin = Coin::new(p.epsilon());
    let mut rng = rng_from_seed(seed);
    let mut k: u64 = 1;
    let tick = |k: &mut u64, rng: &mut SimRng| {
        if coin.flip(rng) {
            *k += 1;
        } else if *k > 1 {
            *k -= 1;
        }
    };
    for _ in 0..burn_in {
        tick(&mut k, &mut rng);
    }
    let batch = samples / CHAIN_BATCHES;
    let mut occupancy = vec![0u64; 64];
    let mut batch_means = Vec::with_capacity(CHAIN_BATCHES as usize);
    let mut acc = 0u64;
    for i in 0..samples {
        tick(&mut k, &mut rng);
        if k as usize > occupancy.len() {
            occupancy.resize(k as usize * 2, 0);
        }
        occupancy[k as usize - 1] += 1;
        acc += k;
        if (i + 1) % batch == 0 && batch_means.len() < CHAIN_BATCHES as usize {
            batch_means.push(acc as f64 / batch as f64);
            acc = 0;
        }
    }
    while occupancy.len() > 1 && occupancy[occupancy.len() - 1] == 0 {
        occupancy.pop();
    }
    let mut mean = SampleStats::from_slice(&batch_means);
    let total: u64 = occupancy.iter().enumerate().map(|(i, c)| (i as u64 + 1) * c).sum();
    mean.mean = total as f64 / samples as f64;
    Ok(ReflectedChainSample {
        occupancy,
        samples,
        mean,
    })
}
