//! Closed-form quantities for the biased walk and the gathering process.
//!
//! Everything here is a pure function of its arguments. The walk steps left
//! (toward the group) with probability `1 - ε` and right with probability `ε`;
//! most results are expressed through the ratio `ρ = ε / (1 - ε)` and the
//! drift `1 - 2ε`.
//!
//! Powers of `ρ` are always formed by repeated multiplication so that the
//! tail sequences are monotone in `k` even after rounding.

use crate::error::{Error, Result};

/// Bias parameter of the extremists' walk.
///
/// `epsilon` is the probability of a step away from the group and `alpha =
/// 1/2 - epsilon` the strength of the bias toward it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct WalkParams {
    epsilon: f64,
    alpha: f64,
}

impl WalkParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        Ok(WalkParams {
            epsilon,
            alpha: 0.5 - epsilon,
        })
    }

    #[inline]
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    #[inline]
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ε / (1 - ε)`, the geometric ratio of the reflected chain.
    #[inline]
    pub fn ratio(&self) -> f64 {
        self.epsilon / (1.0 - self.epsilon)
    }

    /// `1 - 2ε`, the expected inward displacement per step.
    #[inline]
    pub fn drift(&self) -> f64 {
        1.0 - 2.0 * self.epsilon
    }
}

/// Ordered starting positions of the agents together with the walk bias.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfiguration {
    positions: Vec<f64>,
    params: WalkParams,
}

impl InitialConfiguration {
    /// Positions must be finite and sorted non-decreasing.
    pub fn new(positions: Vec<f64>, params: WalkParams) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::Validation("configuration needs at least one position".into()));
        }
        if let Some(x) = positions.iter().find(|x| !x.is_finite()) {
            return Err(Error::Validation(format!("non-finite position {x}")));
        }
        if positions.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::Validation("positions must be sorted non-decreasing".into()));
        }
        Ok(InitialConfiguration { positions, params })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn params(&self) -> WalkParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `x_{N-1} - x_2 - 1`, the excess of the inner span over one unit.
    /// Defined for `N >= 4`.
    pub fn inner_excess(&self) -> Option<f64> {
        let n = self.positions.len();
        (n >= 4).then(|| self.positions[n - 2] - self.positions[1] - 1.0)
    }

    pub fn total_span(&self) -> f64 {
        self.positions[self.positions.len() - 1] - self.positions[0]
    }
}

/// `r^n` by repeated multiplication.
#[inline]
fn pow_rep(r: f64, n: u64) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= r;
        if acc == 0.0 {
            break;
        }
    }
    acc
}

/// Largest index whose Catalan number fits in a `u64`.
pub const CATALAN_MAX_INDEX: u32 = 36;

/// The `k`-th Catalan number, exactly.
///
/// Uses `C_{j+1} = C_j * 2(2j+1) / (j+2)`; the product is formed in `u128`
/// before the (always exact) division.
pub fn catalan(k: u32) -> Result<u64> {
    if k > CATALAN_MAX_INDEX {
        return Err(Error::CatalanOverflow(k));
    }
    let mut c: u128 = 1;
    for j in 0..u128::from(k) {
        c = c * 2 * (2 * j + 1) / (j + 2);
    }
    Ok(c as u64)
}

/// Probability that the walk started at 0 ever reaches -1. One for every
/// admissible `ε`.
pub fn prob_hit_minus_one(_p: WalkParams) -> f64 {
    1.0
}

/// Probability that the walk started at 0 ever reaches +1: `ε / (1 - ε)`.
///
/// The complement `(1 - 2ε) / (1 - ε)` is the probability of never getting there.
pub fn prob_hit_plus_one(p: WalkParams) -> f64 {
    p.ratio()
}

/// Expected number of steps to first reach -1: `1 / (1 - 2ε) = 1 / (2α)`.
pub fn expected_steps_to_minus_one(p: WalkParams) -> f64 {
    1.0 / p.drift()
}

/// Upper bound `ε / (1 - 2ε)` on the expected farthest rightward excursion
/// before the walk first reaches -1.
pub fn farthest_excursion_bound(p: WalkParams) -> f64 {
    p.epsilon() / p.drift()
}

/// Stationary law of the reflected chain on `{1, 2, ...}`:
/// `π(k) = ρ^(k-1) (1 - 2ε) / (1 - ε) = ρ^(k-1) (1 - ρ)`.
pub fn stationary_pi(p: WalkParams, k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("stationary_pi", "k must be >= 1"));
    }
    let rho = p.ratio();
    Ok(pow_rep(rho, k - 1) * (1.0 - rho))
}

/// Mean of the stationary law, `Σ k π(k) = (1 - ε) / (1 - 2ε)`.
pub fn stationary_mean(p: WalkParams) -> f64 {
    (1.0 - p.epsilon()) / p.drift()
}

/// `P(X >= k) = ρ^(k-1)` for `X ~ π`.
pub fn tail_prob_single(p: WalkParams, k: u64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain("tail_prob_single", "k must be >= 1"));
    }
    Ok(pow_rep(p.ratio(), k - 1))
}

/// `P(X + Y >= k)` for independent `X, Y ~ π`:
/// `ρ^(k-2) ((k - 2)(1 - 2ε)/(1 - ε) + 1)`.
///
/// This bounds the long-run probability that the total span is at least `k`.
/// The coupling gives `span <= X + Y`, hence `P(span >= k) <= P(X + Y >= k)`;
/// the inequality sign in some statements of this result reads the other way,
/// which is a typo.
pub fn tail_prob_sum(p: WalkParams, k: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::domain("tail_prob_sum", "k must be >= 2"));
    }
    let m = (k - 2) as f64;
    Ok(pow_rep(p.ratio(), k - 2) * (m * p.drift() / (1.0 - p.epsilon()) + 1.0))
}

/// Markov-inequality bound `min(1, 1/k + 2ε / (k (1 - 2ε)))` on `P(span >= k)`.
pub fn markov_span_bound(p: WalkParams, k: f64) -> Result<f64> {
    if k.is_nan() || k <= 0.0 {
        return Err(Error::domain("markov_span_bound", "k must be > 0"));
    }
    let b = 1.0 / k + (2.0 * p.epsilon() / k) / p.drift();
    Ok(b.min(1.0))
}

/// Expected time for a rightmost-only sweep to carry every agent over the
/// beacon at `positions[0]`:
/// `Σ_{k>=1} (⌊x_k - x_0⌋ + 1) / (1 - 2ε)`.
///
/// This is exact in expectation, not just an upper bound.
pub fn gathering_bound_unilateral(cfg: &InitialConfiguration) -> Result<f64> {
    let xs = cfg.positions();
    if xs.len() < 2 {
        return Err(Error::Validation(
            "unilateral sweep needs a beacon and at least one agent".into(),
        ));
    }
    if xs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Validation(
            "unilateral sweep needs strictly increasing positions".into(),
        ));
    }
    let beacon = xs[0];
    let levels: f64 = xs[1..].iter().map(|x| (x - beacon).floor() + 1.0).sum();
    Ok(levels / cfg.params().drift())
}

/// Bound on the expected time for the inner span `1 + S0` to shrink to
/// `1 + S0/2`: `((N - 2) ⌈S0/2⌉ + (total_span0 - 1)) / (1 - 2ε)`.
pub fn half_shrink_bound(n: usize, s0: f64, total_span0: f64, p: WalkParams) -> Result<f64> {
    if n < 3 {
        return Err(Error::Validation(format!("half_shrink_bound needs N >= 3, got {n}")));
    }
    if !s0.is_finite() || s0 <= 0.0 {
        return Err(Error::Validation(format!("S0 must be positive, got {s0}")));
    }
    if total_span0.is_nan() || total_span0 < 1.0 + s0 {
        return Err(Error::Validation(format!(
            "total span {total_span0} is smaller than the inner span 1 + {s0}"
        )));
    }
    let sweep = (n - 2) as f64 * (s0 / 2.0).ceil();
    Ok((sweep + (total_span0 - 1.0)) / p.drift())
}

/// Fractional part in `[0, 1)`. Tiny negative inputs whose exact fractional
/// part rounds up to 1.0 are mapped to 0.0.
#[inline]
pub fn fractional_part(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Smallest circular distance between the fractional parts of any two
/// positions, `min_{i≠j} min(|{x_i} - {x_j}|, 1 - |{x_i} - {x_j}|)`.
///
/// If two points at distance greater than one are found, they are at least
/// `1 + d` apart.
pub fn min_fractional_distance(positions: &[f64]) -> Result<f64> {
    if positions.len() < 2 {
        return Err(Error::Validation("need at least two positions".into()));
    }
    let mut fr: Vec<f64> = positions.iter().map(|&x| fractional_part(x)).collect();
    fr.sort_by(f64::total_cmp);
    let mut d = 1.0 - (fr[fr.len() - 1] - fr[0]);
    for w in fr.windows(2) {
        let gap = w[1] - w[0];
        if gap == 0.0 {
            return Err(Error::Degenerate(format!(
                "fractional part {} occurs more than once",
                w[0]
            )));
        }
        d = d.min(gap);
    }
    Ok(d.min(0.5))
}

/// Outcome of [`gathering_time_bound`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GatheringBound {
    /// The inner agents already fit in a unit interval.
    AlreadyGathered,
    /// Upper bound on the expected number of steps until they do.
    Steps(f64),
}

impl GatheringBound {
    pub fn steps(self) -> f64 {
        match self {
            GatheringBound::AlreadyGathered => 0.0,
            GatheringBound::Steps(s) => s,
        }
    }
}

/// Bound on the expected time until the inner agents gather to a unit interval:
///
/// `(N (S0 + ⌈log2(S0/d)⌉) + (x_N - x_1 - S0 - 1)) / (1 - 2ε)`
///
/// with `S0 = x_{N-1} - x_2 - 1` and `d` from [`min_fractional_distance`].
/// The logarithm term is taken as 0 when `S0 <= d`.
pub fn gathering_time_bound(cfg: &InitialConfiguration) -> Result<GatheringBound> {
    let n = cfg.len();
    let s0 = cfg
        .inner_excess()
        .ok_or_else(|| Error::Validation(format!("gathering bound needs N >= 4, got {n}")))?;
    if s0 <= 0.0 {
        return Ok(GatheringBound::AlreadyGathered);
    }
    let d = min_fractional_distance(cfg.positions())?;
    let halvings = halving_count(s0 / d);
    let numer = n as f64 * (s0 + halvings) + (cfg.total_span() - s0 - 1.0);
    Ok(GatheringBound::Steps(numer / cfg.params().drift()))
}

/// Relative slack when comparing `S0/d` against a power of two. Decimal
/// inputs such as `S0 = d = 0.25` reach here as `1.0000000000000002`.
const LOG2_SNAP: f64 = 1e-9;

/// `⌈log2(ratio)⌉`, clamped at 0, with ratios within [`LOG2_SNAP`] of a power
/// of two treated as that power.
fn halving_count(ratio: f64) -> f64 {
    if ratio <= 1.0 + LOG2_SNAP {
        return 0.0;
    }
    let l = ratio.log2();
    let nearest = l.round();
    if (l - nearest).abs() <= LOG2_SNAP {
        nearest
    } else {
        l.ceil()
    }
}

/// Exact solution of the walk absorbed at `left_target < 0 < right_barrier`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSolution {
    pub left_target: i64,
    pub right_barrier: i64,
    /// Probability of absorption at `left_target`, indexed by start state
    /// `left_target..=right_barrier`.
    pub hit_left: Vec<f64>,
    /// Expected absorption time, same indexing.
    pub expected_time: Vec<f64>,
}

impl ChainSolution {
    fn index(&self, start: i64) -> usize {
        (start - self.left_target) as usize
    }

    pub fn prob_left_from(&self, start: i64) -> f64 {
        self.hit_left[self.index(start)]
    }

    pub fn prob_right_from(&self, start: i64) -> f64 {
        1.0 - self.hit_left[self.index(start)]
    }

    pub fn time_from(&self, start: i64) -> f64 {
        self.expected_time[self.index(start)]
    }

    /// Probability of absorption at the left target starting from 0.
    pub fn prob_left(&self) -> f64 {
        self.prob_left_from(0)
    }

    /// Probability of absorption at the right barrier starting from 0.
    pub fn prob_right(&self) -> f64 {
        self.prob_right_from(0)
    }

    pub fn expected_time(&self) -> f64 {
        self.time_from(0)
    }
}

const MAX_CHAIN_WIDTH: i64 = 10_000;

/// Solves the absorbing chain on `{left_target, ..., right_barrier}` by the
/// gambler's-ruin linear relations
///
/// `h_i = (1-ε) h_{i-1} + ε h_{i+1}`, `m_i = 1 + (1-ε) m_{i-1} + ε m_{i+1}`
///
/// with a tridiagonal (Thomas) elimination. As the barrier recedes the
/// probability of reaching the left target tends to one and the time to
/// `1 / (1 - 2ε)`.
pub fn finite_chain_oracle(
    p: WalkParams,
    right_barrier: i64,
    left_target: i64,
) -> Result<ChainSolution> {
    if !(left_target < 0 && right_barrier > 0) {
        return Err(Error::domain(
            "finite_chain_oracle",
            format!("need left_target < 0 < right_barrier, got {left_target}, {right_barrier}"),
        ));
    }
    if right_barrier.saturating_sub(left_target) > MAX_CHAIN_WIDTH {
        return Err(Error::domain(
            "finite_chain_oracle",
            format!("interval wider than {MAX_CHAIN_WIDTH}"),
        ));
    }
    let up = p.epsilon();
    let down = 1.0 - up;
    let interior = (right_barrier - left_target - 1) as usize;

    // Unknowns are the interior states; boundary values enter the right-hand side.
    let sub = vec![-down; interior];
    let diag = vec![1.0; interior];
    let sup = vec![-up; interior];
    let mut rhs_h = vec![0.0; interior];
    rhs_h[0] += down; // h at left_target is 1
    let rhs_m = vec![1.0; interior];

    let h = solve_tridiagonal(&sub, &diag, &sup, &rhs_h);
    let m = solve_tridiagonal(&sub, &diag, &sup, &rhs_m);

    let mut hit_left = Vec::with_capacity(interior + 2);
    hit_left.push(1.0);
    hit_left.extend(h);
    hit_left.push(0.0);
    let mut expected_time = Vec::with_capacity(interior + 2);
    expected_time.push(0.0);
    expected_time.extend(m);
    expected_time.push(0.0);

    Ok(ChainSolution {
        left_target,
        right_barrier,
        hit_left,
        expected_time,
    })
}

/// Thomas algorithm. `sub[0]` and `sup[n-1]` are ignored.
fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = sup[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let denom = diag[i] - sub[i] * c[i - 1];
        c[i] = if i + 1 < n { sup[i] / denom } else { 0.0 };
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wp(e: f64) -> WalkParams {
        WalkParams::new(e).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    /// Dyck paths of length 2k by exhaustive enumeration of step sequences.
    fn dyck_count(k: u32) -> u64 {
        let len = 2 * k;
        (0u64..1 << len)
            .filter(|bits| {
                let mut h = 0i32;
                for i in 0..len {
                    h += if bits >> i & 1 == 1 { 1 } else { -1 };
                    if h < 0 {
                        return false;
                    }
                }
                h == 0
            })
            .count() as u64
    }

    #[test]
    fn walk_params_domain() {
        assert!(WalkParams::new(0.0).is_ok());
        assert!(WalkParams::new(0.4999).is_ok());
        assert!(matches!(WalkParams::new(0.5), Err(Error::InvalidEpsilon(_))));
        assert!(WalkParams::new(-0.1).is_err());
        assert!(WalkParams::new(f64::NAN).is_err());
        let p = wp(0.1);
        assert_eq!(p.epsilon() + p.alpha(), 0.5);
    }

    #[test]
    fn catalan_values() {
        assert_eq!(catalan(0).unwrap(), 1);
        assert_eq!(catalan(3).unwrap(), 5);
        // binom(20, 10) / 11
        assert_eq!(catalan(10).unwrap(), 184_756 / 11);
        assert_eq!(catalan(10).unwrap(), 16796);
        assert_eq!(catalan(35).unwrap(), 3_116_285_494_907_301_262);
        assert_eq!(catalan(36).unwrap(), 11_959_798_385_860_453_492);
        assert!(matches!(catalan(37), Err(Error::CatalanOverflow(37))));
    }

    #[test]
    fn catalan_matches_path_enumeration() {
        for k in 0..=10 {
            assert_eq!(catalan(k).unwrap(), dyck_count(k), "k = {k}");
        }
    }

    #[test]
    fn hit_probabilities() {
        for e in [0.0, 0.1, 0.49] {
            assert_eq!(prob_hit_minus_one(wp(e)), 1.0);
        }
        assert_eq!(prob_hit_plus_one(wp(0.0)), 0.0);
        assert!(close(prob_hit_plus_one(wp(0.1)), 1.0 / 9.0, 1e-15));
        assert!(close(prob_hit_plus_one(wp(0.25)), 1.0 / 3.0, 1e-15));
        let p = wp(0.1);
        let never = (1.0 - 2.0 * 0.1) / (1.0 - 0.1);
        assert!(close(1.0 - prob_hit_plus_one(p), never, 1e-15));
    }

    #[test]
    fn expected_steps_and_excursion() {
        assert_eq!(expected_steps_to_minus_one(wp(0.0)), 1.0);
        assert!(close(expected_steps_to_minus_one(wp(0.1)), 1.25, 1e-15));
        assert_eq!(expected_steps_to_minus_one(wp(0.25)), 2.0);
        assert_eq!(farthest_excursion_bound(wp(0.0)), 0.0);
        assert!(close(farthest_excursion_bound(wp(0.1)), 0.125, 1e-15));
        assert_eq!(farthest_excursion_bound(wp(0.25)), 0.5);
    }

    /// First-passage series `Σ (2k+1) C_k (1-ε) (ε(1-ε))^k`, and the
    /// excursion series with weight `k`, summed to convergence.
    #[test]
    fn closed_forms_match_catalan_series() {
        for e in [0.05, 0.1, 0.2] {
            let x = e * (1.0 - e);
            let (mut time, mut exc) = (0.0, 0.0);
            for k in 0..=CATALAN_MAX_INDEX {
                let term = catalan(k).unwrap() as f64 * (1.0 - e) * x.powi(k as i32);
                time += (2 * k + 1) as f64 * term;
                exc += k as f64 * term;
            }
            assert!(close(time, expected_steps_to_minus_one(wp(e)), 1e-6), "ε={e}");
            assert!(close(exc, farthest_excursion_bound(wp(e)), 1e-6), "ε={e}");
        }
    }

    #[test]
    fn hit_series_partial_sums() {
        // Partial sums of Σ C_k (1-ε)(ε(1-ε))^k increase toward one. The
        // truncation at k = 35 is within 1e-6 of 1 only up to ε = 0.25; at
        // ε = 0.3 the remainder is about 1.75e-5.
        for e in [0.01, 0.1, 0.2, 0.25, 0.3, 0.4] {
            let x = e * (1.0 - e);
            let mut s = 0.0;
            let mut prev = 0.0;
            for k in 0..=35 {
                s += catalan(k).unwrap() as f64 * (1.0 - e) * x.powi(k as i32);
                assert!(s >= prev);
                assert!(s <= 1.0 + 1e-12);
                prev = s;
            }
            if e <= 0.25 {
                assert!(1.0 - s < 1e-6, "ε={e}: {}", 1.0 - s);
            }
        }
    }

    #[test]
    fn stationary_values() {
        assert!(close(stationary_pi(wp(0.1), 1).unwrap(), 8.0 / 9.0, 1e-15));
        assert!(close(stationary_pi(wp(0.1), 2).unwrap(), 8.0 / 81.0, 1e-15));
        assert_eq!(stationary_pi(wp(0.0), 1).unwrap(), 1.0);
        assert_eq!(stationary_pi(wp(0.0), 2).unwrap(), 0.0);
        assert!(stationary_pi(wp(0.1), 0).is_err());
    }

    #[test]
    fn stationary_mean_matches_series() {
        for e in [0.1, 0.3, 0.45] {
            let p = wp(e);
            let s: f64 = (1..2000).map(|k| k as f64 * stationary_pi(p, k).unwrap()).sum();
            assert!(close(s, stationary_mean(p), 1e-10));
        }
    }

    #[test]
    fn tail_values() {
        for e in [0.0, 0.1, 0.3] {
            assert_eq!(tail_prob_single(wp(e), 1).unwrap(), 1.0);
            assert_eq!(tail_prob_sum(wp(e), 2).unwrap(), 1.0);
        }
        assert!(close(tail_prob_single(wp(0.1), 3).unwrap(), 1.0 / 81.0, 1e-15));
        assert!(close(tail_prob_single(wp(0.25), 2).unwrap(), 1.0 / 3.0, 1e-15));
        assert!(close(tail_prob_sum(wp(0.1), 4).unwrap(), 25.0 / 729.0, 1e-15));
        assert!(close(tail_prob_sum(wp(0.1), 3).unwrap(), 17.0 / 81.0, 1e-15));
        assert!(tail_prob_single(wp(0.1), 0).is_err());
        assert!(tail_prob_sum(wp(0.1), 1).is_err());
    }

    /// `P(X + Y >= k)` by direct convolution of the stationary law.
    #[test]
    fn tail_sum_matches_convolution() {
        for e in [0.05, 0.1, 0.3] {
            let p = wp(e);
            for k in 2..15u64 {
                let mut below = 0.0;
                for i in 1..k {
                    for j in 1..k - i {
                        below += stationary_pi(p, i).unwrap() * stationary_pi(p, j).unwrap();
                    }
                }
                assert!(close(tail_prob_sum(p, k).unwrap(), 1.0 - below, 1e-12), "ε={e} k={k}");
            }
        }
    }

    #[test]
    fn markov_bound_values() {
        assert!(close(markov_span_bound(wp(0.1), 10.0).unwrap(), 0.125, 1e-15));
        assert_eq!(markov_span_bound(wp(0.0), 1.0).unwrap(), 1.0);
        assert!(close(markov_span_bound(wp(0.25), 20.0).unwrap(), 0.1, 1e-15));
        assert!(markov_span_bound(wp(0.1), 0.0).is_err());
        assert!(markov_span_bound(wp(0.1), -1.0).is_err());
    }

    #[test]
    fn markov_bound_dominates_tail_sum() {
        for i in 1..=45 {
            let p = wp(i as f64 / 100.0);
            for k10 in 30..=300 {
                let k = k10 as f64 / 10.0;
                let m = markov_span_bound(p, k).unwrap();
                let t = tail_prob_sum(p, k.ceil() as u64).unwrap();
                assert!(m >= t, "ε={} k={k}: {m} < {t}", p.epsilon());
            }
        }
    }

    #[test]
    fn unilateral_bound_values() {
        let c = |xs: &[f64], e| InitialConfiguration::new(xs.to_vec(), wp(e)).unwrap();
        assert!(close(gathering_bound_unilateral(&c(&[0.0, 0.5, 1.7], 0.1)).unwrap(), 3.75, 1e-12));
        assert_eq!(gathering_bound_unilateral(&c(&[0.0, 0.5], 0.0)).unwrap(), 1.0);
        assert_eq!(gathering_bound_unilateral(&c(&[0.0, 2.3, 2.4, 2.5], 0.25)).unwrap(), 18.0);
        assert!(gathering_bound_unilateral(&c(&[0.0, 0.5, 0.5], 0.1)).is_err());
        assert!(InitialConfiguration::new(vec![0.0, 1.7, 0.5], wp(0.1)).is_err());
    }

    #[test]
    fn half_shrink_values() {
        assert!(close(half_shrink_bound(4, 2.0, 5.0, wp(0.1)).unwrap(), 7.5, 1e-12));
        assert_eq!(half_shrink_bound(3, 0.5, 1.5, wp(0.0)).unwrap(), 1.5);
        assert_eq!(half_shrink_bound(3, 2.0, 3.0, wp(0.25)).unwrap(), 6.0);
        assert!(half_shrink_bound(2, 2.0, 3.0, wp(0.25)).is_err());
        assert!(half_shrink_bound(4, 0.0, 3.0, wp(0.25)).is_err());
        assert!(half_shrink_bound(4, 2.0, 2.5, wp(0.25)).is_err());
    }

    fn brute_min_frac(xs: &[f64]) -> f64 {
        let mut d = f64::INFINITY;
        for i in 0..xs.len() {
            for j in 0..xs.len() {
                if i != j {
                    let a = (fractional_part(xs[i]) - fractional_part(xs[j])).abs();
                    d = d.min(a).min(1.0 - a);
                }
            }
        }
        d
    }

    #[test]
    fn min_frac_values() {
        assert_eq!(min_fractional_distance(&[0.0, 0.5]).unwrap(), 0.5);
        assert!(close(min_fractional_distance(&[0.1, 0.4, 2.45]).unwrap(), 0.05, 1e-12));
        assert!(close(min_fractional_distance(&[0.2, 1.9]).unwrap(), 0.3, 1e-12));
        assert!(matches!(min_fractional_distance(&[0.25, 3.25]), Err(Error::Degenerate(_))));
        assert!(min_fractional_distance(&[0.25]).is_err());
        assert_eq!(fractional_part(-1e-20), 0.0);
        assert_eq!(fractional_part(-0.25), 0.75);
    }

    #[test]
    fn gathering_bound_values() {
        let c = |xs: &[f64], e| InitialConfiguration::new(xs.to_vec(), wp(e)).unwrap();
        let b = gathering_time_bound(&c(&[0.1, 0.35, 1.6, 2.85], 0.1)).unwrap();
        assert!(close(b.steps(), 3.125, 1e-9), "{b:?}");
        let b = gathering_time_bound(&c(&[0.1, 0.3, 4.4, 8.7], 0.0)).unwrap();
        assert!(close(b.steps(), 36.9, 1e-9), "{b:?}");
        let b = gathering_time_bound(&c(&[0.0, 0.1, 0.7, 5.0], 0.2)).unwrap();
        assert_eq!(b, GatheringBound::AlreadyGathered);
        assert_eq!(b.steps(), 0.0);
        assert!(gathering_time_bound(&c(&[0.0, 0.1, 5.0], 0.2)).is_err());
        assert!(matches!(
            gathering_time_bound(&c(&[0.0, 0.5, 3.5, 5.0], 0.2)),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn chain_oracle_small_cases() {
        let s = finite_chain_oracle(wp(0.1), 1, -1).unwrap();
        assert!(close(s.prob_right(), 0.1, 1e-15));
        assert!(close(s.expected_time(), 1.0, 1e-15));
        let s = finite_chain_oracle(wp(0.1), 50, -1).unwrap();
        let t = s.expected_time();
        assert!((1.2499..=1.25).contains(&t), "{t}");
        assert!(finite_chain_oracle(wp(0.1), 0, -1).is_err());
        assert!(finite_chain_oracle(wp(0.1), 5, 0).is_err());
        assert!(finite_chain_oracle(wp(0.1), 9_000, -2_000).is_err());
        assert!(WalkParams::new(0.5).is_err());
    }

    /// Closed-form gambler's ruin in terms of ρ: starting `a` above the left
    /// target with the right barrier `b` above the start,
    /// `P(right) = (ρ^b - ρ^(a+b)) / (1 - ρ^(a+b))`.
    #[test]
    fn chain_oracle_matches_closed_form_ruin() {
        for e in [0.05, 0.1, 0.3, 0.45] {
            let rho: f64 = e / (1.0 - e);
            for (a, b) in [(1i64, 1i64), (1, 5), (3, 2), (50, 1), (10, 10)] {
                let s = finite_chain_oracle(wp(e), b, -a).unwrap();
                let m = (a + b) as i32;
                let exact = (rho.powi(b as i32) - rho.powi(m)) / (1.0 - rho.powi(m));
                assert!(close(s.prob_right(), exact, 1e-12), "ε={e} a={a} b={b}");
            }
        }
    }

    #[test]
    fn chain_oracle_converges_to_first_passage() {
        for e in [0.0, 0.1, 0.25, 0.4] {
            let p = wp(e);
            let barrier = (50.0 / p.drift()).ceil() as i64;
            let s = finite_chain_oracle(p, barrier, -1).unwrap();
            let want = expected_steps_to_minus_one(p);
            assert!((s.expected_time() - want).abs() / want < 1e-4, "ε={e}");
            assert!((s.prob_left() - prob_hit_minus_one(p)).abs() < 1e-4);
        }
        let s = finite_chain_oracle(wp(0.1), 1, -50).unwrap();
        assert!((s.prob_right() - 1.0 / 9.0).abs() < 1e-3);
    }

    proptest! {
        #[test]
        fn stationary_partial_sum_error_is_tail(e in 0.01f64..0.49, kmax in 1u64..60) {
            let p = wp(e);
            let s: f64 = (1..=kmax).map(|k| stationary_pi(p, k).unwrap()).sum();
            let tail = tail_prob_single(p, kmax + 1).unwrap();
            prop_assert!((1.0 - s - tail).abs() < 1e-12);
        }

        #[test]
        fn tail_sum_strictly_decreasing(e in 0.01f64..0.49, k in 2u64..40) {
            let p = wp(e);
            prop_assert!(tail_prob_sum(p, k + 1).unwrap() < tail_prob_sum(p, k).unwrap());
        }

        #[test]
        fn fractional_gap_bounds_motion(xs in prop::collection::vec(-20.0f64..20.0, 2..12)) {
            if let Ok(d) = min_fractional_distance(&xs) {
                prop_assert!(close(d, brute_min_frac(&xs), 1e-12));
                for a in &xs {
                    for b in &xs {
                        let gap = (a - b).abs();
                        if gap > 1.0 {
                            prop_assert!(gap >= 1.0 + d - 1e-9);
                        }
                    }
                }
            }
        }

        #[test]
        fn gathering_bound_monotone(
            e in 0.0f64..0.45,
            s0 in 1u32..60,
            grow in 0u32..20,
            n in 4usize..40,
        ) {
            // Fractional parts on a 0.01 grid fix d = 0.01; the outer agents
            // fix the total span. Inner agents run from 2.015 to 2.015 + 1 + S0.
            let p = wp(e);
            let build = |n: usize, s0: u32| {
                let mut xs = vec![0.005, 2.015, 3.015 + f64::from(s0) + 0.01, 300.995];
                for i in 0..n - 4 {
                    xs.push(2.5 + 0.01 * i as f64);
                }
                xs.sort_by(f64::total_cmp);
                InitialConfiguration::new(xs, p).unwrap()
            };
            let a = gathering_time_bound(&build(n, s0)).unwrap().steps();
            let b = gathering_time_bound(&build(n, s0 + grow)).unwrap().steps();
            let c = gathering_time_bound(&build(n + 1, s0)).unwrap().steps();
            prop_assert!(b >= a);
            prop_assert!(c >= a);
        }
    }
}
