use clap::{Args, ValueEnum};

use erratic::analytics::{self as an, InitialConfiguration, WalkParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Formula {
    /// C_k
    Catalan,
    /// Probability that the walk ever reaches -1 (always 1).
    HitMinusOne,
    /// Probability that the walk ever reaches +1.
    HitPlusOne,
    /// Expected steps to first reach -1.
    ExpectedSteps,
    /// Bound on the expected farthest excursion before reaching -1.
    ExcursionBound,
    /// Stationary probability of state k of the reflected chain.
    Pi,
    /// Mean of the reflected chain's stationary law.
    StationaryMean,
    /// P(X >= k) for one stationary extremist distance.
    TailSingle,
    /// P(X + Y >= k) for two independent stationary distances.
    TailSum,
    /// Markov-inequality bound on P(span >= k).
    MarkovBound,
    /// Expected sweep time against a beacon at the first position.
    UnilateralBound,
    /// Bound on the time for the inner span to halve.
    HalfShrinkBound,
    /// Bound on the expected gathering time of a configuration.
    GatheringBound,
    /// Smallest circular distance between fractional parts.
    MinFracDistance,
    /// Exact absorption probabilities and time on [floor, barrier] from 0.
    ChainOracle,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(value_enum)]
    pub formula: Formula,
    /// Probability of a step away from the group, in [0, 0.5).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// State, threshold or Catalan index.
    #[arg(long)]
    pub k: Option<f64>,
    /// Number of agents.
    #[arg(long)]
    pub n: Option<usize>,
    /// Initial inner excess x_{N-1} - x_2 - 1.
    #[arg(long)]
    pub s0: Option<f64>,
    /// Initial total span x_N - x_1.
    #[arg(long)]
    pub total_span: Option<f64>,
    /// Comma-separated positions.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub positions: Option<Vec<f64>>,
    /// Right absorbing barrier for the chain oracle.
    #[arg(long, default_value_t = 1)]
    pub barrier: i64,
    /// Left absorbing target for the chain oracle.
    #[arg(long, default_value_t = -50, allow_hyphen_values = true)]
    pub floor: i64,
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::user(format!("this formula needs --{flag}")))
}

fn whole(k: f64) -> Result<u64, CliError> {
    if k >= 0.0 && k.fract() == 0.0 && k < 1.8e19 {
        Ok(k as u64)
    } else {
        Err(CliError::user(format!("--k must be a non-negative integer, got {k}")))
    }
}

pub fn run(a: AnalyticArgs) -> Result<(), CliError> {
    let params = || -> Result<WalkParams, CliError> { Ok(WalkParams::new(need(a.epsilon, "epsilon")?)?) };
    let config = || -> Result<InitialConfiguration, CliError> {
        let mut xs = need(a.positions.clone(), "positions")?;
        xs.sort_by(f64::total_cmp);
        Ok(InitialConfiguration::new(xs, params()?)?)
    };
    let value = match a.formula {
        Formula::Catalan => {
            let k = whole(need(a.k, "k")?)?;
            let k = u32::try_from(k).map_err(|_| CliError::user("--k too large"))?;
            println!("{}", an::catalan(k)?);
            return Ok(());
        }
        Formula::HitMinusOne => an::prob_hit_minus_one(params()?),
        Formula::HitPlusOne => an::prob_hit_plus_one(params()?),
        Formula::ExpectedSteps => an::expected_steps_to_minus_one(params()?),
        Formula::ExcursionBound => an::farthest_excursion_bound(params()?),
        Formula::Pi => an::stationary_pi(params()?, whole(need(a.k, "k")?)?)?,
        Formula::StationaryMean => an::stationary_mean(params()?),
        Formula::TailSingle => an::tail_prob_single(params()?, whole(need(a.k, "k")?)?)?,
        Formula::TailSum => an::tail_prob_sum(params()?, whole(need(a.k, "k")?)?)?,
        Formula::MarkovBound => an::markov_span_bound(params()?, need(a.k, "k")?)?,
        Formula::UnilateralBound => an::gathering_bound_unilateral(&config()?)?,
        Formula::HalfShrinkBound => an::half_shrink_bound(
            need(a.n, "n")?,
            need(a.s0, "s0")?,
            need(a.total_span, "total-span")?,
            params()?,
        )?,
        Formula::GatheringBound => an::gathering_time_bound(&config()?)?.steps(),
        Formula::MinFracDistance => an::min_fractional_distance(&need(a.positions.clone(), "positions")?)?,
        Formula::ChainOracle => {
            let sol = an::finite_chain_oracle(params()?, a.barrier, a.floor)?;
            println!("prob_barrier {}", sol.prob_right());
            println!("prob_floor {}", sol.prob_left());
            println!("expected_time {}", sol.expected_time());
            return Ok(());
        }
    };
    println!("{value}");
    Ok(())
}
