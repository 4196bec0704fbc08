use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use serde::{Deserialize, Serialize};

use erratic::experiments::uniform_placement;
use erratic::rng::derived_rng;
use erratic::sim1d::{Mode, SwarmState1D};
use erratic::sim2d::{uniform_square, Point, SwarmState2D};
use erratic::trajectory::{CsvRecord, CsvSink, TrajectoryRow, TrajectoryRow2D};

use crate::error::CliError;
use crate::manifest::{self, Manifest};

const TRAJECTORY: &str = "trajectory.csv";

/// Uniform random start: `N` agents on `[0, 3 + S0]` with distinct fractional parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Uniform {
    pub n: usize,
    pub s0: f64,
}

/// Uniform random start on the square `[0, side]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformSquare {
    pub n: usize,
    pub side: f64,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected two comma-separated numbers, got {s:?}"))?;
    let a = a.trim().parse::<f64>().map_err(|e| e.to_string())?;
    let b = b.trim().parse::<f64>().map_err(|e| e.to_string())?;
    Ok((a, b))
}

fn parse_count(x: f64) -> Result<usize, String> {
    if x >= 0.0 && x.fract() == 0.0 && x <= 1e9 {
        Ok(x as usize)
    } else {
        Err(format!("agent count must be a whole number, got {x}"))
    }
}

fn parse_uniform(s: &str) -> Result<Uniform, String> {
    let (n, s0) = parse_pair(s)?;
    Ok(Uniform { n: parse_count(n)?, s0 })
}

fn parse_square(s: &str) -> Result<UniformSquare, String> {
    let (n, side) = parse_pair(s)?;
    Ok(UniformSquare { n: parse_count(n)?, side })
}

fn default_max_steps() -> u64 {
    10_000_000
}

fn default_stride() -> u64 {
    1
}

fn default_mode() -> Mode {
    Mode::Bilateral
}

fn default_steps() -> u64 {
    1000
}

/// Resolved `sim1d` config; exactly one of `positions` and `uniform` is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim1dConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positions: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform: Option<Uniform>,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_mode")]
    pub mode: Mode,
    #[serde(default = "default_max_steps")]
    pub max_steps: u64,
    #[serde(default = "default_stride")]
    pub stride: u64,
}

#[derive(Debug, Args)]
pub struct Sim1dArgs {
    /// JSON config with the same field names as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Comma-separated initial positions.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "uniform")]
    pub positions: Option<Vec<f64>>,
    /// Random start as "N,S0".
    #[arg(long, value_parser = parse_uniform)]
    pub uniform: Option<Uniform>,
    /// Probability of a step away from the group, in [0, 0.5).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Top-level seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// bilateral, unilateral-right or unilateral-left [default: bilateral].
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Tick budget [default: 10000000].
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Ticks between trajectory rows [default: 1].
    #[arg(long)]
    pub stride: Option<u64>,
    /// Output directory [default: runs/sim1d].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Summary1d {
    t: u64,
    reached: bool,
    core_span: f64,
    total_span: f64,
    invariant_violations: u64,
}

fn create_csv(path: &Path) -> Result<CsvSink<BufWriter<File>>, CliError> {
    let f = File::create(path).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    Ok(CsvSink::new(BufWriter::new(f)))
}

fn finish_csv<R: CsvRecord>(sink: CsvSink<BufWriter<File>>, path: &Path) -> Result<(), CliError> {
    sink.finish::<R>()
        .map(drop)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))
}

pub fn run_1d(a: Sim1dArgs) -> Result<(), CliError> {
    let mut map = manifest::load_object(a.config.as_deref())?;
    if a.positions.is_some() {
        map.remove("uniform");
    }
    if a.uniform.is_some() {
        map.remove("positions");
    }
    manifest::overlay(&mut map, "positions", a.positions);
    manifest::overlay(&mut map, "uniform", a.uniform);
    manifest::overlay(&mut map, "epsilon", a.epsilon);
    manifest::overlay(&mut map, "seed", a.seed);
    manifest::overlay(&mut map, "mode", a.mode);
    manifest::overlay(&mut map, "max_steps", a.max_steps);
    manifest::overlay(&mut map, "stride", a.stride);
    let cfg: Sim1dConfig = manifest::resolve(map)?;

    let positions = match (&cfg.positions, cfg.uniform) {
        (Some(p), None) => p.clone(),
        (None, Some(u)) => {
            if u.n == 0 || !(u.s0.is_finite() && u.s0 >= 0.0) {
                return Err(CliError::user("uniform start needs N >= 1 and a finite S0 >= 0"));
            }
            uniform_placement(&mut derived_rng(cfg.seed, "sim1d-placement", 0), u.n, u.s0)
        }
        _ => return Err(CliError::user("give exactly one of positions and uniform")),
    };
    let mut state = SwarmState1D::new(&positions, cfg.epsilon, cfg.seed, cfg.mode)?;
    if cfg.stride == 0 {
        return Err(CliError::user("stride must be positive"));
    }

    let dir = a.out.unwrap_or_else(|| PathBuf::from("runs/sim1d"));
    manifest::create_dir(&dir)?;
    let path = dir.join(TRAJECTORY);
    let mut sink = create_csv(&path)?;
    let start = Instant::now();
    let beacon_right = state.x_min();
    let beacon_left = state.x_max();
    let (reached, monitor) = match cfg.mode {
        Mode::Bilateral => state.run_recorded(cfg.max_steps, cfg.stride, &mut sink, |s| s.is_gathered()),
        Mode::UnilateralRight => state.run_recorded(cfg.max_steps, cfg.stride, &mut sink, |s| {
            s.x_max() == beacon_right
        }),
        Mode::UnilateralLeft => state.run_recorded(cfg.max_steps, cfg.stride, &mut sink, |s| {
            s.x_min() == beacon_left
        }),
    }
    .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    finish_csv::<TrajectoryRow>(sink, &path)?;
    let wall = start.elapsed();

    let summary = Summary1d {
        t: state.t(),
        reached,
        core_span: state.core_span(),
        total_span: state.total_span(),
        invariant_violations: monitor.total(),
    };
    println!("T = {}", summary.t);
    if reached {
        println!("reached = true");
    } else {
        println!("reached = false (max_steps {} exhausted)", cfg.max_steps);
    }
    println!("core_span = {}", summary.core_span);
    println!("total_span = {}", summary.total_span);
    Manifest::new(cfg.seed, &cfg, wall, vec![TRAJECTORY.into()], summary).write(&dir)
}

/// Resolved `sim2d` config; exactly one of `points` and `uniform_square` is set.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sim2dConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uniform_square: Option<UniformSquare>,
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_steps")]
    pub steps: u64,
    #[serde(default = "default_stride")]
    pub stride: u64,
}

#[derive(Debug, Args)]
pub struct Sim2dArgs {
    /// JSON config with the same field names as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Flat comma-separated coordinates "x1,y1,x2,y2,...".
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "uniform_square")]
    pub points: Option<Vec<f64>>,
    /// Random start as "N,SIDE".
    #[arg(long, value_parser = parse_square)]
    pub uniform_square: Option<UniformSquare>,
    /// Probability of a step away from the group, in [0, 0.5).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Top-level seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Ticks to run [default: 1000].
    #[arg(long)]
    pub steps: Option<u64>,
    /// Ticks between trajectory rows [default: 1].
    #[arg(long)]
    pub stride: Option<u64>,
    /// Output directory [default: runs/sim2d].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Summary2d {
    t: u64,
    diameter: f64,
    hull_count: usize,
}

pub fn run_2d(a: Sim2dArgs) -> Result<(), CliError> {
    let mut map = manifest::load_object(a.config.as_deref())?;
    let points = match a.points {
        Some(flat) if flat.len() % 2 != 0 => {
            return Err(CliError::user("--points needs an even number of coordinates"));
        }
        Some(flat) => Some(flat.chunks(2).map(|c| [c[0], c[1]]).collect::<Vec<Point>>()),
        None => None,
    };
    if points.is_some() {
        map.remove("uniform_square");
    }
    if a.uniform_square.is_some() {
        map.remove("points");
    }
    manifest::overlay(&mut map, "points", points);
    manifest::overlay(&mut map, "uniform_square", a.uniform_square);
    manifest::overlay(&mut map, "epsilon", a.epsilon);
    manifest::overlay(&mut map, "seed", a.seed);
    manifest::overlay(&mut map, "steps", a.steps);
    manifest::overlay(&mut map, "stride", a.stride);
    let cfg: Sim2dConfig = manifest::resolve(map)?;

    let points = match (&cfg.points, cfg.uniform_square) {
        (Some(p), None) => p.clone(),
        (None, Some(u)) => {
            if u.n == 0 || !(u.side.is_finite() && u.side > 0.0) {
                return Err(CliError::user("uniform square needs N >= 1 and a finite side > 0"));
            }
            uniform_square(&mut derived_rng(cfg.seed, "sim2d-placement", 0), u.n, u.side)
        }
        _ => return Err(CliError::user("give exactly one of points and uniform_square")),
    };
    let mut state = SwarmState2D::new(&points, cfg.epsilon, cfg.seed)?;
    if cfg.steps == 0 || cfg.stride == 0 {
        return Err(CliError::user("steps and stride must be positive"));
    }

    let dir = a.out.unwrap_or_else(|| PathBuf::from("runs/sim2d"));
    manifest::create_dir(&dir)?;
    let path = dir.join(TRAJECTORY);
    let mut sink = create_csv(&path)?;
    let start = Instant::now();
    state
        .run(cfg.steps, cfg.stride, &mut sink)
        .map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    finish_csv::<TrajectoryRow2D>(sink, &path)?;
    let wall = start.elapsed();

    let row = state.row();
    println!("T = {}", row.t);
    println!("diameter = {}", row.diameter);
    println!("hull_count = {}", row.hull_count);
    let summary = Summary2d {
        t: row.t,
        diameter: row.diameter,
        hull_count: row.hull_count,
    };
    Manifest::new(cfg.seed, &cfg, wall, vec![TRAJECTORY.into()], summary).write(&dir)
}
