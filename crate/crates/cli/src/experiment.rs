use std::path::PathBuf;
use std::time::Instant;

use clap::Args;
use serde::Serialize;

use erratic::experiments::{run_experiment, write_results, ExperimentKind, ExperimentSpec, OutputFormat};

use crate::error::CliError;
use crate::manifest::{self, Manifest};

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// JSON experiment spec; every field below can also be set there, and flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// convergence-vs-epsilon, convergence-vs-N, convergence-vs-S0,
    /// span-distribution, centroid-drift or walk-validation.
    #[arg(long)]
    pub kind: Option<ExperimentKind>,
    /// Comma-separated epsilon grid.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Comma-separated agent counts.
    #[arg(long, value_delimiter = ',')]
    pub ns: Option<Vec<usize>>,
    /// Comma-separated initial inner excesses.
    #[arg(long, value_delimiter = ',')]
    pub s0s: Option<Vec<f64>>,
    /// Trials per grid point (at least 2).
    #[arg(long)]
    pub trials: Option<u64>,
    /// Top-level seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Tick budget per trial [default: 10000000].
    #[arg(long)]
    pub max_steps: Option<u64>,
    /// Ticks discarded after gathering, or chain burn-in [default: 1000].
    #[arg(long)]
    pub warmup: Option<u64>,
    /// Post-gathering samples in total, or chain samples [default: 100000].
    #[arg(long)]
    pub samples: Option<u64>,
    /// Ticks between span samples [default: 10].
    #[arg(long)]
    pub stride: Option<u64>,
    /// csv or jsonl [default: csv].
    #[arg(long)]
    pub format: Option<OutputFormat>,
    /// Output directory; overrides the spec's `output` [default: runs/<kind>].
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: all cores].
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Serialize)]
struct Summary {
    rows: usize,
    histogram_rows: usize,
    incomplete: bool,
}

pub fn run(a: ExperimentArgs) -> Result<(), CliError> {
    let mut map = manifest::load_object(a.config.as_deref())?;
    manifest::overlay(&mut map, "kind", a.kind);
    manifest::overlay(&mut map, "epsilons", a.epsilons);
    manifest::overlay(&mut map, "ns", a.ns);
    manifest::overlay(&mut map, "s0s", a.s0s);
    manifest::overlay(&mut map, "trials", a.trials);
    manifest::overlay(&mut map, "seed", a.seed);
    manifest::overlay(&mut map, "max_steps", a.max_steps);
    manifest::overlay(&mut map, "warmup", a.warmup);
    manifest::overlay(&mut map, "samples", a.samples);
    manifest::overlay(&mut map, "stride", a.stride);
    manifest::overlay(&mut map, "format", a.format);
    manifest::overlay(&mut map, "output", a.out);
    let mut spec: ExperimentSpec = manifest::resolve(map)?;
    spec.validate()?;
    let dir = spec
        .output
        .clone()
        .unwrap_or_else(|| PathBuf::from("runs").join(spec.kind.name()));
    spec.output = Some(dir.clone());

    let mut pool = rayon::ThreadPoolBuilder::new();
    match a.threads {
        Some(0) => return Err(CliError::user("--threads must be positive")),
        Some(n) => pool = pool.num_threads(n),
        None => {}
    }
    let pool = pool.build().map_err(|e| CliError::Internal(e.to_string()))?;

    manifest::create_dir(&dir)?;
    let start = Instant::now();
    let result = pool.install(|| run_experiment(&spec))?;
    let results = dir.join(format!("results.{}", spec.format.extension()));
    let written = write_results(&result, spec.format, &results)?;
    let wall = start.elapsed();

    if result.incomplete() {
        eprintln!("warning: some trials hit max_steps; see the result table");
    }
    println!(
        "{}: {} rows, {} grid points, {:.2} s",
        spec.kind.name(),
        result.rows.len(),
        spec.grid().len().max(spec.epsilons.len()),
        wall.as_secs_f64()
    );
    for p in &written {
        println!("wrote {}", p.display());
    }
    let outputs = written
        .iter()
        .filter_map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    let summary = Summary {
        rows: result.rows.len(),
        histogram_rows: result.histogram.len(),
        incomplete: result.incomplete(),
    };
    Manifest::new(spec.seed, &spec, wall, outputs, summary).write(&dir)
}
