//! `alohak regions` — optimal-K partition of the (epsilon, lambda) plane,
//! as heat-map-ready CSV or JSON.

use crate::config::{resolve, ConfigFile};
use crate::output::{emit, json_envelope, print_json, round_sig10};
use crate::params::{resolve_format, Format};
use crate::CliError;
use alohak_core::{region_grid, RegionGrid};
use clap::Args;
use std::io::Write;
use std::path::PathBuf;

/// All K* of at least this value collapse into one bucket under --bucket.
const BUCKET_FLOOR: u32 = 5;

#[derive(Args)]
pub struct RegionsArgs {
    #[arg(long, default_value_t = 0.01)]
    pub eps_min: f64,
    #[arg(long, default_value_t = 0.99)]
    pub eps_max: f64,
    /// Grid points along the epsilon axis
    #[arg(long, default_value_t = 99)]
    pub eps_steps: usize,
    #[arg(long, default_value_t = 0.01)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 0.75)]
    pub lambda_max: f64,
    /// Grid points along the lambda axis
    #[arg(long, default_value_t = 75)]
    pub lambda_steps: usize,
    /// Scan cap per cell (default max(64, ceil(4/lambda)))
    #[arg(long)]
    pub k_cap: Option<u32>,
    /// Report every K* of 5 or more as the aggregate bucket value 5
    #[arg(long)]
    pub bucket: bool,
    /// Output format (default csv)
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

pub fn run(args: RegionsArgs) -> Result<(), CliError> {
    let cfg = ConfigFile::load(args.config.as_deref())?;
    let format = resolve_format(args.format, &cfg, Format::Csv)?;
    let k_cap = resolve(args.k_cap, &cfg, "k-cap", None)?;

    let grid = region_grid(
        (args.eps_min, args.eps_max),
        (args.lambda_min, args.lambda_max),
        (args.eps_steps, args.lambda_steps),
        k_cap,
    )?;

    let bucket = |k: u32| if args.bucket { k.min(BUCKET_FLOOR) } else { k };

    match format {
        Format::Csv | Format::Table => {
            let mut buf = Vec::new();
            writeln!(buf, "epsilon,lambda,k_star")?;
            for (eps, lam, k) in grid.cells() {
                writeln!(
                    buf,
                    "{},{},{}",
                    round_sig10(eps),
                    round_sig10(lam),
                    bucket(k)
                )?;
            }
            emit(args.output.as_deref(), &buf)
        }
        Format::Json => {
            let env = json_envelope(
                "regions",
                serde_json::json!({
                    "epsilon": { "min": args.eps_min, "max": args.eps_max, "steps": args.eps_steps },
                    "lambda": { "min": args.lambda_min, "max": args.lambda_max, "steps": args.lambda_steps },
                    "k_cap": k_cap,
                    "bucket": args.bucket,
                }),
                grid_json(&grid, &bucket),
                None,
            );
            match args.output.as_deref() {
                Some(p) => emit(Some(p), format!("{env:#}\n").as_bytes()),
                None => print_json(&env),
            }
        }
    }
}

fn grid_json(grid: &RegionGrid, bucket: &dyn Fn(u32) -> u32) -> serde_json::Value {
    let rows: Vec<Vec<u32>> = grid
        .epsilon_axis()
        .iter()
        .enumerate()
        .map(|(i, _)| {
            (0..grid.lambda_axis().len())
                .map(|j| bucket(grid.k_at(i, j)))
                .collect()
        })
        .collect();
    serde_json::json!({
        "epsilon_axis": grid.epsilon_axis(),
        "lambda_axis": grid.lambda_axis(),
        "k_star": rows,
    })
}
