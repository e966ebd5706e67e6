//! Thin command-line front end; all logic lives in the library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use morphwing::cli::{self, ColumnSpec, GridAxis, RunManifest};
use morphwing::error::Error;

#[derive(Parser)]
#[command(
    name = "morphwing",
    about = "Morphing-wing flapping-flight simulator with momentum-based force estimation",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario; writes sim_log.csv and metrics.json.
    Simulate {
        /// Run configuration (TOML); omit to use built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output directory (default: $MORPHWING_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Write the effective config next to the outputs.
        #[arg(long)]
        echo_config: bool,
    },
    /// Recompute metrics from a CSV log.
    Metrics {
        /// Path to a sim_log.csv.
        log: PathBuf,
        /// Truth columns per axis, e.g. "flx+frx,fly+fry,flz+frz".
        #[arg(long)]
        truth_cols: Option<String>,
        /// Estimate columns per axis, e.g. "estx,esty,estz".
        #[arg(long)]
        est_cols: Option<String>,
        /// Step window "t0,t1" for rise-time identification.
        #[arg(long)]
        step_window: Option<String>,
        /// Observer gain for the analytic rise-time reference.
        #[arg(long)]
        gain: Option<f64>,
    },
    /// Render static SVG figures from a CSV log.
    Plot {
        /// Path to a sim_log.csv.
        log: PathBuf,
        /// Comma-separated figure families:
        /// forces, position, states, trajectory.
        #[arg(long, default_value = "")]
        channels: String,
        /// Output directory (default: $MORPHWING_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter grid; writes sweep.csv.
    Sweep {
        /// Run configuration (TOML); omit to use built-in defaults.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Grid axis "section.key=v1,v2,..."; repeatable.
        #[arg(long)]
        grid: Vec<String>,
        /// Output directory (default: $MORPHWING_OUT or ./out).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn out_dir(explicit: Option<PathBuf>) -> PathBuf {
    explicit.unwrap_or_else(RunManifest::default_out_dir)
}

const EXIT_DOMAIN: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::UnknownChannel(_) => EXIT_USAGE,
        Error::InvalidConfig { key, .. } if key.starts_with("--") => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

fn run() -> Result<(), Error> {
    match Args::parse().command {
        Command::Simulate { config, out, seed, echo_config } => {
            let manifest = RunManifest { config, out_dir: out_dir(out), seed };
            let (log_path, metrics_path) = cli::cmd_simulate(&manifest)?;
            if echo_config {
                let cfg = manifest.load_config()?;
                cfg.save(&manifest.out_dir.join("config_echo.toml"))?;
            }
            println!("wrote {}", log_path.display());
            println!("wrote {}", metrics_path.display());
            Ok(())
        }
        Command::Metrics { log, truth_cols, est_cols, step_window, gain } => {
            let spec = ColumnSpec::parse(truth_cols.as_deref(), est_cols.as_deref())?;
            let window = match step_window {
                Some(w) => {
                    let parts: Vec<&str> = w.split(',').collect();
                    if parts.len() != 2 {
                        return Err(Error::invalid_config("--step-window", "expected t0,t1"));
                    }
                    let t0: f64 = parts[0].trim().parse().map_err(|_| {
                        Error::invalid_config("--step-window", "t0 is not a number")
                    })?;
                    let t1: f64 = parts[1].trim().parse().map_err(|_| {
                        Error::invalid_config("--step-window", "t1 is not a number")
                    })?;
                    Some([t0, t1])
                }
                None => None,
            };
            let report = cli::cmd_metrics(&log, &spec, window, gain)?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(())
        }
        Command::Plot { log, channels, out } => {
            let list: Vec<String> = channels
                .split(',')
                .map(|s| s.trim().to_string())
                .filter(|s| !s.is_empty())
                .collect();
            let written = cli::cmd_plot(&log, &list, &out_dir(out))?;
            for p in &written {
                println!("wrote {}", p.display());
            }
            Ok(())
        }
        Command::Sweep { config, grid, out, seed } => {
            let axes: Result<Vec<GridAxis>, Error> =
                grid.iter().map(|g| GridAxis::parse(g)).collect();
            let manifest = RunManifest { config, out_dir: out_dir(out), seed };
            let rows = cli::cmd_sweep(&manifest, &axes?)?;
            let failures = rows.iter().filter(|r| r.status != "ok").count();
            println!(
                "{} grid points, {} failed; wrote {}",
                rows.len(),
                failures,
                manifest.out_dir.join("sweep.csv").display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
