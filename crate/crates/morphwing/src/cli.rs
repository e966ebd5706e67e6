//! Drivers behind the `morphwing` binary: simulate, metrics, plot, sweep.
//!
//! Subcommands never mutate their input config files; every output carries
//! the config echo and seed needed to reproduce it. Exit codes: 0 success,
//! 1 domain error, 2 usage error.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::plot::Channel;
use crate::sim::log::{CsvLog, SimLog};
use crate::sim::{self, run_scenario};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "MORPHWING_OUT";

/// Resolved invocation: config source, output directory, seed override.
#[derive(Clone, Debug)]
pub struct RunManifest {
    /// Config file; `None` runs the built-in defaults.
    pub config: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn default_out_dir() -> PathBuf {
        std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"))
    }

    pub fn load_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        Ok(cfg)
    }
}

/// Metrics sidecar written next to every simulation log.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MetricsReport {
    pub version: u32,
    pub seed: u64,
    pub r_squared: AxisTriple,
    pub rmse: AxisTriple,
    /// Axis names sorted by descending truth variance.
    pub variance_order: [String; 3],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rise_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decay_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rise_time_analytic_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_increment_n: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_drift_rel: Option<f64>,
    pub noise_exceedances: usize,
    pub non_canonical: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

const AXES: [&str; 3] = ["fx", "fy", "fz"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AxisTriple {
    pub fx: f64,
    pub fy: f64,
    pub fz: f64,
}

impl From<[f64; 3]> for AxisTriple {
    fn from(v: [f64; 3]) -> Self {
        Self { fx: v[0], fy: v[1], fz: v[2] }
    }
}

/// Compute the standard report from an in-memory log.
pub fn report_from_log(log: &SimLog, cfg: &RunConfig) -> Result<MetricsReport> {
    let truth = log.truth_force();
    let est = log.estimate_force();
    let times = log.times();
    let fm = sim::force_metrics(&truth, &est)?;
    let step = if cfg.scenario.step_magnitude != 0.0 {
        sim::step_response(&times, &truth, &est, cfg.scenario.step_window).ok()
    } else {
        None
    };
    let energy = if cfg.sim.energy_audit {
        let ek: Vec<f64> = log.records.iter().map(|r| r.e_kin).collect();
        let ep: Vec<f64> = log.records.iter().map(|r| r.e_pot).collect();
        sim::energy_drift(&ek, &ep).ok()
    } else {
        None
    };
    let k = cfg.scenario.observer_gain.to_vec();
    let k_base = (k[0] + k[1] + k[2]) / 3.0;
    Ok(MetricsReport {
        version: 1,
        seed: cfg.scenario.seed,
        r_squared: fm.r_squared.into(),
        rmse: fm.rmse.into(),
        variance_order: fm.variance_order.map(|i| AXES[i].to_string()),
        rise_time_s: step.as_ref().map(|s| s.rise_time),
        decay_time_s: step.as_ref().map(|s| s.decay_time),
        rise_time_analytic_s: step.as_ref().map(|_| 3.0 / k_base),
        step_increment_n: step.as_ref().map(|s| s.increment),
        energy_drift_rel: energy,
        noise_exceedances: log.noise_exceedances,
        non_canonical: cfg.non_canonical_notes(),
        config: Some(cfg.clone()),
    })
}

/// Run one scenario and write `sim_log.csv` plus `metrics.json` in the
/// output directory.
pub fn cmd_simulate(manifest: &RunManifest) -> Result<(PathBuf, PathBuf)> {
    let cfg = manifest.load_config()?;
    let log = run_scenario(&cfg, None)?;
    std::fs::create_dir_all(&manifest.out_dir)?;
    let log_path = manifest.out_dir.join("sim_log.csv");
    log.write_csv(&log_path)?;
    let report = report_from_log(&log, &cfg)?;
    let metrics_path = manifest.out_dir.join("metrics.json");
    std::fs::write(
        &metrics_path,
        serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    Ok((log_path, metrics_path))
}

/// Column selection for [`cmd_metrics`] on a bare CSV log.
#[derive(Clone, Debug)]
pub struct ColumnSpec {
    /// Truth columns per axis; pairs are summed (default: per-wing truth).
    pub truth: Vec<Vec<String>>,
    /// Estimate columns per axis.
    pub estimate: Vec<String>,
}

impl Default for ColumnSpec {
    fn default() -> Self {
        Self {
            truth: vec![
                vec!["flx".into(), "frx".into()],
                vec!["fly".into(), "fry".into()],
                vec!["flz".into(), "frz".into()],
            ],
            estimate: vec!["estx".into(), "esty".into(), "estz".into()],
        }
    }
}

impl ColumnSpec {
    /// Parse `--truth-cols a,b,c` / `--est-cols d,e,f` arguments; truth
    /// entries may be `x+y` sums.
    pub fn parse(truth: Option<&str>, estimate: Option<&str>) -> Result<Self> {
        let mut spec = ColumnSpec::default();
        if let Some(t) = truth {
            let axes: Vec<&str> = t.split(',').collect();
            if axes.len() != 3 {
                return Err(Error::SchemaMismatch(format!(
                    "--truth-cols needs 3 comma-separated entries, got {}",
                    axes.len()
                )));
            }
            spec.truth = axes
                .iter()
                .map(|a| a.split('+').map(|s| s.trim().to_string()).collect())
                .collect();
        }
        if let Some(e) = estimate {
            let axes: Vec<&str> = e.split(',').collect();
            if axes.len() != 3 {
                return Err(Error::SchemaMismatch(format!(
                    "--est-cols needs 3 comma-separated entries, got {}",
                    axes.len()
                )));
            }
            spec.estimate = axes.iter().map(|s| s.trim().to_string()).collect();
        }
        Ok(spec)
    }
}

/// Metrics report recomputed from a CSV log on disk.
pub fn cmd_metrics(
    log_path: &Path,
    spec: &ColumnSpec,
    step_window: Option<[f64; 2]>,
    gain: Option<f64>,
) -> Result<MetricsReport> {
    let csv = CsvLog::read(log_path)?;
    let times = csv.column("t")?;
    let mut truth: [Vec<f64>; 3] = [vec![], vec![], vec![]];
    for (a, cols) in spec.truth.iter().enumerate() {
        let mut acc = vec![0.0; times.len()];
        for name in cols {
            let col = csv.column(name)?;
            for (x, v) in acc.iter_mut().zip(col) {
                *x += v;
            }
        }
        truth[a] = acc;
    }
    let estimate: [Vec<f64>; 3] = [
        csv.column(&spec.estimate[0])?,
        csv.column(&spec.estimate[1])?,
        csv.column(&spec.estimate[2])?,
    ];
    let fm = sim::force_metrics(&truth, &estimate)?;
    let step = step_window.and_then(|w| sim::step_response(&times, &truth, &estimate, w).ok());
    let energy = match (csv.column("e_kin"), csv.column("e_pot")) {
        (Ok(ek), Ok(ep)) => sim::energy_drift(&ek, &ep).ok(),
        _ => None,
    };
    Ok(MetricsReport {
        version: 1,
        seed: csv.seed.unwrap_or(0),
        r_squared: fm.r_squared.into(),
        rmse: fm.rmse.into(),
        variance_order: fm.variance_order.map(|i| AXES[i].to_string()),
        rise_time_s: step.as_ref().map(|s| s.rise_time),
        decay_time_s: step.as_ref().map(|s| s.decay_time),
        rise_time_analytic_s: gain.map(|k| 3.0 / k),
        step_increment_n: step.as_ref().map(|s| s.increment),
        energy_drift_rel: energy,
        noise_exceedances: 0,
        non_canonical: vec![],
        config: None,
    })
}

/// Render the requested figure families; returns the written paths.
/// An empty channel list renders nothing and succeeds.
pub fn cmd_plot(log_path: &Path, channels: &[String], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let parsed: Result<Vec<Channel>> =
        channels.iter().map(|c| Channel::parse(c)).collect();
    let parsed = parsed?;
    let csv = CsvLog::read(log_path)?;
    let mut written = Vec::new();
    for ch in parsed {
        written.push(crate::plot::render(&csv, ch, out_dir)?);
    }
    Ok(written)
}

/// One grid axis: a config key path and its candidate values.
#[derive(Clone, Debug)]
pub struct GridAxis {
    pub key: String,
    pub values: Vec<String>,
}

impl GridAxis {
    /// Parse `section.key=v1,v2,v3`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (key, vals) = spec.split_once('=').ok_or_else(|| {
            Error::invalid_config("--grid", format!("expected key=v1,v2,..., got '{spec}'"))
        })?;
        let values: Vec<String> = vals.split(',').map(|s| s.trim().to_string()).collect();
        if values.is_empty() || values.iter().any(|v| v.is_empty()) {
            return Err(Error::invalid_config("--grid", "empty value list"));
        }
        Ok(Self { key: key.trim().to_string(), values })
    }
}

/// Apply `key = value` onto the TOML form of a config.
fn apply_key(cfg: &RunConfig, key: &str, value: &str) -> Result<RunConfig> {
    let mut doc: toml::Value = toml::Value::try_from(cfg.clone())
        .map_err(|e| Error::ConfigParse(e.to_string()))?;
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts
        .split_last()
        .ok_or_else(|| Error::invalid_config(key, "empty key"))?;
    let mut node = &mut doc;
    for part in path {
        node = node
            .as_table_mut()
            .and_then(|t| t.get_mut(*part))
            .ok_or_else(|| Error::invalid_config(key, format!("unknown section '{part}'")))?;
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::invalid_config(key, "target is not a table"))?;
    let parsed: toml::Value = value
        .parse::<i64>()
        .map(toml::Value::Integer)
        .or_else(|_| value.parse::<f64>().map(toml::Value::Float))
        .or_else(|_| value.parse::<bool>().map(toml::Value::Boolean))
        .unwrap_or_else(|_| toml::Value::String(value.to_string()));
    table.insert(last.to_string(), parsed);
    let cfg: RunConfig = doc
        .try_into()
        .map_err(|e| Error::ConfigParse(format!("`{key}` = {value}: {e}")))?;
    cfg.validate()?;
    Ok(cfg)
}

/// One sweep result row.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub assignment: Vec<(String, String)>,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<MetricsReport>,
}

/// Run every grid point in parallel; per-point failures are recorded and
/// the sweep continues. Returns the rows and writes `sweep.csv`.
pub fn cmd_sweep(manifest: &RunManifest, grid: &[GridAxis]) -> Result<Vec<SweepRow>> {
    let base = manifest.load_config()?;
    // Cartesian product of the grid axes.
    let mut points: Vec<Vec<(String, String)>> = vec![vec![]];
    for axis in grid {
        let mut next = Vec::new();
        for p in &points {
            for v in &axis.values {
                let mut q = p.clone();
                q.push((axis.key.clone(), v.clone()));
                next.push(q);
            }
        }
        points = next;
    }
    if grid.is_empty() {
        points.clear();
    }

    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(i, assignment)| {
            let mut cfg = Ok(base.clone());
            for (k, v) in assignment {
                cfg = cfg.and_then(|c| apply_key(&c, k, v));
            }
            let outcome = cfg.and_then(|c| {
                let log = run_scenario(&c, None)?;
                report_from_log(&log, &c)
            });
            match outcome {
                Ok(mut m) => {
                    m.config = None; // keep the aggregate small
                    SweepRow {
                        point: i,
                        assignment: assignment.clone(),
                        status: "ok".into(),
                        metrics: Some(m),
                    }
                }
                Err(e) => SweepRow {
                    point: i,
                    assignment: assignment.clone(),
                    status: format!("error: {e}"),
                    metrics: None,
                },
            }
        })
        .collect();

    std::fs::create_dir_all(&manifest.out_dir)?;
    let path = manifest.out_dir.join("sweep.csv");
    let mut out = String::new();
    out.push_str("point,assignment,seed,status,r2_fx,r2_fy,r2_fz,rise_time_s,decay_time_s,energy_drift_rel\n");
    for row in &rows {
        let assignment = row
            .assignment
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        let (seed, r2, rise, decay, drift) = match &row.metrics {
            Some(m) => (
                m.seed.to_string(),
                format!("{},{},{}", m.r_squared.fx, m.r_squared.fy, m.r_squared.fz),
                m.rise_time_s.map(|v| v.to_string()).unwrap_or_default(),
                m.decay_time_s.map(|v| v.to_string()).unwrap_or_default(),
                m.energy_drift_rel.map(|v| v.to_string()).unwrap_or_default(),
            ),
            None => (String::new(), ",,".into(), String::new(), String::new(), String::new()),
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.point, assignment, seed, row.status, r2, rise, decay, drift
        ));
    }
    std::fs::write(path, out)?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_axis_parses() {
        let axis = GridAxis::parse("scenario.observer_gain=5,20,80").unwrap();
        assert_eq!(axis.key, "scenario.observer_gain");
        assert_eq!(axis.values, vec!["5", "20", "80"]);
    }

    #[test]
    fn grid_axis_rejects_missing_equals() {
        assert!(GridAxis::parse("scenario.observer_gain").is_err());
    }

    #[test]
    fn apply_key_roundtrip() {
        let cfg = RunConfig::default();
        let out = apply_key(&cfg, "scenario.noise_sigma", "0.02").unwrap();
        assert_eq!(out.scenario.noise_sigma, 0.02);
        let out = apply_key(&cfg, "sim.decimation", "5").unwrap();
        assert_eq!(out.sim.decimation, 5);
    }

    #[test]
    fn apply_key_unknown_section_fails() {
        let cfg = RunConfig::default();
        assert!(apply_key(&cfg, "nonsense.key", "1").is_err());
    }

    #[test]
    fn column_spec_counts_enforced() {
        assert!(ColumnSpec::parse(Some("a,b"), None).is_err());
        assert!(ColumnSpec::parse(None, Some("a,b,c,d")).is_err());
        let spec = ColumnSpec::parse(Some("flx+frx,fly+fry,flz+frz"), Some("estx,esty,estz"))
            .unwrap();
        assert_eq!(spec.truth[0], vec!["flx", "frx"]);
    }
}
