//! Human-editable run configuration: one TOML file with `model`, `gait`,
//! `ks`, `aero`, `scenario`, and `sim` sections plus a schema `version`
//! key. All quantities are SI; angles are radians.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::aero::AeroConfig;
use crate::disturbance::{GaitSource, Scenario};
use crate::error::{Error, Result};
use crate::linkage::gait::SinusoidGait;
use crate::linkage::ks::{default_ks_config, KsConfig, KsSystem};
use crate::model::params::ModelParams;

pub const CONFIG_VERSION: u32 = 1;

/// Wing-joint trajectory source configuration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GaitConfig {
    pub sinusoid: SinusoidGait,
    /// Proportional gain of the joint-tracking loop (1/s^2).
    pub track_kp: f64,
    /// Derivative gain of the joint-tracking loop (1/s).
    pub track_kd: f64,
}

impl Default for GaitConfig {
    fn default() -> Self {
        Self {
            sinusoid: SinusoidGait::default(),
            track_kp: 2500.0,
            track_kd: 100.0,
        }
    }
}

impl GaitConfig {
    pub fn validate(&self) -> Result<()> {
        self.sinusoid.validate()?;
        if self.track_kp < 0.0 || self.track_kd < 0.0 {
            return Err(Error::invalid_config("gait.track_kp/track_kd", "must be >= 0"));
        }
        Ok(())
    }
}

/// Integrator and logging settings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SimConfig {
    /// Fixed integrator step (s).
    pub dt: f64,
    /// Total simulated time (s); must be a multiple of `dt * decimation`.
    pub duration: f64,
    /// Log every this many steps.
    pub decimation: usize,
    /// Record energies in the log.
    pub energy_audit: bool,
    /// Initial body COM position (m).
    pub initial_position: [f64; 3],
    /// Initial body velocity (m/s).
    pub initial_velocity: [f64; 3],
    /// Initial attitude (roll, pitch, yaw; rad).
    pub initial_attitude: [f64; 3],
    /// Initial Euler-angle rates (rad/s).
    pub initial_attitude_rates: [f64; 3],
    /// Test hook: zero the logged disturbance channel without touching the
    /// dynamics, demonstrating that the observer never reads it.
    #[serde(default, skip_serializing)]
    pub debug_corrupt_uf_log: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            dt: 1e-4,
            duration: 2.0,
            decimation: 10,
            energy_audit: true,
            initial_position: [0.0, 0.0, 0.0],
            initial_velocity: [1.0, 0.0, 0.0],
            initial_attitude: [0.0, 0.0, 0.0],
            initial_attitude_rates: [0.0, 0.0, 0.0],
            debug_corrupt_uf_log: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::invalid_config("sim.dt", "must be > 0"));
        }
        if !(self.duration >= self.dt) {
            return Err(Error::invalid_config("sim.duration", "must be >= dt"));
        }
        if self.decimation == 0 {
            return Err(Error::invalid_config("sim.decimation", "must be >= 1"));
        }
        let steps = self.steps()?;
        if steps % self.decimation != 0 {
            return Err(Error::invalid_config(
                "sim.duration",
                format!(
                    "duration must be a multiple of dt * decimation (steps = {steps}, decimation = {})",
                    self.decimation
                ),
            ));
        }
        Ok(())
    }

    /// Number of integrator steps; errors unless duration is an integer
    /// multiple of dt (no partial final step).
    pub fn steps(&self) -> Result<usize> {
        let steps = (self.duration / self.dt).round();
        if (steps * self.dt - self.duration).abs() > 1e-9 * self.duration.max(1.0) {
            return Err(Error::invalid_config(
                "sim.duration",
                "must be an integer multiple of dt",
            ));
        }
        Ok(steps as usize)
    }
}

/// The whole run configuration file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunConfig {
    pub version: u32,
    pub model: ModelParams,
    pub gait: GaitConfig,
    /// Linkage geometry; required when `scenario.gait_source = "ks"`.
    pub ks: Option<KsConfig>,
    pub aero: AeroConfig,
    pub scenario: Scenario,
    pub sim: SimConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            version: CONFIG_VERSION,
            model: ModelParams::default(),
            gait: GaitConfig::default(),
            ks: Some(default_ks_config()),
            aero: AeroConfig::default(),
            scenario: Scenario::default(),
            sim: SimConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(Error::Io)?;
        let cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| Error::ConfigParse(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(Error::invalid_config(
                "version",
                format!("unsupported schema version {} (expected {CONFIG_VERSION})", self.version),
            ));
        }
        self.model.validate()?;
        self.gait.validate()?;
        self.aero.validate()?;
        self.sim.validate()?;
        self.scenario.validate(self.sim.duration)?;
        if self.scenario.gait_source == GaitSource::Ks {
            let ks = self.ks.as_ref().ok_or_else(|| {
                Error::invalid_config("ks", "section required when scenario.gait_source = \"ks\"")
            })?;
            // Compiling the system validates the topology; assembling it
            // validates feasibility at the reference crank angle.
            let system = KsSystem::new(ks.clone())?;
            system.assemble()?;
        }
        // Hard joint-limit check on the configured initial state happens in
        // the engine once the gait determines the initial joint angles.
        Ok(())
    }

    /// Non-default knobs that make a run non-comparable with published
    /// results; echoed into the metrics sidecar.
    pub fn non_canonical_notes(&self) -> Vec<String> {
        let mut notes = vec![
            "model parameters, linkage geometry, aero coefficients, and initial conditions are \
             repository defaults, not published values"
                .to_string(),
        ];
        if self.scenario.gait_source == GaitSource::Ks {
            notes.push("linkage geometry is a plausible stand-in, not the physical mechanism".into());
        }
        notes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_config_validates() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn toml_round_trip() {
        let cfg = RunConfig::default();
        let text = cfg.to_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        back.validate().unwrap();
        assert_eq!(back.scenario.seed, cfg.scenario.seed);
        assert_eq!(back.sim.dt, cfg.sim.dt);
        assert_eq!(back.model.m_b, cfg.model.m_b);
    }

    #[test]
    fn missing_mass_key_names_the_key() {
        let mut text = RunConfig::default().to_toml();
        text = text.replace("m_b = 0.04", "");
        let err = toml::from_str::<RunConfig>(&text).unwrap_err().to_string();
        assert!(err.contains("m_b"), "error should name the key: {err}");
    }

    #[test]
    fn bad_duration_multiple_rejected() {
        let mut cfg = RunConfig::default();
        cfg.sim.duration = 2.00005;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn ks_gait_requires_ks_section() {
        let mut cfg = RunConfig::default();
        cfg.scenario.gait_source = GaitSource::Ks;
        cfg.ks = None;
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("ks"));
    }
}
