//! Aerodynamic subsystem in linear time-varying state-space form:
//!
//! ```text
//! xi_dot = A(t) xi + B(t) y1
//! u_a    = C(t) xi + D(t) y1
//! ```
//!
//! The default instantiation is quasi-steady strip theory with a two-pole
//! circulation-lag model per strip. Each configured strip sits on a wing
//! segment axis and carries two lag states `z1, z2` driven by the
//! rear-quarter normal velocity; the matrices are rebuilt every evaluation
//! from the current kinematics, which is what makes the system
//! time-varying. Lift scales with the lag-filtered normal velocity, so a
//! step in downwash builds up along the classical two-pole response
//! `phi(s) = 1 - a1 exp(-b1 s) - a2 exp(-b2 s)` in semichord time
//! `s = 2 U t / c`.
//!
//! The kinematic input vector `y1` stacks four entries per strip:
//! `[normal velocity at mid-chord, spanwise pitch rate, in-plane speed,
//! chordwise flow]`, left-wing strips first. The in-plane speed is floored
//! at `min_speed` inside the lag dynamics so the state matrix stays
//! strictly stable at rest.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::kinematics::{wing_point, BodyFrames};
use crate::model::params::{ModelParams, Segment, Side};
use crate::model::state::{GenState, GenVec};
use crate::spatial::Vec3;

/// Lag states: two per strip, left-wing strips first.
pub type AeroState = DVector<f64>;
/// Stacked strip inputs, four entries per strip.
pub type AeroInput = DVector<f64>;

pub const STATES_PER_STRIP: usize = 2;
pub const INPUTS_PER_STRIP: usize = 4;

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum StripSegment {
    Proximal,
    Distal,
}

impl From<StripSegment> for Segment {
    fn from(s: StripSegment) -> Segment {
        match s {
            StripSegment::Proximal => Segment::Proximal,
            StripSegment::Distal => Segment::Distal,
        }
    }
}

/// One spanwise strip per wing; mirrored onto both wings.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct StripDef {
    pub segment: StripSegment,
    /// Station along the segment length vector, in [0, 1].
    pub fraction: f64,
    /// Strip chord (m).
    pub chord: f64,
    /// Spanwise width of the strip (m).
    pub width: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AeroConfig {
    pub enabled: bool,
    /// Air density (kg/m^3).
    pub density: f64,
    /// Lift-curve slope (1/rad).
    pub lift_slope: f64,
    /// Profile drag coefficient.
    pub drag_coeff: f64,
    /// Floor on the in-plane speed used in the lag rates (m/s).
    pub min_speed: f64,
    /// Two-pole lag weights (classical fit: 0.165, 0.335).
    pub wagner_a: [f64; 2],
    /// Two-pole lag rates per unit semichord-time (classical fit:
    /// 0.0455, 0.3).
    pub wagner_b: [f64; 2],
    /// Strips per wing.
    pub strips: Vec<StripDef>,
}

impl Default for AeroConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            density: 1.225,
            lift_slope: 2.0 * std::f64::consts::PI,
            drag_coeff: 0.02,
            min_speed: 0.05,
            wagner_a: [0.165, 0.335],
            wagner_b: [0.0455, 0.3],
            strips: vec![
                StripDef { segment: StripSegment::Proximal, fraction: 0.25, chord: 0.12, width: 0.075 },
                StripDef { segment: StripSegment::Proximal, fraction: 0.75, chord: 0.12, width: 0.075 },
                StripDef { segment: StripSegment::Distal, fraction: 0.25, chord: 0.10, width: 0.075 },
                StripDef { segment: StripSegment::Distal, fraction: 0.75, chord: 0.10, width: 0.075 },
            ],
        }
    }
}

impl AeroConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strips.is_empty() {
            return Err(Error::invalid_config("aero.strips", "need at least one strip"));
        }
        if !(self.density > 0.0) {
            return Err(Error::invalid_config("aero.density", "must be > 0"));
        }
        if !(self.min_speed > 0.0) {
            return Err(Error::invalid_config("aero.min_speed", "must be > 0"));
        }
        if self.wagner_b.iter().any(|b| !(*b > 0.0)) {
            return Err(Error::invalid_config("aero.wagner_b", "lag rates must be > 0"));
        }
        for (i, s) in self.strips.iter().enumerate() {
            if !(s.chord > 0.0) || !(s.width > 0.0) {
                return Err(Error::invalid_config(
                    format!("aero.strips[{i}]"),
                    "chord and width must be > 0",
                ));
            }
            if !(0.0..=1.0).contains(&s.fraction) {
                return Err(Error::invalid_config(
                    format!("aero.strips[{i}].fraction"),
                    "must lie in [0, 1]",
                ));
            }
        }
        Ok(())
    }

    /// Strips on both wings, in state order.
    pub fn strip_count(&self) -> usize {
        2 * self.strips.len()
    }

    pub fn state_dim(&self) -> usize {
        STATES_PER_STRIP * self.strip_count()
    }

    pub fn input_dim(&self) -> usize {
        INPUTS_PER_STRIP * self.strip_count()
    }

    pub fn zero_state(&self) -> AeroState {
        AeroState::zeros(self.state_dim())
    }

    fn strip(&self, global: usize) -> (Side, &StripDef) {
        let per_wing = self.strips.len();
        if global < per_wing {
            (Side::Left, &self.strips[global])
        } else {
            (Side::Right, &self.strips[global - per_wing])
        }
    }
}

/// Kinematic inputs for every strip at the given state.
pub fn strip_inputs(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
    cfg: &AeroConfig,
) -> AeroInput {
    let mut y = AeroInput::zeros(cfg.input_dim());
    for g in 0..cfg.strip_count() {
        let (side, def) = cfg.strip(g);
        let segment: Segment = def.segment.into();
        let point = wing_point(state, params, frames, side, segment, def.fraction);
        let frame = frames.wing(side, segment);
        // Air velocity relative to the strip, in the strip frame.
        let rel = frame.transpose() * (-point.vel);
        let chord_flow = rel.x;
        let normal_flow = rel.z;
        // Spanwise (pitch) rate of the segment in its own frame.
        let ang = crate::model::kinematics::wing_angular_jacobian(state, frames, side, segment)
            * state.qd;
        let pitch_rate = ang.y;
        let speed = (chord_flow * chord_flow + normal_flow * normal_flow).sqrt();
        let base = INPUTS_PER_STRIP * g;
        y[base] = normal_flow;
        y[base + 1] = pitch_rate;
        y[base + 2] = speed;
        y[base + 3] = chord_flow;
    }
    y
}

/// Lag-state derivative `xi_dot = A xi + B y1`. The per-strip rates are
/// `-b_j * 2 U / c` with `U` floored at `min_speed`, so every eigenvalue of
/// the state matrix has strictly negative real part.
pub fn aero_derivative(xi: &AeroState, y1: &AeroInput, _t: f64, cfg: &AeroConfig) -> AeroState {
    let mut dxi = AeroState::zeros(xi.len());
    for g in 0..cfg.strip_count() {
        let (_, def) = cfg.strip(g);
        let yb = INPUTS_PER_STRIP * g;
        let sb = STATES_PER_STRIP * g;
        let speed = y1[yb + 2].max(cfg.min_speed);
        let w34 = y1[yb] + 0.25 * def.chord * y1[yb + 1];
        let semichord_rate = 2.0 * speed / def.chord;
        for j in 0..2 {
            dxi[sb + j] = -cfg.wagner_b[j] * semichord_rate * xi[sb + j] + w34;
        }
    }
    dxi
}

/// Per-strip lag rates (the diagonal of the state matrix); exposed for the
/// stability checks.
pub fn lag_rates(y1: &AeroInput, cfg: &AeroConfig) -> Vec<f64> {
    let mut rates = Vec::with_capacity(cfg.state_dim());
    for g in 0..cfg.strip_count() {
        let (_, def) = cfg.strip(g);
        let speed = y1[INPUTS_PER_STRIP * g + 2].max(cfg.min_speed);
        for j in 0..2 {
            rates.push(-cfg.wagner_b[j] * 2.0 * speed / def.chord);
        }
    }
    rates
}

/// Generalized aerodynamic force `u_a = C xi + D y1`.
///
/// The output matrices are built from the current kinematics (strip frames,
/// Jacobians, and in-plane speeds); the result is affine in `(xi, y1)` at
/// fixed kinematics. Per strip, the circulatory normal force is
/// `1/2 rho U c dy a0 * w_eff` with the lag-filtered effective downwash,
/// and profile drag acts along the in-plane relative flow.
pub fn aero_output(
    xi: &AeroState,
    y1: &AeroInput,
    _t: f64,
    cfg: &AeroConfig,
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
) -> GenVec {
    if !cfg.enabled {
        return GenVec::zeros();
    }
    let mut u_a = GenVec::zeros();
    for g in 0..cfg.strip_count() {
        let (side, def) = cfg.strip(g);
        let segment: Segment = def.segment.into();
        let point = wing_point(state, params, frames, side, segment, def.fraction);
        let frame = frames.wing(side, segment);

        // Kinematic speed for the force coefficients (independent of the
        // probed y1, so the output stays affine in the inputs).
        let rel_kin = frame.transpose() * (-point.vel);
        let speed_kin = (rel_kin.x * rel_kin.x + rel_kin.z * rel_kin.z)
            .sqrt()
            .max(cfg.min_speed);

        let yb = INPUTS_PER_STRIP * g;
        let sb = STATES_PER_STRIP * g;
        let w34 = y1[yb] + 0.25 * def.chord * y1[yb + 1];
        let lag = 2.0 * speed_kin / def.chord
            * (cfg.wagner_a[0] * cfg.wagner_b[0] * xi[sb]
                + cfg.wagner_a[1] * cfg.wagner_b[1] * xi[sb + 1]);
        let w_eff = (1.0 - cfg.wagner_a[0] - cfg.wagner_a[1]) * w34 + lag;

        let dyn_coeff = 0.5 * cfg.density * def.chord * def.width;
        let normal_force = dyn_coeff * cfg.lift_slope * speed_kin * w_eff;
        let drag = dyn_coeff * cfg.drag_coeff * speed_kin;
        let force_strip = Vec3::new(drag * y1[yb + 3], 0.0, drag * y1[yb] + normal_force);
        let force_world = frame * force_strip;
        u_a += point.jac.transpose() * force_world;
    }
    u_a
}

/// Convenience wrapper evaluating inputs, derivative, and output in one go
/// for the current state.
pub struct AeroEval {
    pub y1: AeroInput,
    pub xi_dot: AeroState,
    pub u_a: GenVec,
}

pub fn evaluate(
    xi: &AeroState,
    t: f64,
    cfg: &AeroConfig,
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
) -> AeroEval {
    let y1 = strip_inputs(state, params, frames, cfg);
    let xi_dot = aero_derivative(xi, &y1, t, cfg);
    let u_a = if cfg.enabled {
        aero_output(xi, &y1, t, cfg, state, params, frames)
    } else {
        GenVec::zeros()
    };
    AeroEval { y1, xi_dot, u_a }
}
