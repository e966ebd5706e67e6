//! Physical parameters of the five-body flyer.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spatial::Vec3;

/// Wing side. Right-side geometry is the mirror image of the left across
/// the body x-z plane (coupled-wing assumption: one shoulder/elbow pair
/// drives both sides).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    /// Sign of the joint rotation about body x for this side.
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }
}

/// Wing segment: proximal (shoulder-driven) or distal (elbow-driven).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Segment {
    Proximal,
    Distal,
}

/// Masses, inertias, and morphology lengths. All SI.
///
/// Length vectors are stored for the left wing; the right wing uses the
/// mirror image across the body x-z plane, so the mirror-symmetry
/// invariant holds by construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ModelParams {
    /// Main body mass (kg).
    pub m_b: f64,
    /// Proximal wing segment mass, per side (kg).
    pub m_p: f64,
    /// Distal wing segment mass, per side (kg).
    pub m_d: f64,
    /// Main body diagonal inertia (kg m^2, body frame).
    pub i_b: [f64; 3],
    /// Proximal segment diagonal inertia (kg m^2, local frame).
    pub i_p: [f64; 3],
    /// Distal segment diagonal inertia (kg m^2, local frame).
    pub i_d: [f64; 3],
    /// Body-frame offset from body COM to the shoulder chain origin (m).
    pub l1: [f64; 3],
    /// Proximal segment length vector (m, proximal frame).
    pub l2: [f64; 3],
    /// Distal segment length vector (m, distal frame).
    pub l3: [f64; 3],
    /// Gravitational acceleration (m/s^2).
    pub gravity: f64,
    /// Location of the external-force application point along the distal
    /// length vector, as a fraction in [0, 1].
    pub wing_point: f64,
    /// Soft joint limit for |q_s| and |q_e| (rad).
    pub joint_limit: f64,
}

impl Default for ModelParams {
    /// Desk-scale default: ~30 cm span per wing pair, ~60 g platform.
    /// Shipped as an editable config; nothing downstream hard-codes these.
    fn default() -> Self {
        Self {
            m_b: 0.04,
            m_p: 0.006,
            m_d: 0.004,
            i_b: [1.13e-5, 3.63e-5, 4.17e-5],
            i_p: [1.125e-5, 1.5e-7, 1.125e-5],
            i_d: [7.5e-6, 1.0e-7, 7.5e-6],
            l1: [0.0, 0.03, 0.03],
            l2: [0.0, 0.15, 0.0],
            l3: [0.0, 0.15, 0.0],
            gravity: 9.81,
            wing_point: 0.5,
            joint_limit: std::f64::consts::FRAC_PI_2,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("model.m_b", self.m_b),
            ("model.m_p", self.m_p),
            ("model.m_d", self.m_d),
        ];
        for (key, v) in positive {
            if !(v > 0.0) {
                return Err(Error::invalid_config(key, format!("mass must be > 0, got {v}")));
            }
        }
        for (key, triple) in [
            ("model.i_b", &self.i_b),
            ("model.i_p", &self.i_p),
            ("model.i_d", &self.i_d),
        ] {
            if triple.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::invalid_config(
                    key,
                    format!("inertia entries must be > 0, got {triple:?}"),
                ));
            }
        }
        if self.l2.iter().all(|x| *x == 0.0) || self.l3.iter().all(|x| *x == 0.0) {
            return Err(Error::invalid_config(
                "model.l2/l3",
                "wing segment length vectors must be nonzero",
            ));
        }
        if !(self.gravity.is_finite()) {
            return Err(Error::invalid_config("model.gravity", "must be finite"));
        }
        if !(0.0..=1.0).contains(&self.wing_point) {
            return Err(Error::invalid_config(
                "model.wing_point",
                format!("must lie in [0, 1], got {}", self.wing_point),
            ));
        }
        if !(self.joint_limit > 0.0) {
            return Err(Error::invalid_config("model.joint_limit", "must be > 0"));
        }
        Ok(())
    }

    pub fn total_mass(&self) -> f64 {
        self.m_b + 2.0 * self.m_p + 2.0 * self.m_d
    }

    /// Length vector `l1` for the given side (right side mirrored in y).
    pub fn l1_side(&self, side: Side) -> Vec3 {
        mirror_y(self.l1.into(), side)
    }

    pub fn l2_side(&self, side: Side) -> Vec3 {
        mirror_y(self.l2.into(), side)
    }

    pub fn l3_side(&self, side: Side) -> Vec3 {
        mirror_y(self.l3.into(), side)
    }

    pub fn inertia_diag(&self, segment: Segment) -> Vec3 {
        match segment {
            Segment::Proximal => self.i_p.into(),
            Segment::Distal => self.i_d.into(),
        }
    }
}

fn mirror_y(v: Vec3, side: Side) -> Vec3 {
    match side {
        Side::Left => v,
        Side::Right => Vec3::new(v.x, -v.y, v.z),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_params_validate() {
        ModelParams::default().validate().unwrap();
    }

    #[test]
    fn negative_mass_rejected() {
        let p = ModelParams { m_p: -1.0, ..ModelParams::default() };
        let err = p.validate().unwrap_err();
        assert!(err.to_string().contains("m_p"));
    }

    #[test]
    fn right_side_mirrors_y() {
        let p = ModelParams::default();
        let left = p.l2_side(Side::Left);
        let right = p.l2_side(Side::Right);
        assert_eq!(left.y, -right.y);
        assert_eq!(left.x, right.x);
        assert_eq!(left.z, right.z);
    }
}
