//! Generalized coordinates and conjugate vectors.
//!
//! The eight generalized coordinates are ordered
//! `[p_x, p_y, p_z, roll, pitch, yaw, q_s, q_e]`: inertial body-COM
//! position, ZYX body Euler angles, shoulder angle, elbow angle.
//! Generalized force vectors use the same ordering (base force in N,
//! attitude generalized torque conjugate to Euler rates, joint torques
//! in N m).

use nalgebra::SVector;

use crate::error::Result;
use crate::model::params::ModelParams;
use crate::spatial::{EulerZyx, Vec3};

/// Generalized vector over the eight coordinates.
pub type GenVec = SVector<f64, 8>;

pub const DOF: usize = 8;
pub const IDX_PX: usize = 0;
pub const IDX_PY: usize = 1;
pub const IDX_PZ: usize = 2;
pub const IDX_ROLL: usize = 3;
pub const IDX_PITCH: usize = 4;
pub const IDX_YAW: usize = 5;
pub const IDX_QS: usize = 6;
pub const IDX_QE: usize = 7;

/// Generalized coordinates and their rates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenState {
    pub q: GenVec,
    pub qd: GenVec,
}

impl GenState {
    pub fn new(q: GenVec, qd: GenVec) -> Self {
        Self { q, qd }
    }

    pub fn zero() -> Self {
        Self {
            q: GenVec::zeros(),
            qd: GenVec::zeros(),
        }
    }

    pub fn from_parts(
        p_b: Vec3,
        euler: EulerZyx,
        q_s: f64,
        q_e: f64,
        v_b: Vec3,
        euler_rates: Vec3,
        qd_s: f64,
        qd_e: f64,
    ) -> Self {
        let mut q = GenVec::zeros();
        let mut qd = GenVec::zeros();
        q.fixed_rows_mut::<3>(0).copy_from(&p_b);
        q[IDX_ROLL] = euler.roll;
        q[IDX_PITCH] = euler.pitch;
        q[IDX_YAW] = euler.yaw;
        q[IDX_QS] = q_s;
        q[IDX_QE] = q_e;
        qd.fixed_rows_mut::<3>(0).copy_from(&v_b);
        qd.fixed_rows_mut::<3>(3).copy_from(&euler_rates);
        qd[IDX_QS] = qd_s;
        qd[IDX_QE] = qd_e;
        Self { q, qd }
    }

    pub fn p_b(&self) -> Vec3 {
        self.q.fixed_rows::<3>(0).into()
    }

    pub fn v_b(&self) -> Vec3 {
        self.qd.fixed_rows::<3>(0).into()
    }

    pub fn euler(&self) -> EulerZyx {
        EulerZyx::new(self.q[IDX_ROLL], self.q[IDX_PITCH], self.q[IDX_YAW])
    }

    pub fn euler_rates(&self) -> Vec3 {
        self.qd.fixed_rows::<3>(3).into()
    }

    pub fn q_s(&self) -> f64 {
        self.q[IDX_QS]
    }

    pub fn q_e(&self) -> f64 {
        self.q[IDX_QE]
    }

    pub fn qd_s(&self) -> f64 {
        self.qd[IDX_QS]
    }

    pub fn qd_e(&self) -> f64 {
        self.qd[IDX_QE]
    }

    /// Hard validity: the attitude must be away from gimbal lock.
    pub fn check(&self) -> Result<()> {
        self.euler().check_gimbal()
    }

    /// Soft validity: true when both wing joints are inside the configured
    /// limits. Violations are runtime warnings, not errors.
    pub fn joints_within_limits(&self, params: &ModelParams) -> bool {
        self.q_s().abs() <= params.joint_limit && self.q_e().abs() <= params.joint_limit
    }
}

/// Extract the base-translation block of a generalized vector.
pub fn base_block(v: &GenVec) -> Vec3 {
    v.fixed_rows::<3>(0).into()
}
