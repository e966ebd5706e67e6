//! Minimal 3-D spatial math shared by every other module: elementary
//! rotations, the skew (cross-product) operator, and ZYX Euler-angle
//! kinematics including the Euler-rate-to-body-rate map.
//!
//! Conventions:
//! - rotations are world-from-local (`x_world = R * x_local`),
//! - Euler angles are ZYX (yaw-pitch-roll): `R = Rz(yaw) * Ry(pitch) * Rx(roll)`,
//! - all angles are radians; degrees exist only at the CLI boundary.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Mat3 = Matrix3<f64>;
pub type Vec3 = Vector3<f64>;

/// Pitch margin below pi/2 at which the Euler rate map is treated as singular.
pub const GIMBAL_MARGIN: f64 = 1e-3;

/// ZYX Euler angles (roll about x, pitch about y, yaw about z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EulerZyx {
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
}

impl EulerZyx {
    pub fn new(roll: f64, pitch: f64, yaw: f64) -> Self {
        Self { roll, pitch, yaw }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    pub fn from_vec(v: Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn to_vec(self) -> Vec3 {
        Vec3::new(self.roll, self.pitch, self.yaw)
    }

    /// Err if the pitch is within [`GIMBAL_MARGIN`] of +/-pi/2.
    pub fn check_gimbal(&self) -> Result<()> {
        if self.pitch.abs() >= std::f64::consts::FRAC_PI_2 - GIMBAL_MARGIN {
            Err(Error::GimbalLock {
                pitch: self.pitch,
                margin: GIMBAL_MARGIN,
            })
        } else {
            Ok(())
        }
    }
}

/// Right-handed rotation about the x-axis.
pub fn rot_x(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(
        1.0, 0.0, 0.0, //
        0.0, c, -s, //
        0.0, s, c,
    )
}

/// Right-handed rotation about the y-axis.
pub fn rot_y(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(
        c, 0.0, s, //
        0.0, 1.0, 0.0, //
        -s, 0.0, c,
    )
}

/// Right-handed rotation about the z-axis.
pub fn rot_z(angle: f64) -> Mat3 {
    let (s, c) = angle.sin_cos();
    Mat3::new(
        c, -s, 0.0, //
        s, c, 0.0, //
        0.0, 0.0, 1.0,
    )
}

/// Skew-symmetric operator: `skew(v) * w == v.cross(w)`.
pub fn skew(v: &Vec3) -> Mat3 {
    Mat3::new(
        0.0, -v.z, v.y, //
        v.z, 0.0, -v.x, //
        -v.y, v.x, 0.0,
    )
}

/// World-from-body rotation for ZYX Euler angles.
pub fn euler_to_rotation(e: &EulerZyx) -> Mat3 {
    rot_z(e.yaw) * rot_y(e.pitch) * rot_x(e.roll)
}

/// Inverse of [`euler_to_rotation`] on the principal branch
/// (|pitch| < pi/2).
pub fn rotation_to_euler(r: &Mat3) -> EulerZyx {
    let pitch = (-r[(2, 0)]).asin();
    let roll = r[(2, 1)].atan2(r[(2, 2)]);
    let yaw = r[(1, 0)].atan2(r[(0, 0)]);
    EulerZyx::new(roll, pitch, yaw)
}

/// Map from ZYX Euler rates to body angular velocity:
/// `omega_body = E(e) * [roll_dot, pitch_dot, yaw_dot]`, chosen so that
/// `R_dot = R * skew(omega_body)` holds.
///
/// det(E) = cos(pitch); the map is singular at pitch = +/-pi/2 and this
/// returns [`Error::GimbalLock`] within [`GIMBAL_MARGIN`] of it.
pub fn euler_rate_map(e: &EulerZyx) -> Result<Mat3> {
    e.check_gimbal()?;
    let (sr, cr) = e.roll.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    Ok(Mat3::new(
        1.0, 0.0, -sp, //
        0.0, cr, cp * sr, //
        0.0, -sr, cp * cr,
    ))
}

/// Derivative of [`euler_rate_map`] along Euler rates `edot`, i.e.
/// `dE/dt = sum_i dE/de_i * edot_i`. Used by the analytic Jacobian
/// time-derivative checks.
pub fn euler_rate_map_dot(e: &EulerZyx, edot: &Vec3) -> Mat3 {
    let (sr, cr) = e.roll.sin_cos();
    let (sp, cp) = e.pitch.sin_cos();
    let (rd, pd) = (edot.x, edot.y);
    Mat3::new(
        0.0,
        0.0,
        -cp * pd,
        0.0,
        -sr * rd,
        -sp * pd * sr + cp * cr * rd,
        0.0,
        -cr * rd,
        -sp * pd * cr - cp * sr * rd,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn frob(m: &Mat3) -> f64 {
        m.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    fn assert_orthonormal(r: &Mat3, tol: f64) {
        let err = frob(&(r.transpose() * r - Mat3::identity()));
        assert!(err <= tol, "R^T R - I frobenius = {err:e}");
        assert!((r.determinant() - 1.0).abs() <= tol);
    }

    #[test]
    fn rot_x_identity_at_zero() {
        assert_eq!(rot_x(0.0), Mat3::identity());
    }

    #[test]
    fn rot_x_quarter_turn_maps_y_to_z() {
        let v = rot_x(std::f64::consts::FRAC_PI_2) * Vec3::new(0.0, 1.0, 0.0);
        assert_relative_eq!(v, Vec3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
    }

    #[test]
    fn rot_x_group_property() {
        let lhs = rot_x(0.3) * rot_x(0.7);
        let rhs = rot_x(1.0);
        assert!(frob(&(lhs - rhs)) <= 1e-12);
    }

    #[test]
    fn skew_of_zero_is_zero() {
        assert_eq!(skew(&Vec3::zeros()), Mat3::zeros());
    }

    #[test]
    fn skew_matches_cross_product() {
        let v = Vec3::new(1.0, 0.0, 0.0);
        let w = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(skew(&v) * w, Vec3::new(0.0, 0.0, 1.0));
    }

    #[test]
    fn skew_self_annihilates() {
        let v = Vec3::new(0.2, -1.3, 0.5);
        assert_eq!(v.dot(&(skew(&v) * v)), 0.0);
    }

    #[test]
    fn euler_identity_at_zero() {
        assert_eq!(euler_to_rotation(&EulerZyx::zero()), Mat3::identity());
    }

    #[test]
    fn euler_pure_roll_reduces_to_rot_x() {
        let e = EulerZyx::new(0.4, 0.0, 0.0);
        assert!(frob(&(euler_to_rotation(&e) - rot_x(0.4))) <= 1e-12);
    }

    #[test]
    fn euler_round_trip() {
        let e = EulerZyx::new(0.1, 0.2, 0.3);
        let back = rotation_to_euler(&euler_to_rotation(&e));
        assert!((back.roll - e.roll).abs() <= 1e-10);
        assert!((back.pitch - e.pitch).abs() <= 1e-10);
        assert!((back.yaw - e.yaw).abs() <= 1e-10);
    }

    #[test]
    fn rate_map_identity_at_level() {
        assert_eq!(euler_rate_map(&EulerZyx::zero()).unwrap(), Mat3::identity());
    }

    #[test]
    fn rate_map_gimbal_lock_errors() {
        let e = EulerZyx::new(0.0, std::f64::consts::FRAC_PI_2, 0.0);
        assert!(matches!(
            euler_rate_map(&e),
            Err(Error::GimbalLock { .. })
        ));
    }

    /// Central-difference oracle: omega from E(e)*edot must match the omega
    /// extracted from R^T * R_dot with R_dot by finite differences.
    fn check_rate_map_fd(e: EulerZyx, rates: Vec3, tol: f64) {
        let omega = euler_rate_map(&e).unwrap() * rates;

        let h = 1e-6;
        let ep = EulerZyx::from_vec(e.to_vec() + rates * h);
        let em = EulerZyx::from_vec(e.to_vec() - rates * h);
        let r_dot = (euler_to_rotation(&ep) - euler_to_rotation(&em)) / (2.0 * h);
        let omega_skew = euler_to_rotation(&e).transpose() * r_dot;
        let omega_fd = Vec3::new(omega_skew[(2, 1)], omega_skew[(0, 2)], omega_skew[(1, 0)]);

        assert!(
            (omega - omega_fd).norm() <= tol,
            "omega {omega:?} vs fd {omega_fd:?}"
        );
    }

    #[test]
    fn rate_map_finite_difference_oracle() {
        check_rate_map_fd(
            EulerZyx::new(0.1, 0.3, -0.2),
            Vec3::new(0.5, -0.1, 0.2),
            1e-5,
        );
    }

    #[test]
    fn rate_map_dot_matches_finite_difference() {
        let e = EulerZyx::new(0.2, -0.4, 0.7);
        let edot = Vec3::new(0.3, -0.8, 0.5);
        let h = 1e-6;
        let ep = EulerZyx::from_vec(e.to_vec() + edot * h);
        let em = EulerZyx::from_vec(e.to_vec() - edot * h);
        let fd = (euler_rate_map(&ep).unwrap() - euler_rate_map(&em).unwrap()) / (2.0 * h);
        let analytic = euler_rate_map_dot(&e, &edot);
        assert!(frob(&(fd - analytic)) <= 1e-6);
    }

    proptest! {
        #[test]
        fn prop_rotations_orthonormal(
            roll in -3.0f64..3.0,
            pitch in -1.3f64..1.3,
            yaw in -3.0f64..3.0,
        ) {
            let r = euler_to_rotation(&EulerZyx::new(roll, pitch, yaw));
            assert_orthonormal(&r, 1e-9);
        }

        #[test]
        fn prop_rot_x_inverse_is_transpose(a in -10.0f64..10.0) {
            let diff = rot_x(-a) - rot_x(a).transpose();
            prop_assert!(frob(&diff) <= 1e-12);
        }

        #[test]
        fn prop_rate_map_nonsingular_and_consistent(
            roll in -3.0f64..3.0,
            pitch in -1.3f64..1.3,
            yaw in -3.0f64..3.0,
            rx in -1.0f64..1.0,
            ry in -1.0f64..1.0,
            rz in -1.0f64..1.0,
        ) {
            let e = EulerZyx::new(roll, pitch, yaw);
            let em = euler_rate_map(&e).unwrap();
            prop_assert!(em.determinant().abs() > 1e-12);
            check_rate_map_fd(e, Vec3::new(rx, ry, rz), 1e-5);
        }
    }
}
