//! Forward kinematics of the five-body chain and the analytic point/COM
//! Jacobians everything else is assembled from.
//!
//! Chain per wing (left shown; right is the y-mirror with negated joint
//! rotations):
//!
//! ```text
//! p_P = p_B + R_B l1 + 1/2 R_B R_s l2
//! p_D = p_P + 1/2 R_B R_s l2 + R_B R_s R_e l3
//! ```
//!
//! with `R_s = rot_x(q_s)` (proximal from body) and `R_e = rot_x(q_e)`
//! (distal from proximal). A general "wing point" at fraction `f` along a
//! segment covers COMs (proximal f = 1/2, distal f = 1), the external-force
//! application point (distal f = wing_point), and aerodynamic strip
//! stations.

use nalgebra::SMatrix;

use crate::error::Result;
use crate::model::params::{ModelParams, Segment, Side};
use crate::model::state::GenState;
use crate::spatial::{euler_rate_map, rot_x, skew, Mat3, Vec3};

pub type Jac3x8 = SMatrix<f64, 3, 8>;

const X_AXIS: Vec3 = Vec3::new(1.0, 0.0, 0.0);

/// World-from-local rotations of all five bodies plus the Euler rate map.
#[derive(Clone, Debug)]
pub struct BodyFrames {
    /// World from body.
    pub r_b: Mat3,
    /// World from proximal segment, per side.
    pub r_p: [Mat3; 2],
    /// World from distal segment, per side.
    pub r_d: [Mat3; 2],
    /// Euler-rate to body-angular-velocity map E(e).
    pub rate_map: Mat3,
}

impl BodyFrames {
    pub fn compute(state: &GenState, _params: &ModelParams) -> Result<Self> {
        let euler = state.euler();
        let rate_map = euler_rate_map(&euler)?;
        let r_b = crate::spatial::euler_to_rotation(&euler);
        let mut r_p = [Mat3::identity(); 2];
        let mut r_d = [Mat3::identity(); 2];
        for side in Side::BOTH {
            let s = side.sign();
            let rs = rot_x(s * state.q_s());
            let re = rot_x(s * state.q_e());
            r_p[side.index()] = r_b * rs;
            r_d[side.index()] = r_p[side.index()] * re;
        }
        Ok(Self { r_b, r_p, r_d, rate_map })
    }

    /// World-from-segment rotation for a wing segment.
    pub fn wing(&self, side: Side, segment: Segment) -> &Mat3 {
        match segment {
            Segment::Proximal => &self.r_p[side.index()],
            Segment::Distal => &self.r_d[side.index()],
        }
    }
}

/// COM positions of all five bodies (world frame).
#[derive(Clone, Debug)]
pub struct ComPositions {
    pub p_b: Vec3,
    pub p_p: [Vec3; 2],
    pub p_d: [Vec3; 2],
}

/// Position, velocity, and Jacobian of a material point on a wing segment.
#[derive(Clone, Debug)]
pub struct WingPoint {
    pub pos: Vec3,
    pub vel: Vec3,
    /// d(pos)/d(q), so `vel = jac * qd`.
    pub jac: Jac3x8,
}

/// Forward kinematics: COM positions and body rotations.
pub fn forward_kinematics(
    state: &GenState,
    params: &ModelParams,
) -> Result<(ComPositions, BodyFrames)> {
    let frames = BodyFrames::compute(state, params)?;
    let p_b = state.p_b();
    let mut p_p = [Vec3::zeros(); 2];
    let mut p_d = [Vec3::zeros(); 2];
    for side in Side::BOTH {
        let i = side.index();
        let l1 = params.l1_side(side);
        let l2 = params.l2_side(side);
        let l3 = params.l3_side(side);
        let rs = frames.r_b.transpose() * frames.r_p[i];
        let re = frames.r_p[i].transpose() * frames.r_d[i];
        p_p[i] = p_b + frames.r_b * (l1 + 0.5 * (rs * l2));
        p_d[i] = p_b + frames.r_b * (l1 + rs * l2 + rs * (re * l3));
    }
    Ok((ComPositions { p_b, p_p, p_d }, frames))
}

/// Body-frame vector from the body COM to a point at fraction `f` along the
/// given wing segment, together with its partials w.r.t. q_s and q_e.
fn chain_offset(
    params: &ModelParams,
    side: Side,
    segment: Segment,
    f: f64,
    q_s: f64,
    q_e: f64,
) -> (Vec3, Vec3, Vec3) {
    let s = side.sign();
    let l1 = params.l1_side(side);
    let l2 = params.l2_side(side);
    let l3 = params.l3_side(side);
    let rs = rot_x(s * q_s);
    match segment {
        Segment::Proximal => {
            let w = l1 + f * (rs * l2);
            let dw_ds = s * X_AXIS.cross(&(f * (rs * l2)));
            (w, dw_ds, Vec3::zeros())
        }
        Segment::Distal => {
            let re = rot_x(s * q_e);
            let arm = rs * l2 + f * (rs * (re * l3));
            let w = l1 + arm;
            let dw_ds = s * X_AXIS.cross(&arm);
            let dw_de = s * (rs * X_AXIS.cross(&(f * (re * l3))));
            (w, dw_ds, dw_de)
        }
    }
}

/// Kinematics of a material point at fraction `f` along a wing segment.
///
/// The Jacobian is analytic: translation block is the identity, the
/// attitude block is `-R_B [w]x E(e)` for the body-frame offset `w`, and
/// the joint columns come from the chain partials.
pub fn wing_point(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
    side: Side,
    segment: Segment,
    f: f64,
) -> WingPoint {
    let (w, dw_ds, dw_de) = chain_offset(params, side, segment, f, state.q_s(), state.q_e());
    let pos = state.p_b() + frames.r_b * w;

    let mut jac = Jac3x8::zeros();
    jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&Mat3::identity());
    let att = -frames.r_b * skew(&w) * frames.rate_map;
    jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&att);
    jac.fixed_view_mut::<3, 1>(0, 6)
        .copy_from(&(frames.r_b * dw_ds));
    jac.fixed_view_mut::<3, 1>(0, 7)
        .copy_from(&(frames.r_b * dw_de));

    let vel = jac * state.qd;
    WingPoint { pos, vel, jac }
}

/// Linear-velocity Jacobian of a body's COM.
pub fn com_linear_jacobian(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
    side: Side,
    segment: Segment,
) -> Jac3x8 {
    let f = match segment {
        Segment::Proximal => 0.5,
        Segment::Distal => 1.0,
    };
    wing_point(state, params, frames, side, segment, f).jac
}

/// Base COM Jacobian: identity translation block only.
pub fn base_linear_jacobian() -> Jac3x8 {
    let mut jac = Jac3x8::zeros();
    jac.fixed_view_mut::<3, 3>(0, 0).copy_from(&Mat3::identity());
    jac
}

/// Body-frame angular-velocity Jacobian of the main body:
/// `omega_B^B = J * qd`.
pub fn base_angular_jacobian(frames: &BodyFrames) -> Jac3x8 {
    let mut jac = Jac3x8::zeros();
    jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&frames.rate_map);
    jac
}

/// Local-frame angular-velocity Jacobian of a wing segment.
///
/// The shoulder adds its rate about the shared local x-axis onto the body
/// rate; the elbow adds its rate onto the proximal rate.
pub fn wing_angular_jacobian(
    state: &GenState,
    frames: &BodyFrames,
    side: Side,
    segment: Segment,
) -> Jac3x8 {
    let s = side.sign();
    let mut jac = Jac3x8::zeros();
    let att = match segment {
        Segment::Proximal => rot_x(s * state.q_s()).transpose() * frames.rate_map,
        Segment::Distal => {
            rot_x(s * (state.q_s() + state.q_e())).transpose() * frames.rate_map
        }
    };
    jac.fixed_view_mut::<3, 3>(0, 3).copy_from(&att);
    jac.fixed_view_mut::<3, 1>(0, 6).copy_from(&(s * X_AXIS));
    if segment == Segment::Distal {
        jac.fixed_view_mut::<3, 1>(0, 7).copy_from(&(s * X_AXIS));
    }
    jac
}

/// Linear and angular COM Jacobians for all five bodies, in the order
/// `[body, left proximal, left distal, right proximal, right distal]`.
pub struct ComJacobians {
    pub linear: [Jac3x8; 5],
    pub angular: [Jac3x8; 5],
}

pub fn com_jacobians(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
) -> ComJacobians {
    let mut linear = [Jac3x8::zeros(); 5];
    let mut angular = [Jac3x8::zeros(); 5];
    linear[0] = base_linear_jacobian();
    angular[0] = base_angular_jacobian(frames);
    let mut k = 1;
    for side in Side::BOTH {
        for segment in [Segment::Proximal, Segment::Distal] {
            linear[k] = com_linear_jacobian(state, params, frames, side, segment);
            angular[k] = wing_angular_jacobian(state, frames, side, segment);
            k += 1;
        }
    }
    ComJacobians { linear, angular }
}

/// Jacobian and position of the external-force application point on one
/// wing (fraction `wing_point` along the distal length vector from the
/// elbow). The base-translation block is always the identity.
pub fn force_point(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
    side: Side,
) -> WingPoint {
    wing_point(state, params, frames, side, Segment::Distal, params.wing_point)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::state::{GenVec, IDX_QE, IDX_QS};
    use crate::spatial::EulerZyx;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn test_params() -> ModelParams {
        ModelParams {
            l1: [0.0, 0.1, 0.0],
            l2: [0.0, 0.3, 0.0],
            l3: [0.0, 0.25, 0.0],
            ..ModelParams::default()
        }
    }

    pub(crate) fn random_state(rng: &mut StdRng) -> GenState {
        let mut q = GenVec::zeros();
        let mut qd = GenVec::zeros();
        for i in 0..3 {
            q[i] = rng.gen_range(-1.0..1.0);
            qd[i] = rng.gen_range(-1.0..1.0);
        }
        q[3] = rng.gen_range(-0.8..0.8);
        q[4] = rng.gen_range(-0.8..0.8);
        q[5] = rng.gen_range(-2.0..2.0);
        q[IDX_QS] = rng.gen_range(-1.2..1.2);
        q[IDX_QE] = rng.gen_range(-1.2..1.2);
        for i in 3..8 {
            qd[i] = rng.gen_range(-2.0..2.0);
        }
        GenState::new(q, qd)
    }

    #[test]
    fn zero_state_proximal_com() {
        let p = test_params();
        let (coms, _) = forward_kinematics(&GenState::zero(), &p).unwrap();
        // l1 + l2/2 along y
        assert!((coms.p_p[0] - Vec3::new(0.0, 0.25, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn zero_state_distal_com() {
        let p = test_params();
        let (coms, _) = forward_kinematics(&GenState::zero(), &p).unwrap();
        // p_P + l2/2 + l3 along y
        assert!((coms.p_d[0] - Vec3::new(0.0, 0.65, 0.0)).norm() <= 1e-15);
    }

    #[test]
    fn shoulder_rotation_matches_hand_evaluation() {
        let p = test_params();
        let mut state = GenState::zero();
        state.q[IDX_QS] = std::f64::consts::FRAC_PI_6;
        let (coms, _) = forward_kinematics(&state, &p).unwrap();
        let expected = Vec3::new(0.0, 0.1, 0.0)
            + 0.5 * (rot_x(std::f64::consts::FRAC_PI_6) * Vec3::new(0.0, 0.3, 0.0));
        assert!((coms.p_p[0] - expected).norm() <= 1e-12);
    }

    #[test]
    fn mirror_symmetry_across_xz_plane() {
        let p = test_params();
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..20 {
            let st = random_state(&mut rng);
            // Reflected state: mirror position, negate roll and yaw.
            let mut qm = st.q;
            qm[1] = -qm[1];
            qm[3] = -qm[3];
            qm[5] = -qm[5];
            let stm = GenState::new(qm, GenVec::zeros());

            let (coms, _) = forward_kinematics(&st, &p).unwrap();
            let (coms_m, _) = forward_kinematics(&stm, &p).unwrap();

            let mirror = |v: Vec3| Vec3::new(v.x, -v.y, v.z);
            assert!((mirror(coms.p_p[0]) - coms_m.p_p[1]).norm() <= 1e-14);
            assert!((mirror(coms.p_d[0]) - coms_m.p_d[1]).norm() <= 1e-14);
            assert!((mirror(coms.p_p[1]) - coms_m.p_p[0]).norm() <= 1e-14);
            assert!((mirror(coms.p_d[1]) - coms_m.p_d[0]).norm() <= 1e-14);
        }
    }

    #[test]
    fn base_translation_columns_are_identity() {
        let p = test_params();
        let mut rng = StdRng::seed_from_u64(3);
        let st = random_state(&mut rng);
        let frames = BodyFrames::compute(&st, &p).unwrap();
        let jacs = com_jacobians(&st, &p, &frames);
        for j in jacs.linear {
            let block: Mat3 = j.fixed_view::<3, 3>(0, 0).into();
            assert_eq!(block, Mat3::identity());
        }
    }

    /// Finite-difference oracle for every COM linear Jacobian.
    #[test]
    fn com_jacobians_match_finite_differences() {
        let p = test_params();
        let mut rng = StdRng::seed_from_u64(11);
        let h = 1e-6;
        for _ in 0..10 {
            let st = random_state(&mut rng);
            let frames = BodyFrames::compute(&st, &p).unwrap();
            for side in Side::BOTH {
                for segment in [Segment::Proximal, Segment::Distal] {
                    let jac = com_linear_jacobian(&st, &p, &frames, side, segment);
                    for k in 0..8 {
                        let mut qp = st.q;
                        let mut qm = st.q;
                        qp[k] += h;
                        qm[k] -= h;
                        let fp = forward_kinematics(&GenState::new(qp, st.qd), &p).unwrap().0;
                        let fm = forward_kinematics(&GenState::new(qm, st.qd), &p).unwrap().0;
                        let (pp, pm) = match segment {
                            Segment::Proximal => (fp.p_p[side.index()], fm.p_p[side.index()]),
                            Segment::Distal => (fp.p_d[side.index()], fm.p_d[side.index()]),
                        };
                        let col_fd = (pp - pm) / (2.0 * h);
                        let col: Vec3 = jac.fixed_view::<3, 1>(0, k).into();
                        assert!(
                            (col - col_fd).norm() <= 1e-5,
                            "side {side:?} segment {segment:?} col {k}: {col:?} vs {col_fd:?}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn shoulder_rate_gives_unit_local_angular_velocity() {
        let p = test_params();
        let mut st = GenState::zero();
        st.qd[IDX_QS] = 1.0;
        let frames = BodyFrames::compute(&st, &p).unwrap();
        let jac = wing_angular_jacobian(&st, &frames, Side::Left, Segment::Proximal);
        let omega = jac * st.qd;
        assert!((omega - Vec3::new(1.0, 0.0, 0.0)).norm() <= 1e-15);
    }

    /// Angular Jacobians against a finite-difference of the rotation
    /// matrices: omega_local = unskew(R^T dR/dt).
    #[test]
    fn angular_jacobians_match_rotation_derivative() {
        let p = test_params();
        let mut rng = StdRng::seed_from_u64(19);
        let h = 1e-6;
        for _ in 0..10 {
            let st = random_state(&mut rng);
            let frames = BodyFrames::compute(&st, &p).unwrap();
            let qp = GenState::new(st.q + st.qd * h, st.qd);
            let qm = GenState::new(st.q - st.qd * h, st.qd);
            let fp = BodyFrames::compute(&qp, &p).unwrap();
            let fm = BodyFrames::compute(&qm, &p).unwrap();
            for side in Side::BOTH {
                for segment in [Segment::Proximal, Segment::Distal] {
                    let jac = wing_angular_jacobian(&st, &frames, side, segment);
                    let omega = jac * st.qd;
                    let r = frames.wing(side, segment);
                    let rd = (fp.wing(side, segment) - fm.wing(side, segment)) / (2.0 * h);
                    let w = r.transpose() * rd;
                    let omega_fd = Vec3::new(w[(2, 1)], w[(0, 2)], w[(1, 0)]);
                    assert!(
                        (omega - omega_fd).norm() <= 1e-5,
                        "side {side:?} segment {segment:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn force_point_jacobian_finite_difference() {
        let mut p = test_params();
        p.wing_point = 0.37;
        let mut rng = StdRng::seed_from_u64(23);
        let st = random_state(&mut rng);
        let frames = BodyFrames::compute(&st, &p).unwrap();
        let wp = force_point(&st, &p, &frames, Side::Left);
        let h = 1e-6;
        for k in 0..8 {
            let mut qp = st.q;
            let mut qm = st.q;
            qp[k] += h;
            qm[k] -= h;
            let sp = GenState::new(qp, st.qd);
            let sm = GenState::new(qm, st.qd);
            let framesp = BodyFrames::compute(&sp, &p).unwrap();
            let framesm = BodyFrames::compute(&sm, &p).unwrap();
            let pos_p = force_point(&sp, &p, &framesp, Side::Left).pos;
            let pos_m = force_point(&sm, &p, &framesm, Side::Left).pos;
            let col_fd = (pos_p - pos_m) / (2.0 * h);
            let col: Vec3 = wp.jac.fixed_view::<3, 1>(0, k).into();
            assert!((col - col_fd).norm() <= 1e-5, "col {k}");
        }
    }

    #[test]
    fn force_point_at_zero_fraction_is_distal_root() {
        let mut p = test_params();
        p.wing_point = 0.0;
        let mut rng = StdRng::seed_from_u64(29);
        let st = random_state(&mut rng);
        let frames = BodyFrames::compute(&st, &p).unwrap();
        let wp = force_point(&st, &p, &frames, Side::Left);
        // Distal root = end of proximal segment = proximal point at f = 1.
        let root = wing_point(&st, &p, &frames, Side::Left, Segment::Proximal, 1.0);
        assert!((wp.pos - root.pos).norm() <= 1e-14);
        assert!((wp.jac - root.jac).norm() <= 1e-12);
    }

    #[test]
    fn gimbal_lock_propagates() {
        let p = test_params();
        let mut st = GenState::zero();
        st.q[4] = std::f64::consts::FRAC_PI_2;
        assert!(forward_kinematics(&st, &p).is_err());
    }

    #[test]
    fn euler_state_example() {
        // Level attitude non-trivial euler: rotations stay orthonormal.
        let p = test_params();
        let st = GenState::from_parts(
            Vec3::zeros(),
            EulerZyx::new(0.3, -0.5, 1.2),
            0.2,
            -0.4,
            Vec3::zeros(),
            Vec3::zeros(),
            0.0,
            0.0,
        );
        let (_, frames) = forward_kinematics(&st, &p).unwrap();
        for r in [frames.r_b, frames.r_p[0], frames.r_d[0], frames.r_p[1], frames.r_d[1]] {
            let err = (r.transpose() * r - Mat3::identity()).norm();
            assert!(err <= 1e-12);
            assert!((r.determinant() - 1.0).abs() <= 1e-12);
        }
    }
}
