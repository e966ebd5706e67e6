//! Lagrangian dynamics of the eight-coordinate model: mass matrix,
//! Coriolis matrix, gravity vector, and the constrained equation of motion
//!
//! ```text
//! M(q) a = -C(q, qd) qd - G(q) + u_a + u_m + u_f
//! ```
//!
//! `C` is assembled from Christoffel symbols of `M` with the partial
//! derivatives of `M` taken by central finite differences (step
//! [`FD_STEP`]); analytic differentiation of the full 8x8 matrix is
//! error-prone and the identities `Mdot = C + C^T` and skewness of
//! `Mdot - 2C` are verified by tests at the tolerance this scheme
//! supports (1e-6).

use nalgebra::SMatrix;

use crate::error::{Error, Result};
use crate::model::kinematics::{com_jacobians, forward_kinematics, BodyFrames};
use crate::model::params::{ModelParams, Segment, Side};
use crate::model::state::{GenState, GenVec};
use crate::spatial::{rot_x, skew, Vec3};

pub type GenMat = SMatrix<f64, 8, 8>;

/// Central-difference step for dM/dq.
pub const FD_STEP: f64 = 1e-6;

const X_AXIS: Vec3 = Vec3::new(1.0, 0.0, 0.0);

/// Mass matrix `M(q) = sum_F m_F J_F^lin^T J_F^lin + J_F^ang^T I_F J_F^ang`.
/// Symmetric positive-definite for valid parameters.
pub fn mass_matrix(state: &GenState, params: &ModelParams) -> Result<GenMat> {
    let frames = BodyFrames::compute(state, params)?;
    Ok(mass_matrix_with_frames(state, params, &frames))
}

pub fn mass_matrix_with_frames(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
) -> GenMat {
    let jacs = com_jacobians(state, params, frames);
    let masses = [params.m_b, params.m_p, params.m_d, params.m_p, params.m_d];
    let inertias = [
        Vec3::from(params.i_b),
        params.inertia_diag(Segment::Proximal),
        params.inertia_diag(Segment::Distal),
        params.inertia_diag(Segment::Proximal),
        params.inertia_diag(Segment::Distal),
    ];
    let mut m = GenMat::zeros();
    for k in 0..5 {
        let jl = &jacs.linear[k];
        let ja = &jacs.angular[k];
        m += masses[k] * jl.transpose() * jl;
        // J^T diag(I) J without forming the diagonal matrix.
        let mut weighted = *ja;
        for row in 0..3 {
            for col in 0..8 {
                weighted[(row, col)] *= inertias[k][row];
            }
        }
        m += ja.transpose() * weighted;
    }
    // Exact symmetrization; the construction is symmetric up to rounding.
    0.5 * (m + m.transpose())
}

/// Gravity vector `G = dU/dq` with `U = g sum_F m_F p_F_z`.
pub fn gravity_vector(state: &GenState, params: &ModelParams) -> Result<GenVec> {
    let frames = BodyFrames::compute(state, params)?;
    Ok(gravity_vector_with_frames(state, params, &frames))
}

pub fn gravity_vector_with_frames(
    state: &GenState,
    params: &ModelParams,
    frames: &BodyFrames,
) -> GenVec {
    let jacs = com_jacobians(state, params, frames);
    let masses = [params.m_b, params.m_p, params.m_d, params.m_p, params.m_d];
    let mut g = GenVec::zeros();
    for k in 0..5 {
        let z_row = jacs.linear[k].row(2);
        g += params.gravity * masses[k] * z_row.transpose();
    }
    g
}

/// Partial derivatives of M w.r.t. each generalized coordinate by central
/// differences. M does not depend on the base position, so the first three
/// slots stay zero.
fn mass_matrix_partials(state: &GenState, params: &ModelParams) -> Result<[GenMat; 8]> {
    let mut partials = [GenMat::zeros(); 8];
    for k in 3..8 {
        let mut qp = state.q;
        let mut qm = state.q;
        qp[k] += FD_STEP;
        qm[k] -= FD_STEP;
        let mp = mass_matrix(&GenState::new(qp, state.qd), params)?;
        let mm = mass_matrix(&GenState::new(qm, state.qd), params)?;
        partials[k] = (mp - mm) / (2.0 * FD_STEP);
    }
    Ok(partials)
}

/// Coriolis matrix from Christoffel symbols of the mass matrix:
/// `C_ij = sum_k c_ijk qd_k` with
/// `c_ijk = (dM_ij/dq_k + dM_ik/dq_j - dM_jk/dq_i) / 2`.
///
/// Satisfies `Mdot = C + C^T` along trajectories and the skew-symmetry of
/// `Mdot - 2C`.
pub fn coriolis_matrix(state: &GenState, params: &ModelParams) -> Result<GenMat> {
    let dm = mass_matrix_partials(state, params)?;
    let qd = state.qd;
    let mut c = GenMat::zeros();
    for i in 0..8 {
        for j in 0..8 {
            let mut cij = 0.0;
            for k in 0..8 {
                cij += 0.5 * (dm[k][(i, j)] + dm[j][(i, k)] - dm[i][(j, k)]) * qd[k];
            }
            c[(i, j)] = cij;
        }
    }
    Ok(c)
}

/// `gamma(q, qd) = G(q) - C^T(q, qd) qd`, the bias term of the conjugate
/// momentum identity `pdot = u_total - gamma`.
pub fn gamma(state: &GenState, params: &ModelParams) -> Result<GenVec> {
    let g = gravity_vector(state, params)?;
    let c = coriolis_matrix(state, params)?;
    Ok(g - c.transpose() * state.qd)
}

/// Everything the per-step pipeline needs from one state evaluation.
pub struct DynamicsTerms {
    pub frames: BodyFrames,
    pub mass: GenMat,
    pub coriolis: GenMat,
    pub gravity: GenVec,
}

impl DynamicsTerms {
    pub fn compute(state: &GenState, params: &ModelParams) -> Result<Self> {
        let frames = BodyFrames::compute(state, params)?;
        let mass = mass_matrix_with_frames(state, params, &frames);
        let gravity = gravity_vector_with_frames(state, params, &frames);
        let coriolis = coriolis_matrix(state, params)?;
        Ok(Self { frames, mass, coriolis, gravity })
    }

    /// Bias vector `-C qd - G` of the equation of motion.
    pub fn bias(&self, state: &GenState) -> GenVec {
        -(self.coriolis * state.qd) - self.gravity
    }

    pub fn gamma(&self, state: &GenState) -> GenVec {
        self.gravity - self.coriolis.transpose() * state.qd
    }

    /// Solve `M a = bias + u` by Cholesky factorization.
    pub fn accel(&self, state: &GenState, u: &GenVec) -> Result<GenVec> {
        let rhs = self.bias(state) + u;
        let chol = self
            .mass
            .cholesky()
            .ok_or_else(|| Error::NumericalSingularity("mass matrix factorization failed".into()))?;
        Ok(chol.solve(&rhs))
    }
}

/// Forward dynamics `a = M^{-1}(-C qd - G + u_a + u_m + u_f)` via a
/// symmetric positive-definite factorization.
pub fn forward_dynamics(
    state: &GenState,
    params: &ModelParams,
    u_a: &GenVec,
    u_m: &GenVec,
    u_f: &GenVec,
) -> Result<GenVec> {
    let terms = DynamicsTerms::compute(state, params)?;
    terms.accel(state, &(u_a + u_m + u_f))
}

/// Kinetic and potential energy evaluated body-by-body through the velocity
/// recursion, independent of the Jacobian/mass-matrix assembly. Tests use
/// the quadratic form `qd^T M qd / 2` as the cross-check.
pub fn energies(state: &GenState, params: &ModelParams) -> Result<(f64, f64)> {
    let (coms, frames) = forward_kinematics(state, params)?;
    let omega_b = frames.rate_map * state.euler_rates();
    let rb_dot = frames.r_b * skew(&omega_b);

    let mut kinetic = 0.5
        * (params.m_b * state.v_b().norm_squared()
            + omega_b.dot(&Vec3::from(params.i_b).component_mul(&omega_b)));
    let mut potential = params.gravity
        * (params.m_b * coms.p_b.z
            + params.m_p * (coms.p_p[0].z + coms.p_p[1].z)
            + params.m_d * (coms.p_d[0].z + coms.p_d[1].z));

    for side in Side::BOTH {
        let s = side.sign();
        let l1 = params.l1_side(side);
        let l2 = params.l2_side(side);
        let l3 = params.l3_side(side);
        let rs = rot_x(s * state.q_s());
        let re = rot_x(s * state.q_e());
        let rs_dot = s * state.qd_s() * skew(&X_AXIS) * rs;
        let re_dot = s * state.qd_e() * skew(&X_AXIS) * re;

        let omega_p = rs.transpose() * omega_b + s * state.qd_s() * X_AXIS;
        let omega_d = re.transpose() * omega_p + s * state.qd_e() * X_AXIS;

        let w_p = l1 + 0.5 * (rs * l2);
        let w_p_dot = 0.5 * (rs_dot * l2);
        let v_p = state.v_b() + rb_dot * w_p + frames.r_b * w_p_dot;

        let w_d = l1 + rs * l2 + rs * (re * l3);
        let w_d_dot = rs_dot * l2 + rs_dot * (re * l3) + rs * (re_dot * l3);
        let v_d = state.v_b() + rb_dot * w_d + frames.r_b * w_d_dot;

        let i_p = params.inertia_diag(Segment::Proximal);
        let i_d = params.inertia_diag(Segment::Distal);
        kinetic += 0.5
            * (params.m_p * v_p.norm_squared()
                + omega_p.dot(&i_p.component_mul(&omega_p))
                + params.m_d * v_d.norm_squared()
                + omega_d.dot(&i_d.component_mul(&omega_d)));
    }
    // Potential above already summed every body.
    let _ = &mut potential;
    Ok((kinetic, potential))
}
