//! Computed-torque mapping of desired joint accelerations into the
//! generalized motor torque `u_m`.
//!
//! The actuator drives only the shoulder and elbow coordinates; the base is
//! unactuated. Given desired joint accelerations, the torque follows from
//! block-partitioned inverse dynamics: solve the unactuated block for the
//! base acceleration induced by the joint motion, then read the joint rows.
//! The actuator knows `u_a` from the aerodynamic model but not the unknown
//! external force, so tracking error under disturbance is expected.

use nalgebra::{SMatrix, SVector};

use crate::error::{Error, Result};
use crate::model::dynamics::DynamicsTerms;
use crate::model::params::ModelParams;
use crate::model::state::{GenState, GenVec};

/// Compute `u_m` (nonzero only on the shoulder/elbow rows) such that the
/// coupled equation of motion with `u_f = 0` yields the desired joint
/// accelerations.
pub fn computed_torque(
    state: &GenState,
    params: &ModelParams,
    qdd_s: f64,
    qdd_e: f64,
    u_a: &GenVec,
) -> Result<GenVec> {
    let terms = DynamicsTerms::compute(state, params)?;
    computed_torque_with_terms(state, &terms, qdd_s, qdd_e, u_a)
}

pub fn computed_torque_with_terms(
    state: &GenState,
    terms: &DynamicsTerms,
    qdd_s: f64,
    qdd_e: f64,
    u_a: &GenVec,
) -> Result<GenVec> {
    // Unforced right-hand side: w = u_a - C qd - G.
    let w = terms.bias(state) + u_a;
    let m = &terms.mass;

    let m_bb: SMatrix<f64, 6, 6> = m.fixed_view::<6, 6>(0, 0).into();
    let m_bj: SMatrix<f64, 6, 2> = m.fixed_view::<6, 2>(0, 6).into();
    let m_jb: SMatrix<f64, 2, 6> = m.fixed_view::<2, 6>(6, 0).into();
    let m_jj: SMatrix<f64, 2, 2> = m.fixed_view::<2, 2>(6, 6).into();
    let w_b: SVector<f64, 6> = w.fixed_rows::<6>(0).into();
    let w_j: SVector<f64, 2> = w.fixed_rows::<2>(6).into();
    let a_j = SVector::<f64, 2>::new(qdd_s, qdd_e);

    let chol = m_bb.cholesky().ok_or_else(|| {
        Error::NumericalSingularity("unactuated block factorization failed".into())
    })?;
    let a_b = chol.solve(&(w_b - m_bj * a_j));

    let tau = m_jb * a_b + m_jj * a_j - w_j;
    let mut u_m = GenVec::zeros();
    u_m[6] = tau[0];
    u_m[7] = tau[1];
    Ok(u_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dynamics::forward_dynamics;
    use crate::model::state::{IDX_QE, IDX_QS};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_state(rng: &mut StdRng) -> GenState {
        let mut q = GenVec::zeros();
        let mut qd = GenVec::zeros();
        for i in 0..3 {
            q[i] = rng.gen_range(-1.0..1.0);
            qd[i] = rng.gen_range(-1.0..1.0);
        }
        q[3] = rng.gen_range(-0.6..0.6);
        q[4] = rng.gen_range(-0.6..0.6);
        q[5] = rng.gen_range(-2.0..2.0);
        q[IDX_QS] = rng.gen_range(-1.0..1.0);
        q[IDX_QE] = rng.gen_range(-1.0..1.0);
        for i in 3..8 {
            qd[i] = rng.gen_range(-2.0..2.0);
        }
        GenState::new(q, qd)
    }

    #[test]
    fn consistent_accelerations_need_no_torque() {
        let p = ModelParams::default();
        let mut rng = StdRng::seed_from_u64(31);
        let st = random_state(&mut rng);
        let u_a = GenVec::from_fn(|_, _| rng.gen_range(-0.1..0.1));
        let zero = GenVec::zeros();
        let free = forward_dynamics(&st, &p, &u_a, &zero, &zero).unwrap();
        let u_m = computed_torque(&st, &p, free[6], free[7], &u_a).unwrap();
        assert!(u_m.amax() <= 1e-10, "u_m = {u_m:?}");
    }

    #[test]
    fn round_trip_through_forward_dynamics() {
        let p = ModelParams::default();
        let mut rng = StdRng::seed_from_u64(37);
        for _ in 0..10 {
            let st = random_state(&mut rng);
            let u_a = GenVec::from_fn(|_, _| rng.gen_range(-0.1..0.1));
            let want_s = rng.gen_range(-50.0..50.0);
            let want_e = rng.gen_range(-50.0..50.0);
            let u_m = computed_torque(&st, &p, want_s, want_e, &u_a).unwrap();
            let a = forward_dynamics(&st, &p, &u_a, &u_m, &GenVec::zeros()).unwrap();
            assert!((a[6] - want_s).abs() <= 1e-8, "{} vs {want_s}", a[6]);
            assert!((a[7] - want_e).abs() <= 1e-8, "{} vs {want_e}", a[7]);
        }
    }

    #[test]
    fn base_rows_always_zero() {
        let p = ModelParams::default();
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..5 {
            let st = random_state(&mut rng);
            let u_m = computed_torque(&st, &p, 10.0, -5.0, &GenVec::zeros()).unwrap();
            for i in 0..6 {
                assert_eq!(u_m[i], 0.0);
            }
        }
    }
}
