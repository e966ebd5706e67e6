//! Conjugate-momentum disturbance observer.
//!
//! The conjugate momentum `p = M(q) qd` obeys `pdot = u_a + u_m + u_f -
//! gamma(q, qd)` with `gamma = G - C^T qd`, so the residual
//!
//! ```text
//! r(t) = K ( p(t) - int_0^t (u_a + u_m - gamma_hat + r) ds - p(0) )
//! ```
//!
//! evolves as `rdot = K (u_f - r)` when the model is exact: a first-order
//! low-pass estimate of the unknown generalized force, channel by channel.
//! The observer consumes only `(p, u_a, u_m, gamma_hat)`; it never sees the
//! true disturbance.
//!
//! The running integral is advanced by the trapezoidal rule at the sampling
//! step, with the residual's own contribution handled implicitly (the
//! update is linear in the new residual, so the implicit form is a cheap
//! per-channel solve and keeps the filter exact for slowly varying inputs).

use crate::error::{Error, Result};
use crate::model::dynamics::mass_matrix;
use crate::model::params::ModelParams;
use crate::model::state::{base_block, GenState, GenVec};
use crate::spatial::Vec3;

/// Conjugate momentum `p = M(q) qd`.
pub fn conjugate_momentum(state: &GenState, params: &ModelParams) -> Result<GenVec> {
    Ok(mass_matrix(state, params)? * state.qd)
}

#[derive(Clone, Debug)]
pub struct ObserverState {
    /// Residual: the low-pass estimate of the unknown generalized force.
    pub r: GenVec,
    /// Accumulated integral of `(u_a + u_m - gamma_hat + r)`.
    pub i_acc: GenVec,
    /// Initial conjugate momentum.
    pub p0: GenVec,
    /// Diagonal observer gains (1/s), all positive.
    pub k: GenVec,
    /// Integrand value at the previous sample, for the trapezoid.
    last_integrand: Option<GenVec>,
}

impl ObserverState {
    /// New observer with `r(0) = 0` and zero accumulated integral; `p0`
    /// must be the conjugate momentum at t = 0.
    pub fn new(k: GenVec, p0: GenVec) -> Result<Self> {
        if k.iter().any(|g| !(*g > 0.0)) {
            return Err(Error::invalid_config(
                "scenario.observer_gain",
                "all gains must be > 0",
            ));
        }
        Ok(Self {
            r: GenVec::zeros(),
            i_acc: GenVec::zeros(),
            p0,
            k,
            last_integrand: None,
        })
    }

    /// Record the t = 0 integrand (known inputs at the initial state) so
    /// the first trapezoid spans the full step.
    pub fn prime(&mut self, u_a: &GenVec, u_m: &GenVec, gamma_hat: &GenVec) {
        self.last_integrand = Some(u_a + u_m - gamma_hat + self.r);
    }

    /// Advance the observer to the next sample.
    ///
    /// `p_now`, `u_a`, `u_m`, and `gamma_hat` are evaluated at the new
    /// sample time; `dt` is the spacing since the previous one. Returns the
    /// updated residual.
    pub fn step(
        &mut self,
        p_now: &GenVec,
        u_a: &GenVec,
        u_m: &GenVec,
        gamma_hat: &GenVec,
        dt: f64,
    ) -> Result<GenVec> {
        if !(dt > 0.0) {
            return Err(Error::NonPositiveDt(dt));
        }
        let known_new = u_a + u_m - gamma_hat;
        let prev = match &self.last_integrand {
            Some(v) => *v,
            // Unprimed observer: fall back to the new sample's known inputs
            // (one O(dt) startup term).
            None => known_new + self.r,
        };

        // Implicit trapezoid in the new residual:
        // r = K (p - I - dt/2 (prev + known_new + r) - p0)
        let mut r_new = GenVec::zeros();
        for i in 0..8 {
            let k = self.k[i];
            let rhs = k
                * (p_now[i]
                    - self.i_acc[i]
                    - 0.5 * dt * (prev[i] + known_new[i])
                    - self.p0[i]);
            r_new[i] = rhs / (1.0 + 0.5 * k * dt);
        }

        let integrand_new = known_new + r_new;
        self.i_acc += 0.5 * dt * (prev + integrand_new);
        self.last_integrand = Some(integrand_new);
        self.r = r_new;
        Ok(r_new)
    }
}

/// Base-translation block of the residual: the inertial-frame estimate of
/// the total external point force (exact projection, because the point
/// Jacobian's base block is the identity for every application point).
pub fn extract_point_force_estimate(r: &GenVec) -> Vec3 {
    base_block(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::dynamics::{coriolis_matrix, forward_dynamics, gravity_vector};
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn zero_velocity_zero_momentum() {
        let params = ModelParams::default();
        let state = GenState::zero();
        let p = conjugate_momentum(&state, &params).unwrap();
        assert_eq!(p.amax(), 0.0);
    }

    #[test]
    fn base_block_is_total_mass_times_velocity() {
        let params = ModelParams::default();
        let mut rng = StdRng::seed_from_u64(5);
        let mut state = GenState::zero();
        for i in 0..8 {
            state.q[i] = rng.gen_range(-0.5..0.5);
        }
        state.qd[0] = 1.3;
        state.qd[1] = -0.2;
        state.qd[2] = 0.7;
        let p = conjugate_momentum(&state, &params).unwrap();
        let expected = params.total_mass() * state.v_b();
        assert!((base_block(&p) - expected).norm() <= 1e-12);
    }

    /// Momentum identity oracle: central difference of p along an RK4
    /// trajectory equals `u_total + C^T qd - G`.
    #[test]
    fn momentum_rate_matches_identity_along_trajectory() {
        let params = ModelParams::default();
        let mut state = GenState::zero();
        state.qd[0] = 0.5;
        state.qd[6] = 2.0;
        state.qd[7] = -1.0;
        let u = {
            let mut u = GenVec::zeros();
            u[2] = 0.3;
            u[6] = 0.01;
            u
        };
        let dt = 1e-4;
        let zero = GenVec::zeros();
        let deriv = |s: &GenState| -> (GenVec, GenVec) {
            (s.qd, forward_dynamics(s, &params, &u, &zero, &zero).unwrap())
        };
        let step = |s: &GenState| -> GenState {
            let (k1q, k1v) = deriv(s);
            let s2 = GenState::new(s.q + 0.5 * dt * k1q, s.qd + 0.5 * dt * k1v);
            let (k2q, k2v) = deriv(&s2);
            let s3 = GenState::new(s.q + 0.5 * dt * k2q, s.qd + 0.5 * dt * k2v);
            let (k3q, k3v) = deriv(&s3);
            let s4 = GenState::new(s.q + dt * k3q, s.qd + dt * k3v);
            let (k4q, k4v) = deriv(&s4);
            GenState::new(
                s.q + dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q),
                s.qd + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
            )
        };

        let mut traj = vec![state];
        for _ in 0..40 {
            traj.push(step(traj.last().unwrap()));
        }
        for n in (5..35).step_by(7) {
            let p_prev = conjugate_momentum(&traj[n - 1], &params).unwrap();
            let p_next = conjugate_momentum(&traj[n + 1], &params).unwrap();
            let pdot_fd = (p_next - p_prev) / (2.0 * dt);
            let s = &traj[n];
            let c = coriolis_matrix(s, &params).unwrap();
            let g = gravity_vector(s, &params).unwrap();
            let pdot = u + c.transpose() * s.qd - g;
            assert!(
                (pdot_fd - pdot).amax() <= 1e-4,
                "step {n}: {:e}",
                (pdot_fd - pdot).amax()
            );
        }
    }

    /// Standalone filter check on a synthetic single-channel system with
    /// M = 1, gamma = 0: a constant disturbance of 0.15 with K = 20 gives
    /// the analytic first-order step response.
    #[test]
    fn analytic_step_response() {
        let k = GenVec::repeat(20.0);
        let mut obs = ObserverState::new(k, GenVec::zeros()).unwrap();
        let zero = GenVec::zeros();
        obs.prime(&zero, &zero, &zero);
        let dt = 1e-4;
        let u_f = 0.15;
        let mut t = 0.0;
        let mut r_at_quarter = 0.0;
        while t < 0.25 - 1e-12 {
            t += dt;
            // p(t) = integral of u_f on channel 2.
            let mut p = GenVec::zeros();
            p[2] = u_f * t;
            let r = obs.step(&p, &zero, &zero, &zero, dt).unwrap();
            r_at_quarter = r[2];
        }
        let expected = u_f * (1.0 - (-20.0_f64 * 0.25).exp());
        assert!(
            (r_at_quarter - expected).abs() <= 0.01 * expected,
            "r(0.25) = {r_at_quarter} vs {expected}"
        );
    }

    #[test]
    fn doubling_gain_halves_rise_time() {
        let rise_time = |k_gain: f64| -> f64 {
            let mut obs =
                ObserverState::new(GenVec::repeat(k_gain), GenVec::zeros()).unwrap();
            let zero = GenVec::zeros();
            obs.prime(&zero, &zero, &zero);
            let dt = 1e-5;
            let mut t = 0.0;
            loop {
                t += dt;
                let mut p = GenVec::zeros();
                p[0] = 0.15 * t;
                let r = obs.step(&p, &zero, &zero, &zero, dt).unwrap();
                if r[0] >= 0.15 * (1.0 - (-1.0_f64).exp()) {
                    return t;
                }
                assert!(t < 1.0, "no rise");
            }
        };
        let t20 = rise_time(20.0);
        let t40 = rise_time(40.0);
        assert!((t40 / t20 - 0.5).abs() <= 0.02, "t20 {t20}, t40 {t40}");
    }

    /// Low-pass filter property: sinusoidal disturbance at frequency w
    /// comes out with gain |K/(jw+K)| and phase -atan(w/K).
    #[test]
    fn sinusoid_frequency_response() {
        let k_gain = 20.0;
        for omega in [5.0, 20.0, 80.0] {
            let mut obs =
                ObserverState::new(GenVec::repeat(k_gain), GenVec::zeros()).unwrap();
            let zero = GenVec::zeros();
            obs.prime(&zero, &zero, &zero);
            let dt = 1e-4;
            let amp = 0.2;
            // p(t) = int u_f = amp (1 - cos(w t)) / w on channel 1.
            let total = 6.0 * 2.0 * std::f64::consts::PI / omega;
            let steps = (total / dt) as usize;
            let mut series = Vec::with_capacity(steps);
            for n in 1..=steps {
                let t = n as f64 * dt;
                let mut p = GenVec::zeros();
                p[1] = amp * (1.0 - (omega * t).cos()) / omega;
                let r = obs.step(&p, &zero, &zero, &zero, dt).unwrap();
                series.push((t, r[1]));
            }
            // Demodulate the last two periods.
            let period = 2.0 * std::f64::consts::PI / omega;
            let t_end = steps as f64 * dt;
            let t_start = t_end - 2.0 * period;
            let mut num_sin = 0.0;
            let mut num_cos = 0.0;
            let mut count = 0.0;
            for (t, r) in &series {
                if *t >= t_start {
                    num_sin += r * (omega * t).sin();
                    num_cos += r * (omega * t).cos();
                    count += 1.0;
                }
            }
            let a_sin = 2.0 * num_sin / count;
            let a_cos = 2.0 * num_cos / count;
            let meas_amp = (a_sin * a_sin + a_cos * a_cos).sqrt();
            let meas_phase = a_cos.atan2(a_sin);

            let expected_amp = amp * k_gain / (omega * omega + k_gain * k_gain).sqrt();
            let expected_phase = -(omega / k_gain).atan();
            assert!(
                (meas_amp / expected_amp - 1.0).abs() <= 0.05,
                "omega {omega}: amp {meas_amp} vs {expected_amp}"
            );
            let phase_err = (meas_phase - expected_phase).abs();
            assert!(
                phase_err <= 5.0_f64.to_radians(),
                "omega {omega}: phase {meas_phase} vs {expected_phase}"
            );
        }
    }

    #[test]
    fn extraction_is_base_projection() {
        let mut r = GenVec::zeros();
        r[0] = 0.1;
        r[1] = -0.2;
        r[2] = 0.3;
        r[5] = 9.0;
        assert_eq!(extract_point_force_estimate(&r), Vec3::new(0.1, -0.2, 0.3));
    }

    #[test]
    fn rejects_non_positive_dt() {
        let mut obs = ObserverState::new(GenVec::repeat(20.0), GenVec::zeros()).unwrap();
        let zero = GenVec::zeros();
        assert!(matches!(
            obs.step(&zero, &zero, &zero, &zero, 0.0),
            Err(Error::NonPositiveDt(_))
        ));
    }

    #[test]
    fn rejects_non_positive_gain() {
        let mut k = GenVec::repeat(20.0);
        k[3] = 0.0;
        assert!(ObserverState::new(k, GenVec::zeros()).is_err());
    }
}
