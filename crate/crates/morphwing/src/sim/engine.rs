//! Fixed-step simulation of the coupled system: rigid-body state, aero lag
//! states, and (when the linkage drives the gait) the linkage coordinates,
//! advanced together by RK4. Per step the pipeline evaluates gait targets,
//! computed torque, aerodynamic forces, and the ground-truth disturbance;
//! the observer is updated discretely after each step from the logged
//! momentum and known inputs, never from the disturbance itself.
//!
//! Disturbance noise is drawn once per step and held across the four RK4
//! stages, so the logged "actual force" is unambiguous. The seed alone
//! determines the run.

use nalgebra::DVector;

use crate::aero::{self, AeroState};
use crate::config::RunConfig;
use crate::disturbance::{self, GaitSource};
use crate::error::{Error, Result};
use crate::linkage::actuation::computed_torque_with_terms;
use crate::linkage::gait::GaitTargets;
use crate::linkage::ks::{KsState, KsSystem, KsVec, CLOSURE_TOL, KS_COORDS};
use crate::model::dynamics::{energies, gamma, mass_matrix, DynamicsTerms};
use crate::model::params::ModelParams;
use crate::model::state::{GenState, GenVec, IDX_QE, IDX_QS};
use crate::observer::{extract_point_force_estimate, ObserverState};
use crate::sim::log::{LogRecord, SimLog};
use crate::sim::rk4::rk4_step_with_k1;

/// Gait drive resolved from config.
enum GaitDrive {
    Sinusoid(crate::linkage::gait::SinusoidGait),
    Ks(Box<KsSystem>),
    None,
}

/// Flat-state layout: `[q(8), qd(8), xi(n_aero), ks_q(9), ks_qd(9)]`,
/// with the linkage block present only under the linkage gait.
struct Layout {
    n_aero: usize,
    has_ks: bool,
}

impl Layout {
    fn len(&self) -> usize {
        16 + self.n_aero + if self.has_ks { 2 * KS_COORDS } else { 0 }
    }

    fn unpack(&self, flat: &DVector<f64>) -> (GenState, AeroState, Option<KsState>) {
        let q = GenVec::from_iterator(flat.iter().take(8).copied());
        let qd = GenVec::from_iterator(flat.iter().skip(8).take(8).copied());
        let xi = AeroState::from_iterator(self.n_aero, flat.iter().skip(16).take(self.n_aero).copied());
        let ks = if self.has_ks {
            let base = 16 + self.n_aero;
            let kq = KsVec::from_iterator(flat.iter().skip(base).take(KS_COORDS).copied());
            let kqd =
                KsVec::from_iterator(flat.iter().skip(base + KS_COORDS).take(KS_COORDS).copied());
            Some(KsState { q: kq, qd: kqd })
        } else {
            None
        };
        (GenState::new(q, qd), xi, ks)
    }

    fn pack(&self, state: &GenState, xi: &AeroState, ks: Option<&KsState>) -> DVector<f64> {
        let mut flat = DVector::zeros(self.len());
        for i in 0..8 {
            flat[i] = state.q[i];
            flat[8 + i] = state.qd[i];
        }
        for i in 0..self.n_aero {
            flat[16 + i] = xi[i];
        }
        if let (true, Some(ks)) = (self.has_ks, ks) {
            let base = 16 + self.n_aero;
            for i in 0..KS_COORDS {
                flat[base + i] = ks.q[i];
                flat[base + KS_COORDS + i] = ks.qd[i];
            }
        }
        flat
    }
}

/// Everything one pipeline evaluation produces.
struct Eval {
    deriv: DVector<f64>,
    state: GenState,
    terms: DynamicsTerms,
    u_a: GenVec,
    u_m: GenVec,
}

struct Engine<'a> {
    cfg: &'a RunConfig,
    layout: Layout,
    drive: GaitDrive,
    /// Parameter set the observer believes in (differs from the plant
    /// under configured model mismatch).
    observer_params: ModelParams,
    exact_model: bool,
}

impl<'a> Engine<'a> {
    fn new(cfg: &'a RunConfig) -> Result<Self> {
        cfg.validate()?;
        let drive = match cfg.scenario.gait_source {
            GaitSource::Sinusoid => GaitDrive::Sinusoid(cfg.gait.sinusoid),
            GaitSource::Ks => {
                let ks_cfg = cfg.ks.clone().ok_or_else(|| {
                    Error::invalid_config("ks", "section required for the linkage gait")
                })?;
                GaitDrive::Ks(Box::new(KsSystem::new(ks_cfg)?))
            }
            GaitSource::None => GaitDrive::None,
        };
        let layout = Layout {
            n_aero: cfg.aero.state_dim(),
            has_ks: matches!(drive, GaitDrive::Ks(_)),
        };
        let scale = cfg.scenario.mismatch_mass_scale;
        let mut observer_params = cfg.model.clone();
        observer_params.m_b *= scale;
        observer_params.m_p *= scale;
        observer_params.m_d *= scale;
        Ok(Self {
            cfg,
            layout,
            drive,
            observer_params,
            exact_model: scale == 1.0,
        })
    }

    fn initial_flat(&self, overriding: Option<GenState>) -> Result<DVector<f64>> {
        let ks0 = match &self.drive {
            GaitDrive::Ks(sys) => Some(sys.assemble()?),
            _ => None,
        };
        let state = if let Some(s) = overriding {
            s
        } else {
            let sim = &self.cfg.sim;
            let targets = match &self.drive {
                GaitDrive::Sinusoid(g) => Some(g.sample(0.0)),
                GaitDrive::Ks(sys) => Some(sys.targets(ks0.as_ref().unwrap(), 0.0)?),
                GaitDrive::None => None,
            };
            let mut q = GenVec::zeros();
            let mut qd = GenVec::zeros();
            for i in 0..3 {
                q[i] = sim.initial_position[i];
                q[3 + i] = sim.initial_attitude[i];
                qd[i] = sim.initial_velocity[i];
                qd[3 + i] = sim.initial_attitude_rates[i];
            }
            if let Some(t) = targets {
                q[IDX_QS] = t.q_s;
                q[IDX_QE] = t.q_e;
                qd[IDX_QS] = t.qd_s;
                qd[IDX_QE] = t.qd_e;
            }
            GenState::new(q, qd)
        };
        state.check()?;
        if !state.joints_within_limits(&self.cfg.model) {
            return Err(Error::invalid_config(
                "sim/gait",
                format!(
                    "initial joint angles (q_s = {:.3}, q_e = {:.3}) exceed model.joint_limit = {:.3}",
                    state.q_s(),
                    state.q_e(),
                    self.cfg.model.joint_limit
                ),
            ));
        }
        let xi = self.cfg.aero.zero_state();
        Ok(self.layout.pack(&state, &xi, ks0.as_ref()))
    }

    fn gait_targets(&self, t: f64, ks: Option<&KsState>) -> Result<Option<GaitTargets>> {
        match &self.drive {
            GaitDrive::Sinusoid(g) => Ok(Some(g.sample(t))),
            GaitDrive::Ks(sys) => {
                let ks = ks.expect("linkage state present under the linkage gait");
                Ok(Some(sys.targets(ks, 0.0)?))
            }
            GaitDrive::None => Ok(None),
        }
    }

    /// Full pipeline at one (stage) time: gait -> aero -> computed torque
    /// -> disturbance -> forward dynamics. The noise value and the step
    /// gate are held constant across the stages of one integrator step.
    fn eval(&self, t: f64, flat: &DVector<f64>, noise: f64, step_on: bool) -> Result<Eval> {
        let (state, xi, ks) = self.layout.unpack(flat);
        let terms = DynamicsTerms::compute(&state, &self.cfg.model)?;

        let aero_eval = aero::evaluate(&xi, t, &self.cfg.aero, &state, &self.cfg.model, &terms.frames);
        let u_a = if self.cfg.scenario.aero_enabled {
            aero_eval.u_a
        } else {
            GenVec::zeros()
        };

        let targets = self.gait_targets(t, ks.as_ref())?;
        let u_m = match &targets {
            Some(g) => {
                let kp = self.cfg.gait.track_kp;
                let kd = self.cfg.gait.track_kd;
                let qdd_s = g.qdd_s + kd * (g.qd_s - state.qd_s()) + kp * (g.q_s - state.q_s());
                let qdd_e = g.qdd_e + kd * (g.qd_e - state.qd_e()) + kp * (g.q_e - state.q_e());
                computed_torque_with_terms(&state, &terms, qdd_s, qdd_e, &u_a)?
            }
            None => GenVec::zeros(),
        };

        let gt = disturbance::ground_truth_with_step(
            &state,
            &terms.frames,
            &self.cfg.model,
            noise,
            &self.cfg.scenario,
            step_on,
        );

        let accel = terms.accel(&state, &(u_a + u_m + gt.u_f))?;

        let mut deriv = DVector::zeros(self.layout.len());
        for i in 0..8 {
            deriv[i] = state.qd[i];
            deriv[8 + i] = accel[i];
        }
        for i in 0..self.layout.n_aero {
            deriv[16 + i] = aero_eval.xi_dot[i];
        }
        if let (GaitDrive::Ks(sys), Some(ks_state)) = (&self.drive, &ks) {
            let (ks_qdd, _) = sys.velocity_accel(ks_state, 0.0)?;
            let base = 16 + self.layout.n_aero;
            for i in 0..KS_COORDS {
                deriv[base + i] = ks_state.qd[i];
                deriv[base + KS_COORDS + i] = ks_qdd[i];
            }
        }

        Ok(Eval { deriv, state, terms, u_a, u_m })
    }
}

/// Run one scenario and return the structured log.
///
/// `initial_override` replaces the configured initial state (used by
/// conservation and regression studies); when absent the initial wing
/// joints are taken from the gait at t = 0 so the run starts on the
/// reference trajectory.
pub fn run_scenario(cfg: &RunConfig, initial_override: Option<GenState>) -> Result<SimLog> {
    let engine = Engine::new(cfg)?;
    let steps = cfg.sim.steps()?;
    let dt = cfg.sim.dt;
    let mut rng = cfg.scenario.rng();
    let mut flat = engine.initial_flat(initial_override)?;

    let k = cfg.scenario.observer_gain.to_vec();
    let mut observer: Option<ObserverState> = None;
    let mut current_r = GenVec::zeros();
    let mut records = Vec::with_capacity(steps / cfg.sim.decimation + 1);
    let mut noise_exceedances = 0usize;
    let mut warned_joint_limits = false;

    for n in 0..=steps {
        let t = n as f64 * dt;
        let noise = disturbance::sample_noise(&mut rng, cfg.scenario.noise_sigma);
        if cfg.scenario.noise_sigma > 0.0 && noise.abs() > 6.0 * cfg.scenario.noise_sigma {
            noise_exceedances += 1;
        }

        // The step gate for the interval [t, t + dt) is evaluated at the
        // interval's right endpoint: held intervals then cover the
        // left-open window exactly whenever its endpoints lie on the grid.
        let step_on = disturbance::step_active(t + dt, &cfg.scenario);
        let eval = engine.eval(t, &flat, noise, step_on).map_err(|e| {
            let (state, _, _) = engine.layout.unpack(&flat);
            log::error!(
                "pipeline failure at t = {t:.6}: {e}; last good state q = {:?}, qd = {:?}",
                state.q.as_slice(),
                state.qd.as_slice()
            );
            e
        })?;

        // Observer inputs under its own model (identical to the plant when
        // exact).
        let (p_hat, gamma_hat) = if engine.exact_model {
            (
                eval.terms.mass * eval.state.qd,
                eval.terms.gamma(&eval.state),
            )
        } else {
            (
                mass_matrix(&eval.state, &engine.observer_params)? * eval.state.qd,
                gamma(&eval.state, &engine.observer_params)?,
            )
        };

        match observer.as_mut() {
            None => {
                let mut obs = ObserverState::new(k, p_hat)?;
                obs.prime(&eval.u_a, &eval.u_m, &gamma_hat);
                observer = Some(obs);
            }
            Some(obs) => {
                if n % cfg.scenario.observer_decimation == 0 {
                    let dt_obs = cfg.scenario.observer_decimation as f64 * dt;
                    current_r = obs.step(&p_hat, &eval.u_a, &eval.u_m, &gamma_hat, dt_obs)?;
                }
            }
        }

        if n % cfg.sim.decimation == 0 {
            if !warned_joint_limits && !eval.state.joints_within_limits(&cfg.model) {
                log::warn!(
                    "joint limits exceeded at t = {t:.4} (q_s = {:.3}, q_e = {:.3}); continuing",
                    eval.state.q_s(),
                    eval.state.q_e()
                );
                warned_joint_limits = true;
            }
            let (e_kin, e_pot) = if cfg.sim.energy_audit {
                energies(&eval.state, &cfg.model)?
            } else {
                (0.0, 0.0)
            };
            let omega_b = eval.terms.frames.rate_map * eval.state.euler_rates();
            // The log records the actual force at the instant t (the held
            // step gate describes the following interval instead).
            let gt_log = disturbance::ground_truth_generalized(
                t,
                &eval.state,
                &eval.terms.frames,
                &cfg.model,
                noise,
                &cfg.scenario,
            );
            let logged_uf = if cfg.sim.debug_corrupt_uf_log {
                GenVec::zeros()
            } else {
                gt_log.u_f
            };
            let record = LogRecord {
                t,
                p_b: eval.state.p_b(),
                euler: eval.state.euler().to_vec(),
                q_s: eval.state.q_s(),
                q_e: eval.state.q_e(),
                qd: eval.state.qd,
                omega_b,
                u_a: eval.u_a,
                u_m: eval.u_m,
                u_f: logged_uf,
                f_left: gt_log.f_wing[0],
                f_right: gt_log.f_wing[1],
                r: current_r,
                estimate: extract_point_force_estimate(&current_r),
                e_kin,
                e_pot,
            };
            if !record.is_finite() {
                return Err(Error::NonFiniteDerivative {
                    time: t,
                    detail: "log record contains a non-finite channel".into(),
                });
            }
            records.push(record);
        }

        if n < steps {
            flat = rk4_step_with_k1(&flat, t, dt, &eval.deriv, |ts, s| {
                engine.eval(ts, s, noise, step_on).map(|e| e.deriv)
            })
            .map_err(|e| {
                log::error!("integration failure at t = {t:.6}: {e}");
                e
            })?;

            // Constraint maintenance for the linkage block.
            if let GaitDrive::Ks(sys) = &engine.drive {
                let (state, xi, Some(ks)) = engine.layout.unpack(&flat) else {
                    unreachable!("linkage state present under the linkage gait")
                };
                if sys.position_residual(&ks) > CLOSURE_TOL {
                    let reprojected = sys.reproject(&ks)?;
                    flat = engine.layout.pack(&state, &xi, Some(&reprojected));
                }
            }
        }
    }

    if noise_exceedances > 1 {
        log::warn!("{noise_exceedances} noise draws beyond six sigma");
    }

    Ok(SimLog {
        seed: cfg.scenario.seed,
        records,
        noise_exceedances,
    })
}
