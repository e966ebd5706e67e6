//! Passivity audit: with aerodynamics off and no actuation or disturbance
//! the multibody model is conservative, so total energy along a freely
//! swinging trajectory must hold to the integrator's precision.
//!
//! ```bash
//! cargo run --release --example energy_audit
//! ```

use morphwing::config::RunConfig;
use morphwing::disturbance::GaitSource;
use morphwing::model::state::GenVec;
use morphwing::model::GenState;
use morphwing::sim::{energy_drift, run_scenario};

fn main() {
    let mut cfg = RunConfig::default();
    cfg.scenario.noise_sigma = 0.0;
    cfg.scenario.base_gain = 0.0;
    cfg.scenario.step_magnitude = 0.0;
    cfg.scenario.step_window = [0.0, 0.0];
    cfg.scenario.aero_enabled = false;
    cfg.scenario.gait_source = GaitSource::None;

    // Tumbling start: base motion, attitude rates, and wing swing.
    let mut q = GenVec::zeros();
    let mut qd = GenVec::zeros();
    q[3] = 0.25;
    q[4] = -0.1;
    q[6] = 0.4;
    q[7] = -0.5;
    qd[0] = 0.8;
    qd[2] = 0.3;
    qd[3] = 1.5;
    qd[5] = 0.7;
    qd[6] = 4.0;
    qd[7] = -3.0;

    let log = run_scenario(&cfg, Some(GenState::new(q, qd))).expect("simulation");
    let ek: Vec<f64> = log.records.iter().map(|r| r.e_kin).collect();
    let ep: Vec<f64> = log.records.iter().map(|r| r.e_pot).collect();

    println!("   t       kinetic     potential     total       drift");
    let e0 = ek[0] + ep[0];
    for (i, rec) in log.records.iter().enumerate().step_by(250) {
        let total = ek[i] + ep[i];
        println!(
            "  {:4.2}   {:9.5}   {:+10.5}   {:+9.6}   {:+.2e}",
            rec.t,
            ek[i],
            ep[i],
            total,
            total - e0
        );
    }
    let drift = energy_drift(&ek, &ep).expect("drift");
    println!("\nrelative energy drift over {} s at dt = {}: {drift:.3e}", cfg.sim.duration, cfg.sim.dt);
}
