//! Ballistic sanity check: with aerodynamics, actuation, and disturbance
//! all disabled and zero initial rates, the body must follow the
//! closed-form free fall to integrator precision.
//!
//! ```bash
//! cargo run --example free_fall
//! ```

use morphwing::config::RunConfig;
use morphwing::disturbance::GaitSource;
use morphwing::sim::run_scenario;

fn main() {
    let mut cfg = RunConfig::default();
    cfg.scenario.noise_sigma = 0.0;
    cfg.scenario.base_gain = 0.0;
    cfg.scenario.step_magnitude = 0.0;
    cfg.scenario.step_window = [0.0, 0.0];
    cfg.scenario.aero_enabled = false;
    cfg.scenario.gait_source = GaitSource::None;
    cfg.sim.duration = 0.5;
    cfg.sim.initial_velocity = [0.0, 0.0, 0.0];

    let log = run_scenario(&cfg, None).expect("simulation");
    let g = cfg.model.gravity;
    println!("   t        z (sim)      z (closed form)   error");
    let mut worst = 0.0_f64;
    for rec in log.records.iter().step_by(100) {
        let expected = -0.5 * g * rec.t * rec.t;
        let err = (rec.p_b.z - expected).abs();
        worst = worst.max(err);
        println!(
            "  {:4.2}   {:+.9}    {:+.9}     {err:.1e}",
            rec.t, rec.p_b.z, expected
        );
    }
    println!("\nworst deviation from z0 - g t^2 / 2: {worst:.2e} m");
}
