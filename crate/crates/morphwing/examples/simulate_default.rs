//! Run the default scenario end-to-end and print the headline metrics:
//! flight envelope, force-estimation R^2 per axis, and the observer's
//! identified step-response timing.
//!
//! ```bash
//! cargo run --release --example simulate_default
//! ```

use morphwing::config::RunConfig;
use morphwing::sim::{self, run_scenario};

fn main() {
    let cfg = RunConfig::default();
    println!(
        "simulating {} s at dt = {} s (seed {})...",
        cfg.sim.duration, cfg.sim.dt, cfg.scenario.seed
    );
    let started = std::time::Instant::now();
    let log = run_scenario(&cfg, None).expect("simulation");
    println!(
        "done in {:.2} s wall time, {} logged records",
        started.elapsed().as_secs_f64(),
        log.records.len()
    );

    let last = log.records.last().unwrap();
    let mut max_roll = 0.0_f64;
    let mut max_pitch = 0.0_f64;
    for r in &log.records {
        max_roll = max_roll.max(r.euler.x.abs());
        max_pitch = max_pitch.max(r.euler.y.abs());
    }
    println!(
        "final position ({:+.3}, {:+.3}, {:+.3}) m; max |roll| {:.3} rad, max |pitch| {:.3} rad",
        last.p_b.x, last.p_b.y, last.p_b.z, max_roll, max_pitch
    );

    let truth = log.truth_force();
    let estimate = log.estimate_force();
    let fm = sim::force_metrics(&truth, &estimate).expect("metrics");
    println!(
        "force estimation R^2: Fx {:.4}, Fy {:.4}, Fz {:.4}",
        fm.r_squared[0], fm.r_squared[1], fm.r_squared[2]
    );

    let sr = sim::step_response(&log.times(), &truth, &estimate, cfg.scenario.step_window)
        .expect("step response");
    let k = cfg.scenario.observer_gain.to_vec()[0];
    println!(
        "step response: rise {:.4} s, decay {:.4} s (analytic 3/K = {:.4} s), increment {:.3} N",
        sr.rise_time,
        sr.decay_time,
        3.0 / k,
        sr.increment
    );
}
