//! Observer gain study: sweep K and tabulate the identified step-response
//! timing against the analytic 3/K, plus the force-estimation R^2.
//!
//! ```bash
//! cargo run --release --example gain_sweep
//! ```

use morphwing::config::RunConfig;
use morphwing::disturbance::GainSpec;
use morphwing::sim::{self, run_scenario};

fn main() {
    println!("   K (1/s)   rise (s)   3/K (s)   decay (s)   R2 Fy     R2 Fz");
    for gain in [5.0, 20.0, 80.0, 320.0] {
        let mut cfg = RunConfig::default();
        cfg.scenario.observer_gain = GainSpec::Uniform(gain);
        let log = run_scenario(&cfg, None).expect("simulation");
        let truth = log.truth_force();
        let estimate = log.estimate_force();
        let sr = sim::step_response(&log.times(), &truth, &estimate, cfg.scenario.step_window)
            .expect("step response");
        let fm = sim::force_metrics(&truth, &estimate).expect("metrics");
        println!(
            "   {gain:6.0}    {:7.4}    {:6.4}    {:7.4}    {:.4}    {:.4}",
            sr.rise_time,
            3.0 / gain,
            sr.decay_time,
            fm.r_squared[1],
            fm.r_squared[2]
        );
    }
    println!("\nrise time falls as 1/K; higher gain also tracks the oscillating");
    println!("baseline more closely, which is what lifts the R^2 values");
}
