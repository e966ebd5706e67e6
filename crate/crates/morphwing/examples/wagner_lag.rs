//! Lag-state step response: subject one strip to a sudden downwash at
//! constant speed and compare the build-up of the effective downwash with
//! the analytic two-pole curve `phi(s) = 1 - a1 e^{-b1 s} - a2 e^{-b2 s}`
//! in semichord time.
//!
//! ```bash
//! cargo run --example wagner_lag
//! ```

use morphwing::aero::{aero_derivative, AeroConfig, AeroInput, INPUTS_PER_STRIP};

fn main() {
    let cfg = AeroConfig::default();
    let chord = cfg.strips[0].chord;
    let speed = 2.0;
    let w_step = 0.5;
    let [a1, a2] = cfg.wagner_a;
    let [b1, b2] = cfg.wagner_b;

    let mut y = AeroInput::zeros(cfg.input_dim());
    for g in 0..cfg.strip_count() {
        y[INPUTS_PER_STRIP * g + 2] = speed;
    }
    y[0] = w_step;

    let mut xi = cfg.zero_state();
    let dt = 1e-4;
    println!("chord {chord} m, speed {speed} m/s, downwash step {w_step} m/s\n");
    println!(" semichords   build-up   analytic   error");
    let mut t = 0.0;
    for target in [1.0, 2.0, 5.0, 10.0, 20.0, 40.0, 80.0] {
        let t_target = target * chord / (2.0 * speed);
        while t < t_target {
            let k1 = aero_derivative(&xi, &y, t, &cfg);
            let k2 = aero_derivative(&(&xi + &k1 * (dt / 2.0)), &y, t, &cfg);
            let k3 = aero_derivative(&(&xi + &k2 * (dt / 2.0)), &y, t, &cfg);
            let k4 = aero_derivative(&(&xi + &k3 * dt), &y, t, &cfg);
            xi += (k1 + 2.0 * k2 + 2.0 * k3 + k4) * (dt / 6.0);
            t += dt;
        }
        let s = 2.0 * speed * t / chord;
        let w_eff = (1.0 - a1 - a2) * w_step
            + 2.0 * speed / chord * (a1 * b1 * xi[0] + a2 * b2 * xi[1]);
        let build_up = w_eff / w_step;
        let analytic = 1.0 - a1 * (-b1 * s).exp() - a2 * (-b2 * s).exp();
        println!(
            "   {s:6.1}      {build_up:.5}    {analytic:.5}   {:.1e}",
            (build_up - analytic).abs()
        );
    }
    println!("\nthe build-up starts at {:.2} and approaches 1 as circulation develops", 1.0 - a1 - a2);
}
