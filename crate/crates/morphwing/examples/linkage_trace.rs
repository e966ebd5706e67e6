//! Sweep the default single-crank linkage through one full revolution and
//! print the closure residual and the shoulder/elbow read-outs.
//!
//! ```bash
//! cargo run --example linkage_trace
//! ```

use morphwing::linkage::ks::{default_ks_config, KsSystem};

fn main() {
    let sys = KsSystem::new(default_ks_config()).expect("default linkage compiles");
    let assembled = sys.assemble().expect("assembles at the reference crank");
    println!("reference assembly: q = {:?}\n", assembled.q.as_slice());

    println!(" crank (deg)   shoulder (rad)   elbow (rad)   closure residual");
    let mut guess = assembled.q;
    let mut worst = 0.0_f64;
    for deg in (0..360).step_by(15) {
        let crank = (deg as f64).to_radians();
        let q = sys.solve_position(crank, &guess).expect("position solve");
        guess = q;
        let residual = sys.residual(&q).norm();
        worst = worst.max(residual);
        println!(
            "    {deg:3}          {:+.4}         {:+.4}        {residual:.2e}",
            sys.config().shoulder.value(&q),
            sys.config().elbow.value(&q),
        );
    }
    println!("\nworst closure residual over the sweep: {worst:.2e} m");

    // Transmission is affine in the crank acceleration at any state.
    let mut state = assembled;
    state.qd = sys
        .consistent_rates(&state.q, sys.config().crank_rate)
        .expect("consistent rates");
    let (_, y0) = sys.velocity_accel(&state, 0.0).unwrap();
    let (_, y1) = sys.velocity_accel(&state, 1.0).unwrap();
    let (_, y2) = sys.velocity_accel(&state, 2.0).unwrap();
    println!(
        "output accelerations at u_k = 0, 1, 2: shoulder ({:+.3}, {:+.3}, {:+.3}) rad/s^2",
        y0[0], y1[0], y2[0]
    );
    println!(
        "affinity defect: {:.2e} (shoulder), {:.2e} (elbow)",
        ((y2[0] - y1[0]) - (y1[0] - y0[0])).abs(),
        ((y2[1] - y1[1]) - (y1[1] - y0[1])).abs()
    );
}
