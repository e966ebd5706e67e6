//! Sample the default sinusoidal gait over one period and verify the
//! phasing: the elbow is extended through the downstroke and folded
//! through the upstroke.
//!
//! ```bash
//! cargo run --example gait_preview
//! ```

use morphwing::linkage::gait::SinusoidGait;

fn main() {
    let gait = SinusoidGait::default();
    let period = 1.0 / gait.shoulder.frequency;
    println!("flapping frequency {} Hz (period {:.3} s)\n", gait.shoulder.frequency, period);

    println!("  phase    q_s (rad)  qd_s (rad/s)   q_e (rad)   stroke");
    let n = 16;
    let mut down = (0.0, 0);
    let mut up = (0.0, 0);
    for k in 0..n {
        let t = period * k as f64 / n as f64;
        let s = gait.sample(t);
        let stroke = if s.qd_s < 0.0 { "down" } else { "up" };
        if s.qd_s < 0.0 {
            down = (down.0 + s.q_e, down.1 + 1);
        } else {
            up = (up.0 + s.q_e, up.1 + 1);
        }
        println!(
            "  {:4.2}    {:+7.3}    {:+8.2}     {:+7.3}    {stroke}",
            k as f64 / n as f64,
            s.q_s,
            s.qd_s,
            s.q_e
        );
    }
    let down_mean = down.0 / down.1 as f64;
    let up_mean = up.0 / up.1 as f64;
    println!(
        "\nmean elbow angle: downstroke {down_mean:+.3} rad, upstroke {up_mean:+.3} rad \
         (0 = extended, negative = folded)"
    );
    assert!(down_mean > up_mean, "elbow should extend during the downstroke");
    println!("the wing is more extended during the downstroke, as intended");
}
