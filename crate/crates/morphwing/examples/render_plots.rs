//! Simulate the default scenario and render the four figure families as
//! static SVG files under `out/plots/`.
//!
//! ```bash
//! cargo run --release --example render_plots
//! ```

use morphwing::cli::{cmd_plot, cmd_simulate, RunManifest};

fn main() {
    let out = std::path::PathBuf::from("out");
    let manifest = RunManifest { config: None, out_dir: out.clone(), seed: None };
    let (log_path, metrics_path) = cmd_simulate(&manifest).expect("simulate");
    println!("wrote {}", log_path.display());
    println!("wrote {}", metrics_path.display());

    let channels = ["forces", "position", "states", "trajectory"].map(String::from);
    let written = cmd_plot(&log_path, &channels, &out.join("plots")).expect("plots");
    for path in written {
        println!("wrote {}", path.display());
    }
}
