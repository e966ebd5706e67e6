//! Fixed-step RK4 simulation engine, structured logging, and run metrics.

pub mod engine;
pub mod log;
pub mod metrics;
pub mod rk4;

pub use engine::run_scenario;
pub use log::{CsvLog, LogRecord, SimLog, COLUMNS};
pub use metrics::{
    energy_drift, fit_decay, fit_rise, force_metrics, r_squared, rmse, step_response,
    ForceMetrics, StepResponse,
};
pub use rk4::rk4_step;
