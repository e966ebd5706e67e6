//! Classical fixed-step fourth-order Runge-Kutta.

use nalgebra::DVector;

use crate::error::{Error, Result};

/// One RK4 step of `x' = f(t, x)` from `t` to `t + dt`.
///
/// The derivative function may fail (e.g. gimbal lock at a stage point);
/// failures and non-finite stage derivatives abort the step.
pub fn rk4_step<F>(state: &DVector<f64>, t: f64, dt: f64, mut deriv: F) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let check = |k: &DVector<f64>, stage: &str, ts: f64| -> Result<()> {
        if k.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteDerivative {
                time: ts,
                detail: format!("stage {stage} produced a non-finite derivative"),
            });
        }
        Ok(())
    };
    let k1 = deriv(t, state)?;
    check(&k1, "k1", t)?;
    let k2 = deriv(t + 0.5 * dt, &(state + 0.5 * dt * &k1))?;
    check(&k2, "k2", t + 0.5 * dt)?;
    let k3 = deriv(t + 0.5 * dt, &(state + 0.5 * dt * &k2))?;
    check(&k3, "k3", t + 0.5 * dt)?;
    let k4 = deriv(t + dt, &(state + dt * &k3))?;
    check(&k4, "k4", t + dt)?;
    Ok(state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4))
}

/// RK4 step reusing a precomputed first-stage derivative (the boundary
/// evaluation the engine already needed for logging).
pub fn rk4_step_with_k1<F>(
    state: &DVector<f64>,
    t: f64,
    dt: f64,
    k1: &DVector<f64>,
    mut deriv: F,
) -> Result<DVector<f64>>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let k2 = deriv(t + 0.5 * dt, &(state + 0.5 * dt * k1))?;
    let k3 = deriv(t + 0.5 * dt, &(state + 0.5 * dt * &k2))?;
    let k4 = deriv(t + dt, &(state + dt * &k3))?;
    let next = state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if next.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFiniteDerivative {
            time: t,
            detail: "step produced a non-finite state".into(),
        });
    }
    Ok(next)
}
