//! Run metrics: coefficient of determination, RMSE, observer step-response
//! timing, and the energy audit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `R^2 = 1 - SS_res / SS_tot` with `SS_tot` about the mean of `actual`.
pub fn r_squared(actual: &[f64], estimated: &[f64]) -> Result<f64> {
    if actual.len() != estimated.len() {
        return Err(Error::SchemaMismatch(format!(
            "series lengths differ: {} vs {}",
            actual.len(),
            estimated.len()
        )));
    }
    if actual.len() < 2 {
        return Err(Error::DegenerateSeries("need at least two samples".into()));
    }
    let n = actual.len() as f64;
    let mean = actual.iter().sum::<f64>() / n;
    let ss_tot: f64 = actual.iter().map(|a| (a - mean) * (a - mean)).sum();
    let scale: f64 = actual.iter().map(|a| a * a).sum::<f64>().max(1e-300);
    if ss_tot <= 1e-12 * scale {
        return Err(Error::DegenerateSeries("actual series is constant".into()));
    }
    let ss_res: f64 = actual
        .iter()
        .zip(estimated)
        .map(|(a, e)| (a - e) * (a - e))
        .sum();
    Ok(1.0 - ss_res / ss_tot)
}

pub fn rmse(actual: &[f64], estimated: &[f64]) -> Result<f64> {
    if actual.len() != estimated.len() || actual.is_empty() {
        return Err(Error::SchemaMismatch("series lengths differ or empty".into()));
    }
    let ss: f64 = actual
        .iter()
        .zip(estimated)
        .map(|(a, e)| (a - e) * (a - e))
        .sum();
    Ok((ss / actual.len() as f64).sqrt())
}

/// Identify `y(t) = a * (1 - exp(-(t - t0)/tau))` from samples on the step
/// window, returning `(a, tau)`.
///
/// Uses the integral-equation form of the first-order response,
/// `y = (a/tau)(t - t0) - (1/tau) int y`, and regresses `y` on the elapsed
/// time and its own running integral. Ripple riding on the response enters
/// the regressor only through its integral (attenuated by its frequency),
/// which keeps the identified time constant unbiased in a way a direct
/// shape fit is not.
pub fn fit_rise(times: &[f64], values: &[f64], t0: f64) -> Result<(f64, f64)> {
    let integral = running_integral(times, values)?;
    let mut s11 = 0.0;
    let mut s12 = 0.0;
    let mut s22 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for i in 0..times.len() {
        let x1 = times[i] - t0;
        let x2 = integral[i];
        let y = values[i];
        s11 += x1 * x1;
        s12 += x1 * x2;
        s22 += x2 * x2;
        b1 += x1 * y;
        b2 += x2 * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-30 {
        return Err(Error::DegenerateSeries("rise fit regression is singular".into()));
    }
    let theta1 = (s22 * b1 - s12 * b2) / det;
    let theta2 = (s11 * b2 - s12 * b1) / det;
    let k = -theta2;
    if !(k > 0.0) {
        return Err(Error::DegenerateSeries(format!(
            "rise fit produced a non-positive rate {k}"
        )));
    }
    Ok((theta1 / k, 1.0 / k))
}

/// Identify `y(t) = a * exp(-(t - t0)/tau)` after a step release,
/// returning `(a, tau)`; same integral-equation regression with a constant
/// regressor in place of the ramp.
pub fn fit_decay(times: &[f64], values: &[f64], t0: f64) -> Result<(f64, f64)> {
    let _ = t0;
    let integral = running_integral(times, values)?;
    let n = times.len() as f64;
    let mut s12 = 0.0;
    let mut s22 = 0.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for i in 0..times.len() {
        let x2 = integral[i];
        let y = values[i];
        s12 += x2;
        s22 += x2 * x2;
        b1 += y;
        b2 += x2 * y;
    }
    let det = n * s22 - s12 * s12;
    if det.abs() <= 1e-30 {
        return Err(Error::DegenerateSeries("decay fit regression is singular".into()));
    }
    let theta1 = (s22 * b1 - s12 * b2) / det;
    let theta2 = (n * b2 - s12 * b1) / det;
    let k = -theta2;
    if !(k > 0.0) {
        return Err(Error::DegenerateSeries(format!(
            "decay fit produced a non-positive rate {k}"
        )));
    }
    Ok((theta1, 1.0 / k))
}

/// Trapezoidal running integral anchored at the first sample.
fn running_integral(times: &[f64], values: &[f64]) -> Result<Vec<f64>> {
    if times.len() != values.len() || times.len() < 4 {
        return Err(Error::DegenerateSeries(
            "need at least four samples for the response fit".into(),
        ));
    }
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(times.len());
    out.push(0.0);
    for i in 1..times.len() {
        acc += 0.5 * (values[i] + values[i - 1]) * (times[i] - times[i - 1]);
        out.push(acc);
    }
    Ok(out)
}

/// Relative energy drift: `max_t |E(t) - E(0)|` over the trajectory's
/// energy scale `max_t (T + |U|)`.
pub fn energy_drift(e_kin: &[f64], e_pot: &[f64]) -> Result<f64> {
    if e_kin.len() != e_pot.len() || e_kin.is_empty() {
        return Err(Error::DegenerateSeries("empty energy series".into()));
    }
    let e0 = e_kin[0] + e_pot[0];
    let mut max_dev = 0.0_f64;
    let mut scale = 0.0_f64;
    for (t, u) in e_kin.iter().zip(e_pot) {
        max_dev = max_dev.max((t + u - e0).abs());
        scale = scale.max(t + u.abs());
    }
    Ok(max_dev / scale.max(1e-300))
}

/// Per-axis force metrics plus observer step-response timing.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ForceMetrics {
    pub r_squared: [f64; 3],
    pub rmse: [f64; 3],
    /// Axis indices sorted by descending truth variance.
    pub variance_order: [usize; 3],
}

pub fn force_metrics(truth: &[Vec<f64>; 3], estimate: &[Vec<f64>; 3]) -> Result<ForceMetrics> {
    let mut r2 = [0.0; 3];
    let mut err = [0.0; 3];
    let mut var = [0.0; 3];
    for a in 0..3 {
        r2[a] = r_squared(&truth[a], &estimate[a])?;
        err[a] = rmse(&truth[a], &estimate[a])?;
        let n = truth[a].len() as f64;
        let mean = truth[a].iter().sum::<f64>() / n;
        var[a] = truth[a].iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    }
    let mut order = [0usize, 1, 2];
    order.sort_by(|i, j| var[*j].partial_cmp(&var[*i]).unwrap());
    Ok(ForceMetrics { r_squared: r2, rmse: err, variance_order: order })
}

/// Observer step-response timing measured from one run's log.
///
/// The observer is a first-order filter `r' = K (u - r)` driven by the
/// true generalized force, and the log carries both its input (the summed
/// truth force) and its output (the extracted estimate). The effective
/// filter rate is identified separately over the step window and over the
/// release tail by fitting the filter ODE driven by the logged truth to
/// the logged estimate, projected onto the step direction. Reported times
/// are three identified time constants; a symmetric response has matching
/// rise and decay times.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepResponse {
    pub rise_time: f64,
    pub decay_time: f64,
    /// Projected step increment magnitude (N).
    pub increment: f64,
}

pub fn step_response(
    times: &[f64],
    truth: &[Vec<f64>; 3],
    estimate: &[Vec<f64>; 3],
    window: [f64; 2],
) -> Result<StepResponse> {
    let (t0, t1) = (window[0], window[1]);
    if t1 <= t0 {
        return Err(Error::DegenerateSeries("empty step window".into()));
    }
    let span = (t1 - t0).min(0.25);
    let mean_over = |series: &[Vec<f64>; 3], lo: f64, hi: f64| -> Result<[f64; 3]> {
        let mut acc = [0.0; 3];
        let mut n = 0.0;
        for (i, t) in times.iter().enumerate() {
            if *t >= lo && *t <= hi {
                for a in 0..3 {
                    acc[a] += series[a][i];
                }
                n += 1.0;
            }
        }
        if n < 2.0 {
            return Err(Error::DegenerateSeries(format!(
                "too few samples in [{lo}, {hi}]"
            )));
        }
        Ok([acc[0] / n, acc[1] / n, acc[2] / n])
    };

    // Step direction and increment from the truth channel.
    let baseline = mean_over(truth, (t0 - span).max(0.0), t0)?;
    let plateau = mean_over(truth, t1 - span, t1)?;
    let delta = [
        plateau[0] - baseline[0],
        plateau[1] - baseline[1],
        plateau[2] - baseline[2],
    ];
    let mag = (delta[0] * delta[0] + delta[1] * delta[1] + delta[2] * delta[2]).sqrt();
    if mag <= 0.0 {
        return Err(Error::DegenerateSeries("no step increment detected".into()));
    }
    let unit = [delta[0] / mag, delta[1] / mag, delta[2] / mag];

    let project = |series: &[Vec<f64>; 3], i: usize| -> f64 {
        (0..3).map(|a| series[a][i] * unit[a]).sum()
    };

    let identify = |lo: f64, hi: f64| -> Result<f64> {
        let mut ts = Vec::new();
        let mut us = Vec::new();
        let mut rs = Vec::new();
        for (i, t) in times.iter().enumerate() {
            if *t >= lo && *t <= hi {
                ts.push(*t);
                us.push(project(truth, i));
                rs.push(project(estimate, i));
            }
        }
        if ts.len() < 8 {
            return Err(Error::DegenerateSeries(format!(
                "too few samples in [{lo}, {hi}] for filter identification"
            )));
        }
        // Simulate r' = k (u - r) from the measured initial value and
        // score against the measured output.
        let sse = |k: f64| -> f64 {
            let mut r = rs[0];
            let mut err = 0.0;
            for i in 1..ts.len() {
                let dt = ts[i] - ts[i - 1];
                // Trapezoidal (implicit in r) update of the filter.
                r = (r + 0.5 * k * dt * (us[i - 1] + us[i] - r)) / (1.0 + 0.5 * k * dt);
                let d = r - rs[i];
                err += d * d;
            }
            err
        };
        // Golden section on log k.
        let phi = (5.0_f64.sqrt() - 1.0) / 2.0;
        let mut a = (0.1_f64).ln();
        let mut b = (1.0e4_f64).ln();
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = sse(x1.exp());
        let mut f2 = sse(x2.exp());
        for _ in 0..120 {
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = sse(x1.exp());
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = sse(x2.exp());
            }
        }
        Ok((0.5 * (a + b)).exp())
    };

    let k_rise = identify(t0, t1)?;
    let t_end = *times.last().unwrap();
    let k_decay = identify(t1, t_end.min(t1 + 3.0 * (t1 - t0)))?;

    Ok(StepResponse {
        rise_time: 3.0 / k_rise,
        decay_time: 3.0 / k_decay,
        increment: mag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_estimate_gives_unity() {
        let a = vec![1.0, 2.0, 3.0, 2.5];
        assert!((r_squared(&a, &a).unwrap() - 1.0).abs() <= 1e-15);
    }

    #[test]
    fn mean_estimate_gives_zero() {
        let a = vec![1.0, 2.0, 3.0];
        let e = vec![2.0, 2.0, 2.0];
        assert!(r_squared(&a, &e).unwrap().abs() <= 1e-15);
    }

    #[test]
    fn hand_computed_example() {
        // SS_res = 1, SS_tot = 2 about mean 2.
        let a = vec![1.0, 2.0, 3.0];
        let e = vec![1.0, 2.0, 4.0];
        assert!((r_squared(&a, &e).unwrap() - 0.5).abs() <= 1e-15);
    }

    #[test]
    fn constant_actual_is_degenerate() {
        let a = vec![2.0, 2.0, 2.0];
        let e = vec![1.0, 2.0, 3.0];
        assert!(matches!(
            r_squared(&a, &e),
            Err(Error::DegenerateSeries(_))
        ));
    }

    #[test]
    fn rise_fit_recovers_time_constant() {
        let tau = 0.05;
        let times: Vec<f64> = (0..600).map(|i| 1.0 + i as f64 * 1e-3).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| {
                0.3 * (1.0 - (-(t - 1.0) / tau).exp())
                    + 0.03 * (25.0 * t).sin() // ripple
            })
            .collect();
        let (a, tau_fit) = fit_rise(&times, &values, 1.0).unwrap();
        assert!((tau_fit / tau - 1.0).abs() <= 0.1, "tau {tau_fit}");
        assert!((a - 0.3).abs() <= 0.03);
    }

    #[test]
    fn decay_fit_recovers_time_constant() {
        let tau = 0.08;
        let times: Vec<f64> = (0..500).map(|i| 1.6 + i as f64 * 1e-3).collect();
        let values: Vec<f64> = times.iter().map(|t| 0.2 * (-(t - 1.6) / tau).exp()).collect();
        let (_, tau_fit) = fit_decay(&times, &values, 1.6).unwrap();
        assert!((tau_fit / tau - 1.0).abs() <= 0.02);
    }

    #[test]
    fn energy_drift_of_conserved_series_is_zero() {
        let t = vec![1.0, 1.5, 2.0];
        let u = vec![3.0, 2.5, 2.0];
        assert_eq!(energy_drift(&t, &u).unwrap(), 0.0);
    }

    #[test]
    fn step_response_on_synthetic_series() {
        let k = 20.0;
        let dt = 1e-3;
        let n = 2000;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let mut truth = [vec![], vec![], vec![]];
        let mut est = [vec![], vec![], vec![]];
        for t in &times {
            // Step of (0, 0.1, 0.25) on (1.0, 1.6] riding on a 4 Hz
            // baseline, filtered at K = 20.
            let ripple = 0.03 * (25.0 * t).sin();
            let in_window = *t > 1.0 && *t <= 1.6;
            let step = if in_window { 1.0 } else { 0.0 };
            let resp = if *t <= 1.0 {
                0.0
            } else if *t <= 1.6 {
                1.0 - (-k * (t - 1.0)).exp()
            } else {
                let plateau: f64 = 1.0 - (-k * 0.6_f64).exp();
                plateau * (-k * (t - 1.6)).exp()
            };
            // Filtered ripple: gain and phase of K/(jw + K) at w = 25.
            let gain = k / (25.0_f64 * 25.0 + k * k).sqrt();
            let phase = (25.0_f64 / k).atan();
            let ripple_f = 0.03 * gain * (25.0 * t - phase).sin();
            truth[0].push(0.0);
            truth[1].push(0.1 * step + ripple);
            truth[2].push(0.25 * step + ripple);
            est[0].push(0.0);
            est[1].push(0.1 * resp + ripple_f);
            est[2].push(0.25 * resp + ripple_f);
        }
        let sr = step_response(&times, &truth, &est, [1.0, 1.6]).unwrap();
        assert!((sr.rise_time - 0.15).abs() <= 0.01, "rise {}", sr.rise_time);
        assert!((sr.decay_time - 0.15).abs() <= 0.01, "decay {}", sr.decay_time);
        let expected_mag = (0.1_f64 * 0.1 + 0.25 * 0.25).sqrt();
        assert!((sr.increment - expected_mag).abs() <= 0.02);
    }
}
