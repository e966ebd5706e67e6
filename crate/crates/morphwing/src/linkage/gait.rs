//! Prescribed sinusoidal wing gait with analytically consistent derivatives.
//!
//! Fallback gait source when no linkage geometry is configured. The default
//! parameters put the elbow a quarter period behind the shoulder so the wing
//! is extended through the downstroke and folded through the upstroke.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One joint's harmonic profile: `q(t) = offset + amplitude * sin(2 pi f t + phase)`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct JointProfile {
    pub offset: f64,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

impl JointProfile {
    pub fn validate(&self, key: &str) -> Result<()> {
        if !(self.frequency > 0.0) {
            return Err(Error::invalid_config(
                format!("{key}.frequency"),
                format!("must be > 0, got {}", self.frequency),
            ));
        }
        Ok(())
    }

    pub fn sample(&self, t: f64) -> (f64, f64, f64) {
        let w = 2.0 * std::f64::consts::PI * self.frequency;
        let arg = w * t + self.phase;
        let q = self.offset + self.amplitude * arg.sin();
        let qd = self.amplitude * w * arg.cos();
        let qdd = -self.amplitude * w * w * arg.sin();
        (q, qd, qdd)
    }
}

/// Position, rate, and acceleration targets for both wing joints.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct GaitTargets {
    pub q_s: f64,
    pub qd_s: f64,
    pub qdd_s: f64,
    pub q_e: f64,
    pub qd_e: f64,
    pub qdd_e: f64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SinusoidGait {
    pub shoulder: JointProfile,
    pub elbow: JointProfile,
}

impl Default for SinusoidGait {
    fn default() -> Self {
        Self {
            shoulder: JointProfile {
                offset: 0.0,
                amplitude: 0.5,
                frequency: 4.0,
                phase: 0.0,
            },
            elbow: JointProfile {
                offset: -0.3,
                amplitude: 0.3,
                frequency: 4.0,
                phase: -std::f64::consts::FRAC_PI_2,
            },
        }
    }
}

impl SinusoidGait {
    pub fn validate(&self) -> Result<()> {
        self.shoulder.validate("gait.sinusoid.shoulder")?;
        self.elbow.validate("gait.sinusoid.elbow")
    }

    pub fn sample(&self, t: f64) -> GaitTargets {
        let (q_s, qd_s, qdd_s) = self.shoulder.sample(t);
        let (q_e, qd_e, qdd_e) = self.elbow.sample(t);
        GaitTargets { q_s, qd_s, qdd_s, q_e, qd_e, qdd_e }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_amplitude_is_constant() {
        let p = JointProfile { offset: 0.7, amplitude: 0.0, frequency: 2.0, phase: 1.0 };
        for t in [0.0, 0.13, 0.5, 2.7] {
            let (q, qd, qdd) = p.sample(t);
            assert_eq!(q, 0.7);
            assert_eq!(qd, 0.0);
            assert_eq!(qdd, 0.0);
        }
    }

    #[test]
    fn harmonic_identity() {
        let p = JointProfile { offset: -0.3, amplitude: 0.3, frequency: 4.0, phase: -0.7 };
        let w = 2.0 * std::f64::consts::PI * p.frequency;
        for t in [0.0, 0.01, 0.2, 0.33] {
            let (q, _, qdd) = p.sample(t);
            assert!((qdd + w * w * (q - p.offset)).abs() <= 1e-9 * w * w);
        }
    }

    #[test]
    fn derivative_chain_consistency() {
        let g = SinusoidGait::default();
        let h = 1e-7;
        for t in [0.05, 0.21, 0.4] {
            let a = g.sample(t - h);
            let b = g.sample(t + h);
            let mid = g.sample(t);
            assert!(((b.q_s - a.q_s) / (2.0 * h) - mid.qd_s).abs() <= 1e-5);
            assert!(((b.qd_s - a.qd_s) / (2.0 * h) - mid.qdd_s).abs() <= 1e-3);
            assert!(((b.q_e - a.q_e) / (2.0 * h) - mid.qd_e).abs() <= 1e-5);
        }
    }

    /// Sign check over one period: the default gait keeps the elbow more
    /// extended (closer to zero) during the downstroke than the upstroke.
    #[test]
    fn default_gait_extends_elbow_on_downstroke() {
        let g = SinusoidGait::default();
        let period = 1.0 / g.shoulder.frequency;
        let n = 4000;
        let mut down_sum = 0.0;
        let mut down_count = 0;
        let mut up_sum = 0.0;
        let mut up_count = 0;
        for k in 0..n {
            let t = period * (k as f64) / (n as f64);
            let s = g.sample(t);
            if s.qd_s < 0.0 {
                down_sum += s.q_e;
                down_count += 1;
            } else {
                up_sum += s.q_e;
                up_count += 1;
            }
        }
        let down_mean = down_sum / down_count as f64;
        let up_mean = up_sum / up_count as f64;
        // q_e = 0 is fully extended, more negative is more folded.
        assert!(
            down_mean > up_mean + 0.1,
            "downstroke mean {down_mean}, upstroke mean {up_mean}"
        );
    }
}
