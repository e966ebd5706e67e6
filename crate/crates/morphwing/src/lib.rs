//! Morphing-wing flapping-flight simulator with conjugate-momentum external
//! force estimation.
//!
//! The library models a bat-like flyer as five rigid bodies (main body plus
//! proximal/distal segments of each wing) with eight generalized coordinates,
//! drives the wing joints from either a single-crank linkage or a prescribed
//! sinusoidal gait, applies quasi-steady strip aerodynamics with Wagner-style
//! lag states, injects configurable point-force disturbances, and runs a
//! momentum-residual observer that estimates the unknown external force from
//! states and known inputs only.
//!
//! Modules:
//! - [`spatial`]: rotations, skew operator, Euler-angle kinematics
//! - [`model`]: multibody parameters, kinematics, and Lagrangian dynamics
//! - [`linkage`]: crank-driven planar linkage, sinusoidal gait, joint actuation
//! - [`aero`]: strip-theory aerodynamic subsystem in LTV state-space form
//! - [`observer`]: conjugate-momentum disturbance observer
//! - [`disturbance`]: ground-truth external force generation
//! - [`sim`]: fixed-step RK4 engine, logging, and metrics
//! - [`config`]: human-editable run configuration
//! - [`cli`]: drivers behind the `morphwing` binary
//! - [`plot`]: static SVG rendering of logged channels

// `!(x > 0.0)`-style guards are used on purpose: they reject NaN along
// with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aero;
pub mod cli;
pub mod config;
pub mod disturbance;
pub mod error;
pub mod linkage;
pub mod model;
pub mod observer;
pub mod plot;
pub mod sim;
pub mod spatial;

pub use error::{Error, Result};
