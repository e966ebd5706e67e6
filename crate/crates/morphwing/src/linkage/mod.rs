//! Wing-joint trajectory generation and actuation: the crank-driven planar
//! linkage, the prescribed sinusoidal gait, and the computed-torque mapping
//! of joint accelerations into the generalized motor torque.

pub mod actuation;
pub mod gait;
pub mod ks;

pub use actuation::{computed_torque, computed_torque_with_terms};
pub use gait::{GaitTargets, JointProfile, SinusoidGait};
pub use ks::{
    default_ks_config, BaseRef, ConstraintDef, KsConfig, KsState, KsSystem, KsVec, OutputMap,
    SegmentDef, CLOSURE_TOL, KS_COORDS,
};
