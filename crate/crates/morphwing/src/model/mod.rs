//! Five-body floating-base multibody model: parameters, generalized state,
//! forward kinematics, Jacobians, and Lagrangian dynamics.

pub mod dynamics;
pub mod kinematics;
pub mod params;
pub mod state;

pub use dynamics::{
    coriolis_matrix, energies, forward_dynamics, gamma, gravity_vector, mass_matrix,
    DynamicsTerms, GenMat,
};
pub use kinematics::{
    com_jacobians, force_point, forward_kinematics, wing_point, BodyFrames, ComJacobians,
    ComPositions, Jac3x8, WingPoint,
};
pub use params::{ModelParams, Segment, Side};
pub use state::{base_block, GenState, GenVec, DOF, IDX_PITCH, IDX_PX, IDX_PY, IDX_PZ, IDX_QE, IDX_QS, IDX_ROLL, IDX_YAW};
