//! Dense simulation of ideal and noisy measurement-based computation on
//! small resource states.

pub(crate) mod dense;
mod mbqc;
mod noise;
mod states;

pub use mbqc::{
    apply_gamma, apply_gamma_density, average_mbqc_fidelity, build_omega_theta,
    clifford_average_omega, ideal_output, mbqc_fidelity_at, omega_theta_expectation, AngleMode,
    AngleSpec, AverageFidelity, BRANCH_TOL, CLIFFORD_ANGLES, CROSS_CHECK_TOL,
    EXHAUSTIVE_MAX_MEASURED,
};
pub use noise::NoiseModel;
pub use states::{
    expectation, group_vector, ideal_vector, state_fidelity, AmplitudeDump, DensityState,
    PureState,
};
