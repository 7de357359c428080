//! The fidelity operator Ω, its variants, and its spectrum.

mod build;
mod spectrum;
mod sum;
mod tilde;

pub use build::{
    build_omega, build_omega_fixed, build_omega_recursive, exy_action, lambda_expand, BasisMap,
    MeasBasis,
};
pub use spectrum::{
    beta_eigenspace, diagonalize_commuting, diagonalize_pauli_sum, fwht, omega_spectrum,
    spectral_summary, SpectralSummary, Spectrum, DEFAULT_SPECTRAL_CAP,
};
pub use sum::{Dyadic, PauliSum, PauliSumFile, PauliTerm};
pub use tilde::{
    cz_chain_conjugate, omega_tilde_1d, omega_tilde_from_omega, omega_tilde_recurrence_step,
};
