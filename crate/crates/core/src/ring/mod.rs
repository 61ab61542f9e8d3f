//! The n-rebit ring: Γ spectrum, vertex states `ρ_r`, and `K_max(θ)`.

mod kmax;
mod spectrum;
mod states;

pub use kmax::{kmax_asymptotic, kmax_closed, mixture_weight, optimal_mixture, theta_in_range};
pub use spectrum::{
    analytic_block_spectrum, block_basis, extreme_eigenvalues, extreme_modulus, gamma_apply, gamma_block, gamma_matrix,
    match_spectra, multi_fermion_eigenvalue, numeric_block_spectrum, polygon_contains, single_fermion_modes, up_count,
    ModeParity, RingSpectrum,
};
pub use states::{
    equalize_phases, equalizing_angles, gamma_expectation, link_coefficients, omega_state, phase_spread, rho_r,
    ring_observables, six_rebit_state, vertex_gauge, RingObservables, PHASE_TOL,
};
