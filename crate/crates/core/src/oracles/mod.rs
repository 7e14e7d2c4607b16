//! Brute-force evaluators used to cross-check the closed forms.

pub mod fock;
pub mod montecarlo;
pub mod quadrature;

pub use fock::{coherent_overlap, displacement_loop_phase, fock_sum_mean_field, FockSumResult, FockSumSpec};
pub use montecarlo::{mc_classical_visibility, mc_noisy_visibility, McEstimate, MC_BATCHES, MIN_MC_SAMPLES};
pub use quadrature::{quadrature_phase, QuadraturePhase};
