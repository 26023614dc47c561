//! Exact bipartite entanglement spectra of one-dimensional few-particle
//! quantum states and their classical (ħ → 0) limits.
//!
//! The crate solves the single-particle Schrödinger problem on a lattice,
//! builds reduced-density-matrix spectra of N-fermion (and two-boson)
//! states for a spatial bipartition from mode overlap matrices, and checks
//! them against closed-form classical predictions: orbit occupation
//! probabilities, subset-product spectra and Shannon entropies, WKB wave
//! functions with the first quantum correction, stationary-phase overlap
//! asymptotics, and emptiness formation probabilities by two independent
//! determinant routes.

pub mod asymptotics;
pub mod efp;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod numerics;
pub mod rdm;
pub mod semiclassics;

pub use error::{Error, Result};
pub use lattice::{
    box_analytic_mode, box_continuum_mode, build_hamiltonian, continuum_limit_energy, solve_modes,
    to_continuum, LatticeGrid, ModeForm, PhysicalParams, PotentialKind, PotentialSpec,
    SingleParticleMode, TridiagonalHamiltonian,
};
pub use rdm::{
    bosonic_two_particle_spectrum, brute_force_rdm, cauchy_binet_check, entanglement_entropy,
    overlap_matrix, rank_one_sector_check, rdm_spectrum_exact, sector_top_eigenvalue,
    single_particle_spectrum, Bipartition, ManyBodyStateDense, OverlapMatrix, RdmSpectrum,
};
pub use semiclassics::{
    binomial_entropy, classical_entropy, classical_momentum, classical_prediction,
    classical_probability, classical_probability_complement, classical_rdm_spectrum,
    corrected_occupation, gamma_correction, microcanonical_entropy, orbit_period, turning_points,
    wkb_wavefunction, ClassicalOrbit, ClassicalPrediction, WkbMode,
};
