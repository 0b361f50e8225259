//! Conditional deflection patterns of Λ-type atoms crossing two orthogonal
//! cavity standing waves.
//!
//! The crate evaluates the joint atom–field amplitudes produced by the
//! dispersive interaction (Raman-resonant or off-resonant), projects the two
//! field modes onto quadrature eigenstates or phase states, and reports the
//! resulting conditional position and momentum densities of the atom, both at
//! the cavity exit and after free flight.
//!
//! Units: λ₁ = 1 for lengths, ℏ = 1, momenta reported in units of ℏk₁.

pub mod dynamics;
pub mod error;
pub mod fockbasis;
pub mod grid;
pub mod measurement;
pub mod propagation;
pub mod scenario;

#[cfg(feature = "cli")]
pub mod export;

mod par;
mod spectral;

pub use num_complex::Complex64 as C64;

pub use dynamics::{
    amplitudes_offresonant, amplitudes_raman, rabi, AmplitudeField, AmplitudeSource,
    AtomSuperposition, CouplingField, GaussianBeam, InteractionModel, InteractionParams, Regime,
};
pub use error::{DeflectionError, Result};
pub use fockbasis::{
    coherent_coeff, phase_overlap, quadrature_overlap, truncation_for, FockTruncation,
    PhaseOutcome, QuadratureOutcome, TwoModeCoherent,
};
pub use grid::SpatialGrid;
pub use measurement::{
    momentum_distribution, orientation_angle, position_distribution_phase,
    position_distribution_quadrature, Axes, DistributionGrid, MomentumGrid, Normalization,
    Orientation, Reference,
};
pub use propagation::{propagate_far_field, PropagationParams};
pub use scenario::{preset, list_presets, OutputKind, Scenario, ScenarioConfig, ScenarioOutputs, PRESET_NAMES};
