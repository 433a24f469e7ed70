//! Discretized torus `T^n`, its dual lattice `Z^n`, the toroidal Fourier
//! transform and the lattice difference calculus.

pub mod diff;
pub mod fourier;
pub mod grid;
pub mod lattice;
pub mod record;

pub use diff::{
    backward_diff, diff_via_binomial_shifts, forward_diff, lagging_diff, multi_diff, multi_diff_ordered,
    summation_by_parts_residual, summation_by_parts_residual_with, DiffKind,
};
pub use fourier::{alias_free_radius, fourier_forward, fourier_inverse, spectral_derivative, GridDft, SpectralDerivative};
pub use grid::{periodic_distance, periodic_norm, wrap_component, GridFunction, TorusGrid};
pub use lattice::{japanese_bracket, LatticeBox, LatticeTable, MultiIndex, SpectralFunction};
pub use record::{Record, RecordKind};
