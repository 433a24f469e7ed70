//! Phases, sampled symbols and their seminorms.

pub mod library;
pub mod phase;
pub mod table;

pub use library::{SymbolKind, SymbolParameters, SymbolSpec};
pub use phase::{homogeneity_residual, phase_derivative_bound, Phase, PhaseKind, PsiKind, PsiTable};
pub use table::{
    coeff_decay_constant, spectral_x_derivative, symbol_seminorm, symbol_seminorm_delta_free, x_fourier_coeff,
    x_spectrum, SeminormEstimate, Symbol, SymbolOrder, XSpectrum,
};
