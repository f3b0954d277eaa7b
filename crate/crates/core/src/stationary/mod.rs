//! Aggregated steady states of Model A for supercritical mass.
//!
//! A stationary solution satisfies `v ∂_x f = ρ S[ρ](x + v) − M f`, or in
//! mild form `f(x,v) = ∫₀^∞ ρ(x − sv) S[ρ](x + v(1−s)) e^{−Ms} ds`. The
//! density is found by iterating `ρ ↦ ∫ f dv`, either in physical space or
//! through the equivalent equation for `ρ̂`.

mod diagnostics;
mod mild;
mod spectral;

pub use diagnostics::{
    large_mass_comparison, regularity_diagnostic, LargeMassReport, RegularityReport,
};
pub use mild::{
    mild_apply, mild_apply_with, solve_stationary, strong_residual, Initializer, StationaryOptions,
    StationaryResult,
};
pub use spectral::{
    cosine_transform, fourier_rhs, inverse_transform, solve_stationary_spectral, spectral_decay,
    DecayCheck, SpectralOptions, SpectralProfile, SpectralResult,
};
