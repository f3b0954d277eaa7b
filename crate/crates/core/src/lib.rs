//! Numerical laboratory for a one-dimensional kinetic chemotaxis model with
//! quasistationary signalling.
//!
//! Cells are described by a phase-space density `f(x, v, t)` that is transported
//! freely and relaxes through a turning operator driven by the chemoattractant
//! `S = ½ e^{-|·|} * ρ`. Two turning kernels are supported:
//!
//! * Model A: `Q_A(f) = S[ρ](x + v) ρ(x) − M f`
//! * Model B: `Q_B(f) = ∫ S[ρ](x + v − v') f(x, v') dv' − M f`
//!
//! The crate is organised by capability:
//!
//! * [`grid`], [`field`], [`params`], [`quad`], [`frame`]: grids, fields,
//!   nondimensionalization and quadrature shared by everything else.
//! * [`signal`]: exponential-kernel convolution and the signal moment identities.
//! * [`kinetic`]: time-dependent solver (Strang splitting) plus the Duhamel
//!   contraction check and the monotone Model B iteration.
//! * [`moments`]: moment tables, the closed moment cascade, characteristic
//!   polynomials, critical masses and stability analysis.
//! * [`stationary`]: steady states for supercritical mass by fixed-point
//!   iteration in physical and Fourier space, with regularity and large-mass
//!   diagnostics.
//! * [`cli`]: configuration, orchestration and result files.

pub mod cli;
pub mod error;
pub mod field;
pub mod frame;
pub mod grid;
pub mod kinetic;
pub mod moments;
pub mod ode;
pub mod params;
pub mod quad;
pub mod signal;
pub mod stationary;

pub use error::{Error, Result};
pub use field::{DensityProfile, PhaseField, SignalProfile};
pub use grid::{make_grids, SpatialGrid, UniformGrid, VelocityGrid};
pub use params::{ModelKind, PhysicalParams, ScalingFactors};
