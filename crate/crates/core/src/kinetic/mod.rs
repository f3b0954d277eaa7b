//! Time-dependent kinetic solver and the two constructive existence checks.
//!
//! The solver splits free transport from turning (Strang). Transport is
//! exact: each velocity row keeps its own sub-cell phase and is only ever
//! shifted by whole cells, so no interpolation diffusion accumulates along
//! characteristics. Turning is integrated with an exact integrating factor
//! and its gain is evaluated on the lab grid.

mod collision;
mod monotone;
mod picard;
mod solver;

pub use collision::{apply_q_a, apply_q_b, gain_a, gain_b};
pub use monotone::{monotone_iterate_b, MonotoneReport};
pub use picard::{picard_contraction_test, ContractionReport};
pub use solver::{simulate, step, KineticState, SimulationConfig, Trajectory};
