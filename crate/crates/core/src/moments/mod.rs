//! Moment hierarchy of Model A and the second-order system of Model B.
//!
//! `A_{m,n} = ∬ x^m v^n f dv dx`. For Model A the hierarchy closes order by
//! order: the time derivative of an order-`N` moment involves only moments
//! of order `≤ N`, with the signal moments supplied by
//! [`crate::signal::signal_moments`].

mod cascade;
mod model_b;
mod system;
mod table;

pub use cascade::{
    integrate_cascade, moment_rhs_a, sample_cascade, second_order_steady_state, CascadeTrajectory,
};
pub use model_b::{model_b_jacobian, model_b_order2, model_b_steady_state, ModelBReport};
pub use system::{
    asymptotic_roots, build_matrix, char_poly_coefficients, char_poly_pn, critical_masses, q_n,
    routh_hurwitz_stable, stability, Coupling, CriticalMassEntry, MomentSystem, StabilityReport,
    Verdict,
};
pub use table::{compute_moments, MomentTable};

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let mut b = 1.0;
    for i in 0..k {
        b = b * (n - i) as f64 / (i + 1) as f64;
    }
    b
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
