use ndarray::{Array2, Zip};
use rayon::prelude::*;

use crate::field::{DensityProfile, PhaseField};
use crate::grid::{SpatialGrid, VelocityGrid};
use crate::quad::linear_at;
use crate::signal::convolve_signal;

/// Fractional x-index of `x_i + k·dv` (exact node when `dx = dv`).
#[inline]
pub(crate) fn shifted_index(i: usize, k: f64, ratio: f64) -> f64 {
    i as f64 + k * ratio
}

pub(crate) fn spacing_ratio(x: &SpatialGrid, v: &VelocityGrid) -> f64 {
    let r = v.spacing() / x.spacing();
    if (r - 1.0).abs() < 1e-12 {
        1.0
    } else {
        r
    }
}

fn density_of(x: &SpatialGrid, v: &VelocityGrid, f: &Array2<f64>) -> DensityProfile {
    let wv = v.trapezoid_weights();
    let rho = f
        .outer_iter()
        .map(|row| row.iter().zip(&wv).map(|(a, w)| a * w).sum::<f64>())
        .collect();
    DensityProfile::from_parts(*x, rho)
}

/// Model A gain `S[ρ](x_i + v_j) ρ(x_i)`; the signal is read by linear
/// interpolation and vanishes outside `[-L, L]`.
pub fn gain_a(x: &SpatialGrid, v: &VelocityGrid, f: &Array2<f64>) -> Array2<f64> {
    let rho = density_of(x, v, f);
    let s = convolve_signal(&rho);
    let (sv, rv) = (s.values(), rho.values());
    let ratio = spacing_ratio(x, v);
    let cv = v.center() as f64;
    Array2::from_shape_fn(f.dim(), |(i, j)| {
        linear_at(sv, shifted_index(i, j as f64 - cv, ratio)) * rv[i]
    })
}

/// Model B gain `∫ S[ρ](x_i + v_j - v') f(x_i, v') dv'` by direct quadrature.
pub fn gain_b(x: &SpatialGrid, v: &VelocityGrid, f: &Array2<f64>) -> Array2<f64> {
    let rho = density_of(x, v, f);
    let s = convolve_signal(&rho);
    let sv = s.values();
    let ratio = spacing_ratio(x, v);
    let wv = v.trapezoid_weights();
    let nv = v.len();
    let rows: Vec<Vec<f64>> = (0..x.len())
        .into_par_iter()
        .map(|i| {
            let row_f = f.row(i);
            (0..nv)
                .map(|j| {
                    let mut acc = 0.0;
                    for (jp, (&fv, &w)) in row_f.iter().zip(&wv).enumerate() {
                        if fv != 0.0 {
                            acc += w
                                * fv
                                * linear_at(sv, shifted_index(i, j as f64 - jp as f64, ratio));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Array2::from_shape_fn(f.dim(), |(i, j)| rows[i][j])
}

fn apply(f: &PhaseField, gain: Array2<f64>) -> Array2<f64> {
    let mass = f.mass();
    let mut q = gain;
    Zip::from(&mut q)
        .and(f.values())
        .for_each(|g, &v| *g -= mass * v);
    q
}

/// `Q_A(f) = S[ρ](x + v) ρ(x) - M f` on the grid of `f`.
pub fn apply_q_a(f: &PhaseField) -> Array2<f64> {
    apply(f, gain_a(f.x_grid(), f.v_grid(), f.values()))
}

/// `Q_B(f) = ∫ S[ρ](x + v - v') f(x, v') dv' - M f` on the grid of `f`.
pub fn apply_q_b(f: &PhaseField) -> Array2<f64> {
    apply(f, gain_b(f.x_grid(), f.v_grid(), f.values()))
}
