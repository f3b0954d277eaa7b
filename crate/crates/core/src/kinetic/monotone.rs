use ndarray::Array2;

use super::collision::gain_b;
use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::quad::linear_at;

/// Diagnostics of the increasing Model B sequence `f_0 = 0, f_1, f_2, …`.
#[derive(Debug, Clone)]
pub struct MonotoneReport {
    pub mass: f64,
    pub times: Vec<f64>,
    /// `masses[j][k]` is the mass of `f_{j+1}` at `times[k]`.
    pub masses: Vec<Vec<f64>>,
    /// Smallest pointwise increment `f_{j+1} - f_j` over all iterates.
    pub min_increment: f64,
    /// Number of increments below `-1e-10`.
    pub violations: usize,
    pub first_iterate: Vec<Array2<f64>>,
    pub last_iterate: Vec<Array2<f64>>,
}

impl MonotoneReport {
    pub fn max_mass(&self) -> f64 {
        self.masses.iter().flatten().fold(0.0f64, |a, &b| a.max(b))
    }
}

/// Exact weights of `∫_0^h e^{Mτ} ((1-τ/h) a + (τ/h) b) dτ` on `(a, b)`.
fn linear_exp_weights(mass: f64, h: f64) -> (f64, f64) {
    let mh = mass * h;
    if mh < 1e-6 {
        return (0.5 * h * (1.0 + mh / 3.0), 0.5 * h * (1.0 + 2.0 * mh / 3.0));
    }
    let e = mh.exp();
    let full = (e - 1.0) / mass;
    let wb = (h * e / mass - (e - 1.0) / (mass * mass)) / h;
    (full - wb, wb)
}

/// Builds `f_{j+1}` from `f_j` by the explicit characteristic formula
///
/// `f_{j+1}(x,v,t) = e^{-Mt} f_I(x - vt, v) + ∫_0^t e^{-M(t-s)} G_j(x - v(t-s), v, s) ds`
///
/// with `G_j` the Model B gain of `f_j`, on time nodes `k·dt`. Along
/// characteristics the data are read by linear interpolation and the
/// integrand is linear in `s` between nodes, so every weight is positive and
/// the discrete sequence inherits monotonicity and the bound `m_j ≤ M`.
pub fn monotone_iterate_b(
    f_init: &PhaseField,
    t_end: f64,
    dt: f64,
    iterations: usize,
) -> Result<MonotoneReport> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::invalid("dt", "time step must be positive"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::invalid("t_end", "final time must be positive"));
    }
    let steps = (t_end / dt - 1e-9).ceil().max(1.0) as usize;
    let h = t_end / steps as f64;
    let times: Vec<f64> = (0..=steps).map(|k| k as f64 * h).collect();
    let (x, v) = (*f_init.x_grid(), *f_init.v_grid());
    let (nx, nv) = (x.len(), v.len());
    let dx = x.spacing();
    let mass = f_init.mass();
    let (wa, wb) = linear_exp_weights(mass, h);

    let init_cols: Vec<Vec<f64>> = (0..nv)
        .map(|l| f_init.values().column(l).to_vec())
        .collect();
    let free: Vec<Array2<f64>> = times
        .iter()
        .map(|&t| {
            let decay = (-mass * t).exp();
            Array2::from_shape_fn((nx, nv), |(i, l)| {
                decay * linear_at(&init_cols[l], i as f64 - v.node(l) * t / dx)
            })
        })
        .collect();

    let mut current: Vec<Array2<f64>> = vec![Array2::zeros((nx, nv)); times.len()];
    let mut masses = Vec::with_capacity(iterations);
    let mut first_iterate = Vec::new();
    let mut min_increment = f64::INFINITY;
    let mut violations = 0usize;

    for j in 0..iterations {
        // gain columns of f_j at every time node
        let gains: Vec<Vec<Vec<f64>>> = current
            .iter()
            .map(|f| {
                let g = gain_b(&x, &v, f);
                (0..nv).map(|l| g.column(l).to_vec()).collect()
            })
            .collect();
        let mut next = Vec::with_capacity(times.len());
        for (k, &tk) in times.iter().enumerate() {
            let mut f = free[k].clone();
            for q in 0..k {
                let damp = (-mass * (tk - times[q])).exp();
                let (age_a, age_b) = (tk - times[q], tk - times[q + 1]);
                for l in 0..nv {
                    let vl = v.node(l) / dx;
                    let (ga, gb) = (&gains[q][l], &gains[q + 1][l]);
                    for i in 0..nx {
                        let a = linear_at(ga, i as f64 - vl * age_a);
                        let b = linear_at(gb, i as f64 - vl * age_b);
                        f[[i, l]] += damp * (wa * a + wb * b);
                    }
                }
            }
            next.push(f);
        }
        for (new, old) in next.iter().zip(&current) {
            for (a, b) in new.iter().zip(old) {
                let d = a - b;
                min_increment = min_increment.min(d);
                if d < -1e-10 {
                    violations += 1;
                }
            }
        }
        masses.push(
            next.iter()
                .map(|f| PhaseField::from_parts(x, v, f.clone()).mass())
                .collect(),
        );
        if j == 0 {
            first_iterate = next.clone();
        }
        current = next;
    }

    Ok(MonotoneReport {
        mass,
        times,
        masses,
        min_increment,
        violations,
        first_iterate,
        last_iterate: current,
    })
}
