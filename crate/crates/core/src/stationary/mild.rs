use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{DensityProfile, PhaseField, SignalProfile};
use crate::grid::{SpatialGrid, VelocityGrid};
use crate::moments::{compute_moments, MomentTable};
use crate::quad::{cubic_at, GaussLegendre};
use crate::signal::convolve_signal;

/// Default number of Gauss–Legendre nodes in `u = e^{-Ms}`.
pub const DEFAULT_NODES: usize = 64;

/// `S` at an arbitrary point. Outside `[-L, L]` (where `ρ` vanishes) the
/// signal is an exact exponential continuation of its boundary value.
pub(crate) fn signal_at(s: &SignalProfile, x: f64) -> f64 {
    let g = s.grid();
    let l = g.half_width();
    let v = s.values();
    if x > l {
        v[v.len() - 1] * (l - x).exp()
    } else if x < -l {
        v[0] * (x + l).exp()
    } else {
        cubic_at(v, g.fractional_index(x)).max(0.0)
    }
}

pub(crate) fn density_at(rho: &DensityProfile, x: f64) -> f64 {
    cubic_at(rho.values(), rho.grid().fractional_index(x)).max(0.0)
}

/// Evaluates the mild form at every node of `x × v` with `nodes`
/// Gauss–Legendre points in `u = e^{-Ms} ∈ (0, 1]`:
/// `f = (1/M) ∫₀¹ ρ(x − s v) S(x + v − s v) du`, `s = −ln u / M`.
pub fn mild_apply_with(
    rho: &DensityProfile,
    mass: f64,
    v: &VelocityGrid,
    nodes: usize,
) -> Result<PhaseField> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("M", "mass must be positive"));
    }
    let x = *rho.grid();
    let signal = convolve_signal(rho);
    let gl = GaussLegendre::unit(nodes);
    let s_nodes: Vec<f64> = gl.nodes.iter().map(|u| -u.ln() / mass).collect();
    let weights: Vec<f64> = gl.weights.iter().map(|w| w / mass).collect();
    let (nx, nv) = (x.len(), v.len());
    let rows: Vec<Vec<f64>> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let xi = x.node(i);
            (0..nv)
                .map(|j| {
                    let vj = v.node(j);
                    let mut acc = 0.0;
                    for (&s, &w) in s_nodes.iter().zip(&weights) {
                        let r = density_at(rho, xi - s * vj);
                        if r > 0.0 {
                            acc += w * r * signal_at(&signal, xi + vj - s * vj);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    Ok(PhaseField::from_parts(
        x,
        *v,
        Array2::from_shape_fn((nx, nv), |(i, j)| rows[i][j]),
    ))
}

/// [`mild_apply_with`] using 64 quadrature nodes.
pub fn mild_apply(rho: &DensityProfile, mass: f64, v: &VelocityGrid) -> Result<PhaseField> {
    mild_apply_with(rho, mass, v, DEFAULT_NODES)
}

/// Starting density of the fixed-point iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Initializer {
    /// `(M/2) e^{-|x|}`, the shape of the signal kernel.
    Exponential,
    /// Centred Gaussian with the given standard deviation.
    Gaussian { width: f64 },
    /// Centred Gaussian with variance `2/(M−2)`, the steady `A_{2,0}/M`.
    MomentMatched,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StationaryOptions {
    /// Convergence threshold on the L¹ update, relative to `M`.
    pub tol: f64,
    pub max_iter: usize,
    pub init: Initializer,
    pub nodes: usize,
    /// Anderson mixing depth; 0 gives the plain iteration.
    pub anderson: usize,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        StationaryOptions {
            tol: 1e-9,
            max_iter: 2000,
            init: Initializer::MomentMatched,
            nodes: DEFAULT_NODES,
            anderson: 5,
        }
    }
}

/// Converged steady state and its diagnostics.
#[derive(Debug, Clone)]
pub struct StationaryResult {
    pub mass: f64,
    pub rho: DensityProfile,
    pub f: PhaseField,
    pub iterations: usize,
    /// L¹ distance between the last two iterates.
    pub update: f64,
    /// L¹ update of every sweep.
    pub history: Vec<f64>,
    /// Largest `|mass(∫ mild_apply(ρ^k) dv) − M|` over the iterates.
    pub max_mass_defect: f64,
    /// Largest `max |v| f` over the iterates.
    pub max_velocity_weighted: f64,
    /// L¹ norm of `v ∂_x f − ρ S[ρ](x + v) + M f`.
    pub residual: f64,
    pub moments: MomentTable,
    /// `∬ (1 + x² + v²) f`.
    pub weighted_mass: f64,
}

fn initial_density(x: &SpatialGrid, mass: f64, init: Initializer) -> Result<DensityProfile> {
    let p = match init {
        Initializer::Exponential => DensityProfile::from_fn(*x, |y| 0.5 * mass * (-y.abs()).exp())?,
        Initializer::Gaussian { width } => {
            if !(width > 0.0) {
                return Err(Error::invalid("width", "Gaussian width must be positive"));
            }
            DensityProfile::from_fn(*x, |y| (-(y * y) / (2.0 * width * width)).exp())?
        }
        Initializer::MomentMatched => {
            let var = 2.0 / (mass - 2.0);
            DensityProfile::from_fn(*x, |y| (-(y * y) / (2.0 * var)).exp())?
        }
    };
    Ok(p.scaled(mass / p.mass()))
}

fn max_velocity_weighted(f: &PhaseField) -> f64 {
    let v = f.v_grid();
    let mut worst: f64 = 0.0;
    for ((_, j), &val) in f.values().indexed_iter() {
        worst = worst.max(v.node(j).abs() * val);
    }
    worst
}

/// Normalized, symmetrized density of `f`: the fixed-point map `G(ρ)`.
fn next_density(f: &PhaseField, mass: f64) -> DensityProfile {
    let next = f.density().symmetrized();
    next.scaled(mass / next.mass())
}

/// Anderson mixing over the last few `(G(ρ_k), G(ρ_k) − ρ_k)` pairs.
struct Mixer {
    depth: usize,
    g: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
}

impl Mixer {
    fn new(depth: usize) -> Self {
        Mixer {
            depth,
            g: Vec::new(),
            r: Vec::new(),
        }
    }

    fn clear(&mut self) {
        self.g.clear();
        self.r.clear();
    }

    fn push_and_mix(&mut self, g: Vec<f64>, r: Vec<f64>) -> Vec<f64> {
        self.g.push(g);
        self.r.push(r);
        if self.g.len() > self.depth + 1 {
            self.g.remove(0);
            self.r.remove(0);
        }
        let k = self.g.len() - 1;
        let (gk, rk) = (&self.g[k], &self.r[k]);
        if k == 0 {
            return gk.clone();
        }
        let n = rk.len();
        let dr = DMatrix::from_fn(n, k, |i, c| self.r[c + 1][i] - self.r[c][i]);
        let rhs = DVector::from_column_slice(rk);
        let Ok(gamma) = dr.svd(true, true).solve(&rhs, 1e-12) else {
            return gk.clone();
        };
        (0..n)
            .map(|i| {
                let corr: f64 = (0..k)
                    .map(|c| gamma[c] * (self.g[c + 1][i] - self.g[c][i]))
                    .sum();
                gk[i] - corr
            })
            .collect()
    }
}

/// Fixed-point iteration `ρ ↦ ∫ mild_apply(ρ) dv` for `M > 2`.
///
/// Every iterate is rescaled to mass `M` and symmetrized; without the
/// rescaling the mass mode `m ↦ m²/M` is repelling. Convergence is judged
/// on the unmixed update `‖G(ρ) − ρ‖₁`.
pub fn solve_stationary(
    mass: f64,
    x: &SpatialGrid,
    v: &VelocityGrid,
    options: &StationaryOptions,
) -> Result<StationaryResult> {
    if !(mass.is_finite() && mass > 2.0) {
        return Err(Error::CriticalMassNotExceeded { mass });
    }
    let mut rho = initial_density(x, mass, options.init)?;
    let mut history: Vec<f64> = Vec::new();
    let mut max_mass_defect: f64 = 0.0;
    let mut max_vf: f64 = 0.0;
    let mut mixer = Mixer::new(options.anderson);
    let mut best = f64::INFINITY;
    for k in 1..=options.max_iter {
        let f = mild_apply_with(&rho, mass, v, options.nodes)?;
        max_mass_defect = max_mass_defect.max((f.mass() - mass).abs());
        max_vf = max_vf.max(max_velocity_weighted(&f));
        let g = next_density(&f, mass);
        let update = g.l1_distance(&rho);
        history.push(update);
        if !update.is_finite() {
            return Err(Error::Divergence {
                time: k as f64,
                detail: "non-finite iterate".into(),
            });
        }
        if update < options.tol * mass {
            let residual = strong_residual(&f, mass);
            let moments = compute_moments(&f, 4);
            let weighted_mass = moments.mass() + moments.get(2, 0) + moments.get(0, 2);
            return Ok(StationaryResult {
                mass,
                rho,
                f,
                iterations: k,
                update,
                history,
                max_mass_defect,
                max_velocity_weighted: max_vf,
                residual,
                moments,
                weighted_mass,
            });
        }
        if update > 10.0 * best {
            mixer.clear();
        }
        best = best.min(update);
        let next = if options.anderson == 0 {
            g
        } else {
            let r: Vec<f64> = g
                .values()
                .iter()
                .zip(rho.values())
                .map(|(a, b)| a - b)
                .collect();
            let mixed: Vec<f64> = mixer
                .push_and_mix(g.values().to_vec(), r)
                .into_iter()
                .map(|y| y.max(0.0))
                .collect();
            let p = DensityProfile::new(*x, mixed)?.symmetrized();
            p.scaled(mass / p.mass())
        };
        rho = next;
    }
    Err(Error::NonConvergence {
        iterations: options.max_iter,
        last_update: history.last().copied().unwrap_or(f64::NAN),
    })
}

/// L¹ norm of `v ∂_x f − ρ_f S[ρ_f](x + v) + M f`, with fourth-order
/// central differences in `x` (second order next to the boundary).
pub fn strong_residual(f: &PhaseField, mass: f64) -> f64 {
    let (x, v) = (f.x_grid(), f.v_grid());
    let rho = f.density();
    let s = convolve_signal(&rho);
    let vals = f.values();
    let (nx, nv) = vals.dim();
    let h = x.spacing();
    let wx = x.trapezoid_weights();
    let wv = v.trapezoid_weights();
    let mut total = 0.0;
    for i in 0..nx {
        for j in 0..nv {
            let col = |k: usize| vals[[k, j]];
            let dfdx = if i >= 2 && i + 2 < nx {
                (-col(i + 2) + 8.0 * col(i + 1) - 8.0 * col(i - 1) + col(i - 2)) / (12.0 * h)
            } else if i >= 1 && i + 1 < nx {
                (col(i + 1) - col(i - 1)) / (2.0 * h)
            } else {
                continue;
            };
            let xi = x.node(i);
            let vj = v.node(j);
            let r = v.node(j) * dfdx - rho.values()[i] * signal_at(&s, xi + vj) + mass * col(i);
            total += wx[i] * wv[j] * r.abs();
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grids;

    #[test]
    fn zero_density_maps_to_zero() {
        let (x, v) = make_grids(5.0, 21, 5.0, 21).unwrap();
        let rho = DensityProfile::from_fn(x, |_| 0.0).unwrap();
        let f = mild_apply(&rho, 3.0, &v).unwrap();
        assert!(f.values().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn mild_form_preserves_mass_and_parity() {
        let (x, v) = make_grids(20.0, 257, 20.0, 257).unwrap();
        let rho = DensityProfile::from_fn(x, |y| (-(y * y) / 2.0).exp()).unwrap();
        let rho = rho.scaled(4.0 / rho.mass());
        let f = mild_apply(&rho, 4.0, &v).unwrap();
        assert!((f.mass() - 4.0).abs() < 1e-6, "{}", f.mass());
        assert!(f.evenness_defect() < 1e-14 * f.values().iter().fold(0.0f64, |a, &b| a.max(b)));
    }

    #[test]
    fn exponential_continuation_of_signal() {
        let g = crate::grid::UniformGrid::new(6.0, 121).unwrap();
        let rho = DensityProfile::from_fn(g, |y| (-(y * y) * 4.0).exp()).unwrap();
        let s = convolve_signal(&rho);
        // exact beyond the support: S(x) = ½ e^{-|x|} ∫ e^{y} ρ(y) dy
        let wide = crate::grid::UniformGrid::new(12.0, 241).unwrap();
        let rho_w = DensityProfile::from_fn(wide, |y| (-(y * y) * 4.0).exp()).unwrap();
        let s_w = convolve_signal(&rho_w);
        for x in [7.0, 9.5, -8.2] {
            let a = signal_at(&s, x);
            let b = s_w.sample_linear(x);
            assert!((a - b).abs() < 1e-6 * b, "{x}: {a} {b}");
        }
    }

    #[test]
    fn subcritical_mass_rejected() {
        let (x, v) = make_grids(5.0, 21, 5.0, 21).unwrap();
        assert!(matches!(
            solve_stationary(2.0, &x, &v, &StationaryOptions::default()),
            Err(Error::CriticalMassNotExceeded { .. })
        ));
    }

    #[test]
    fn coarse_steady_state() {
        let (x, v) = make_grids(16.0, 129, 16.0, 129).unwrap();
        let opts = StationaryOptions {
            tol: 1e-7,
            ..Default::default()
        };
        let r = solve_stationary(4.0, &x, &v, &opts).unwrap();
        assert!(r.f.evenness_defect() < 1e-12);
        assert!(r.max_velocity_weighted <= 16.0);
        assert!((r.moments.get(2, 0) - 4.0).abs() < 0.1);
        assert!((r.moments.get(0, 2) - 16.0).abs() < 0.4);
        assert!(r.weighted_mass <= 960.0);
    }
}
