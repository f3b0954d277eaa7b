use crate::error::{Error, Result};
use crate::field::DensityProfile;
use crate::grid::{SpatialGrid, UniformGrid};
use crate::quad::{cubic_at, GaussLegendre};

/// Real, even transform `ρ̂(ξ) = ∫ ρ(x) e^{-iξx} dx` on a symmetric grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralProfile {
    grid: UniformGrid,
    values: Vec<f64>,
}

impl SpectralProfile {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                "length must match the frequency grid",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("values", "transform values must be finite"));
        }
        Ok(SpectralProfile { grid, values })
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Cubic interpolation, zero beyond `±ξ_max`.
    pub fn at(&self, xi: f64) -> f64 {
        cubic_at(&self.values, self.grid.fractional_index(xi))
    }

    pub fn at_origin(&self) -> f64 {
        self.values[self.grid.center()]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }
}

/// `ρ̂(ξ) = ∫ ρ(x) cos(ξx) dx` by the trapezoid rule (the sine part of an
/// even density vanishes).
pub fn cosine_transform(rho: &DensityProfile, xi: &UniformGrid) -> SpectralProfile {
    let g = rho.grid();
    let w = g.trapezoid_weights();
    let xs = g.nodes();
    let values = xi
        .nodes()
        .iter()
        .map(|&k| {
            xs.iter()
                .zip(&w)
                .zip(rho.values())
                .map(|((x, w), r)| w * r * (k * x).cos())
                .sum()
        })
        .collect();
    SpectralProfile { grid: *xi, values }
}

/// `ρ(x) = (1/π) ∫₀^{ξ_max} ρ̂(ξ) cos(ξx) dξ`. Returns the density (clamped
/// at zero) and the most negative raw value.
pub fn inverse_transform(profile: &SpectralProfile, x: &SpatialGrid) -> (DensityProfile, f64) {
    let g = profile.grid();
    let c = g.center();
    let h = g.spacing();
    let half: Vec<(f64, f64)> = (c..g.len())
        .map(|i| {
            let w = if i == c || i == g.len() - 1 {
                0.5 * h
            } else {
                h
            };
            (g.node(i), w * profile.values[i])
        })
        .collect();
    let mut min_raw: f64 = 0.0;
    let values = x
        .nodes()
        .iter()
        .map(|&xv| {
            let r: f64 =
                half.iter().map(|(k, a)| a * (k * xv).cos()).sum::<f64>() / std::f64::consts::PI;
            min_raw = min_raw.min(r);
            r.max(0.0)
        })
        .collect();
    (DensityProfile::from_parts(*x, values), min_raw)
}

struct SQuad {
    s: Vec<f64>,
    w: Vec<f64>,
}

impl SQuad {
    fn new(mass: f64, nodes: usize) -> Self {
        let gl = GaussLegendre::unit(nodes);
        SQuad {
            s: gl.nodes.iter().map(|u| -u.ln() / mass).collect(),
            w: gl.weights.iter().map(|w| w / mass).collect(),
        }
    }

    fn rhs(&self, profile: &SpectralProfile, xi: f64) -> f64 {
        self.s
            .iter()
            .zip(&self.w)
            .map(|(&s, &w)| {
                w * profile.at(xi * (1.0 - s)) * profile.at(xi * s) / (1.0 + xi * xi * s * s)
            })
            .sum()
    }
}

/// Right-hand side of the stationary equation in Fourier variables,
/// `∫₀^∞ e^{-Ms} ρ̂(ξ(1−s)) ρ̂(ξs) / (1 + ξ²s²) ds`, with 64 nodes in
/// `u = e^{-Ms}`.
pub fn fourier_rhs(profile: &SpectralProfile, mass: f64, xi: f64) -> f64 {
    SQuad::new(mass, 64).rhs(profile, xi)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralOptions {
    pub xi_max: f64,
    pub points: usize,
    /// Convergence threshold on `max |Δρ̂|`, relative to `M`.
    pub tol: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub nodes: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        SpectralOptions {
            xi_max: 40.0,
            points: 2001,
            tol: 1e-9,
            max_iter: 5000,
            damping: 0.5,
            nodes: 64,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub mass: f64,
    pub profile: SpectralProfile,
    pub iterations: usize,
    pub update: f64,
    /// Largest `|ρ̂|/M` seen over all iterates.
    pub max_ratio: f64,
}

/// Damped iteration `ρ̂ ← (1−ω) ρ̂ + ω F(ρ̂)` with `ρ̂(0) = M` pinned,
/// started from the transform of `(M/2) e^{-|x|}`.
pub fn solve_stationary_spectral(mass: f64, options: &SpectralOptions) -> Result<SpectralResult> {
    if !(mass.is_finite() && mass > 2.0) {
        return Err(Error::CriticalMassNotExceeded { mass });
    }
    if !(options.damping > 0.0 && options.damping <= 1.0) {
        return Err(Error::invalid("damping", "must lie in (0, 1]"));
    }
    let grid = UniformGrid::new(options.xi_max, options.points)?;
    let quad = SQuad::new(mass, options.nodes);
    let mut profile = SpectralProfile {
        grid,
        values: grid.nodes().iter().map(|k| mass / (1.0 + k * k)).collect(),
    };
    let c = grid.center();
    let mut max_ratio = profile.max_abs() / mass;
    let mut update = f64::INFINITY;
    for k in 1..=options.max_iter {
        // evaluate on ξ ≥ 0 and mirror
        let mut next = vec![0.0; grid.len()];
        for i in c..grid.len() {
            let val = quad.rhs(&profile, grid.node(i));
            next[i] = (1.0 - options.damping) * profile.values[i] + options.damping * val;
            next[2 * c - i] = next[i];
        }
        next[c] = mass;
        update = next
            .iter()
            .zip(&profile.values)
            .fold(0.0f64, |a, (x, y)| a.max((x - y).abs()));
        profile.values = next;
        max_ratio = max_ratio.max(profile.max_abs() / mass);
        if !update.is_finite() {
            return Err(Error::Divergence {
                time: k as f64,
                detail: "non-finite spectral iterate".into(),
            });
        }
        if update < options.tol * mass {
            return Ok(SpectralResult {
                mass,
                profile,
                iterations: k,
                update,
                max_ratio,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: options.max_iter,
        last_update: update,
    })
}

/// Whether `|ρ̂(ξ)| (1 + ξ²)^n` stays bounded on the resolved band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCheck {
    pub n: u32,
    /// Largest `ξ` with `|ρ̂| > 1e-10·|ρ̂(0)|`.
    pub band_end: f64,
    pub inner_sup: f64,
    pub outer_sup: f64,
}

impl DecayCheck {
    /// The weighted transform does not grow towards the edge of the band.
    pub fn bounded(&self) -> bool {
        self.outer_sup <= self.inner_sup
    }
}

/// Compares `sup |ρ̂|(1+ξ²)^n` on the outer quarter of the resolved band
/// with its supremum on the rest.
pub fn spectral_decay(profile: &SpectralProfile, n: u32) -> DecayCheck {
    let g = profile.grid();
    let c = g.center();
    let floor = 1e-10 * profile.at_origin().abs();
    let band_end = (c..g.len())
        .filter(|&i| profile.values[i].abs() > floor)
        .map(|i| g.node(i))
        .fold(0.0f64, f64::max);
    let (mut inner_sup, mut outer_sup) = (0.0f64, 0.0f64);
    for i in c..g.len() {
        let xi = g.node(i);
        if xi > band_end {
            break;
        }
        let w = profile.values[i].abs() * (1.0 + xi * xi).powi(n as i32);
        if xi <= 0.75 * band_end {
            inner_sup = inner_sup.max(w);
        } else {
            outer_sup = outer_sup.max(w);
        }
    }
    DecayCheck {
        n,
        band_end,
        inner_sup,
        outer_sup,
    }
}
