use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::mild::StationaryResult;

/// Spectral decay of a stationary phase density.
#[derive(Debug, Clone)]
pub struct RegularityReport {
    /// `Re f̂(0, 0)`, which should equal the mass.
    pub origin: f64,
    /// `max |Im f̂| / max |f̂|`.
    pub imaginary_ratio: f64,
    /// `max |f̂(ξ,k) − f̂(−ξ,−k)| / max |f̂|`.
    pub parity_defect: f64,
    /// Radius of the band where `|f̂|` exceeds `1e-10 |f̂(0,0)|`.
    pub band_radius: f64,
    /// `C_n = sup |f̂| (1+ξ²+k²)^n` over the inner band, `n = 1, 2, …`.
    pub constants: Vec<f64>,
    /// Largest `n` for which the weighted transform does not grow on the
    /// outer quarter of the band (and does not for any smaller `n`).
    pub fitted_order: u32,
}

const MAX_ORDER: u32 = 8;

fn fft_axis(
    data: &mut [Complex<f64>],
    rows: usize,
    cols: usize,
    planner: &mut FftPlanner<f64>,
    along_rows: bool,
) {
    if along_rows {
        let fft = planner.plan_fft_forward(cols);
        for r in 0..rows {
            fft.process(&mut data[r * cols..(r + 1) * cols]);
        }
    } else {
        let fft = planner.plan_fft_forward(rows);
        let mut buf = vec![Complex::new(0.0, 0.0); rows];
        for c in 0..cols {
            for r in 0..rows {
                buf[r] = data[r * cols + c];
            }
            fft.process(&mut buf);
            for r in 0..rows {
                data[r * cols + c] = buf[r];
            }
        }
    }
}

fn signed(p: usize, n: usize) -> i64 {
    if p <= n / 2 {
        p as i64
    } else {
        p as i64 - n as i64
    }
}

/// Discrete 2D transform of `f` and a fit of its algebraic decay order.
pub fn regularity_diagnostic(result: &StationaryResult) -> RegularityReport {
    let f = &result.f;
    let (x, v) = (f.x_grid(), f.v_grid());
    let (nx, nv) = (x.len(), v.len());
    let mut data: Vec<Complex<f64>> = f.values().iter().map(|&a| Complex::new(a, 0.0)).collect();
    let mut planner = FftPlanner::new();
    fft_axis(&mut data, nx, nv, &mut planner, true);
    fft_axis(&mut data, nx, nv, &mut planner, false);

    let (dx, dv) = (x.spacing(), v.spacing());
    let xi = |p: usize| 2.0 * std::f64::consts::PI * signed(p, nx) as f64 / (nx as f64 * dx);
    let kk = |q: usize| 2.0 * std::f64::consts::PI * signed(q, nv) as f64 / (nv as f64 * dv);
    // shift the origin from the first node to x = v = 0
    let transform: Vec<Complex<f64>> = data
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let (p, q) = (idx / nv, idx % nv);
            let phase = xi(p) * x.half_width() + kk(q) * v.half_width();
            z * Complex::from_polar(dx * dv, phase)
        })
        .collect();

    let scale = transform.iter().fold(0.0f64, |a, z| a.max(z.norm()));
    let imaginary_ratio = transform.iter().fold(0.0f64, |a, z| a.max(z.im.abs())) / scale;
    let mut parity: f64 = 0.0;
    for p in 0..nx {
        for q in 0..nv {
            let (pm, qm) = ((nx - p) % nx, (nv - q) % nv);
            parity = parity.max((transform[p * nv + q] - transform[pm * nv + qm]).norm());
        }
    }
    let origin = transform[0].re;

    let nyquist = (std::f64::consts::PI / dx).min(std::f64::consts::PI / dv);
    let cap = 0.9 * nyquist;
    let floor = 1e-10 * origin.abs();
    let mut band_radius: f64 = 0.0;
    let mut samples = Vec::with_capacity(nx * nv);
    for p in 0..nx {
        for q in 0..nv {
            let r2 = xi(p).powi(2) + kk(q).powi(2);
            let r = r2.sqrt();
            if r > cap {
                continue;
            }
            let mag = transform[p * nv + q].norm();
            if mag > floor {
                band_radius = band_radius.max(r);
            }
            samples.push((r, r2, mag));
        }
    }
    let mut constants = Vec::new();
    let mut fitted_order = 0;
    let mut still_bounded = true;
    for n in 1..=MAX_ORDER {
        let (mut inner, mut outer) = (0.0f64, 0.0f64);
        for &(r, r2, mag) in &samples {
            if r > band_radius {
                continue;
            }
            let w = mag * (1.0 + r2).powi(n as i32);
            if r <= 0.75 * band_radius {
                inner = inner.max(w);
            } else {
                outer = outer.max(w);
            }
        }
        constants.push(inner);
        if still_bounded && outer <= inner {
            fitted_order = n;
        } else {
            still_bounded = false;
        }
    }

    RegularityReport {
        origin,
        imaginary_ratio,
        parity_defect: parity / scale,
        band_radius,
        constants,
        fitted_order,
    }
}

/// Comparison of a steady state with the large-mass limit `½ e^{-|v|} δ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LargeMassReport {
    pub mass: f64,
    /// `∫ |g(v)/M − ½ e^{-|v|}| dv` with `g = ∫ f dx`, including the limit's
    /// tail beyond the velocity grid.
    pub marginal_l1: f64,
    pub rescaled_a20: f64,
    pub expected_a20: f64,
    pub rescaled_a02: f64,
    pub expected_a02: f64,
}

pub fn large_mass_comparison(result: &StationaryResult) -> LargeMassReport {
    let f = &result.f;
    let (x, v) = (f.x_grid(), f.v_grid());
    let wx = x.trapezoid_weights();
    let m = result.mass;
    let diff: Vec<f64> = (0..v.len())
        .map(|j| {
            let g: f64 = (0..x.len()).map(|i| wx[i] * f.get(i, j)).sum();
            (g / m - 0.5 * (-v.node(j).abs()).exp()).abs()
        })
        .collect();
    let tail = (-v.half_width()).exp();
    LargeMassReport {
        mass: m,
        marginal_l1: v.integrate(&diff) + tail,
        rescaled_a20: result.moments.get(2, 0) / m,
        expected_a20: 2.0 / (m - 2.0),
        rescaled_a02: result.moments.get(0, 2) / m,
        expected_a02: 2.0 * m / (m - 2.0),
    }
}
