//! The quasistationary chemoattractant.
//!
//! `S[ρ] = ½ e^{-|·|} * ρ` is the decaying solution of `-S'' = ρ - S`. The
//! convolution is evaluated exactly for the piecewise-linear interpolant of
//! `ρ` with two exponential sweeps, so it costs `O(n)` per profile. Mass
//! outside `[-L, L]` is dropped; at distance `d` from the boundary the
//! truncation error is at most `mass · e^{-d}`.

use crate::error::{Error, Result};
use crate::field::{DensityProfile, SignalProfile};

/// Moments `S_k = ∫ x^k S dx`, `k = 0..=N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalMomentVector {
    values: Vec<f64>,
}

impl SignalMomentVector {
    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }
}

/// Per-cell weights of the left/right exponential recursions.
///
/// For a cell of width `h` with linear data `(a, b)` at its ends,
/// `∫_0^h e^{-(h-s)} ρ(s) ds = near·b + far·a`.
fn cell_weights(h: f64) -> (f64, f64, f64) {
    let decay = (-h).exp();
    // far = ∫_0^h e^{-u} u/h du, near = ∫_0^h e^{-u} (1 - u/h) du
    let far = if h < 1e-4 {
        h * (0.5 - h / 3.0 + h * h / 8.0)
    } else {
        (1.0 - decay * (1.0 + h)) / h
    };
    let near = -(-h).exp_m1() - far;
    (decay, near, far)
}

/// `S_i = ½ ∫ e^{-|x_i - y|} ρ(y) dy` with `ρ` piecewise linear.
pub fn convolve_signal(rho: &DensityProfile) -> SignalProfile {
    let grid = *rho.grid();
    let r = rho.values();
    let n = r.len();
    let (decay, near, far) = cell_weights(grid.spacing());

    let mut left = vec![0.0; n];
    for i in 1..n {
        left[i] = decay * left[i - 1] + far * r[i - 1] + near * r[i];
    }
    let mut right = vec![0.0; n];
    for i in (0..n - 1).rev() {
        right[i] = decay * right[i + 1] + far * r[i + 1] + near * r[i];
    }
    let values = left
        .iter()
        .zip(&right)
        .map(|(p, q)| (0.5 * (p + q)).max(0.0))
        .collect();
    SignalProfile::from_parts(grid, values)
}

/// `S_k = R_k + k(k-1) S_{k-2}` with `S_0 = R_0`, `S_1 = R_1`.
pub fn signal_moments(density_moments: &[f64]) -> SignalMomentVector {
    let mut values = Vec::with_capacity(density_moments.len());
    for (k, &r) in density_moments.iter().enumerate() {
        let lower = if k >= 2 {
            (k * (k - 1)) as f64 * values[k - 2]
        } else {
            0.0
        };
        values.push(r + lower);
    }
    SignalMomentVector { values }
}

/// `∬ x^{N-n} v^n S(x+v) ρ(x) dx dv = Σ_k C(n,k) (-1)^{n-k} S_k R_{N-k}`.
pub fn cross_moment(
    n: usize,
    order: usize,
    signal: &SignalMomentVector,
    density_moments: &[f64],
) -> Result<f64> {
    if n > order {
        return Err(Error::IndexOutOfRange(format!(
            "n = {n} exceeds N = {order}"
        )));
    }
    if signal.values.len() <= n || density_moments.len() <= order {
        return Err(Error::IndexOutOfRange(format!(
            "need S_0..S_{n} and R_0..R_{order}, have {} and {}",
            signal.values.len(),
            density_moments.len()
        )));
    }
    Ok(cross_moment_unchecked(
        n,
        order,
        signal.values(),
        density_moments,
    ))
}

#[inline]
pub(crate) fn cross_moment_unchecked(n: usize, order: usize, s: &[f64], r: &[f64]) -> f64 {
    let mut binom = 1.0;
    let mut total = 0.0;
    for k in 0..=n {
        let sign = if (n - k).is_multiple_of(2) { 1.0 } else { -1.0 };
        total += sign * binom * s[k] * r[order - k];
        binom = binom * (n - k) as f64 / (k + 1) as f64;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::UniformGrid;

    fn direct_convolution(rho: &DensityProfile) -> Vec<f64> {
        // trapezoid on a grid refined 8x with linear interpolation of ρ
        let g = rho.grid();
        let fine = 8;
        let h = g.spacing() / fine as f64;
        let m = (g.len() - 1) * fine + 1;
        let ys: Vec<f64> = (0..m).map(|k| -g.half_width() + k as f64 * h).collect();
        let rs: Vec<f64> = ys.iter().map(|&y| rho.sample_linear(y)).collect();
        g.nodes()
            .iter()
            .map(|&x| {
                let mut acc = 0.0;
                for k in 0..m {
                    let w = if k == 0 || k == m - 1 { 0.5 * h } else { h };
                    acc += w * 0.5 * (-(x - ys[k]).abs()).exp() * rs[k];
                }
                acc
            })
            .collect()
    }

    #[test]
    fn zero_density_gives_zero_signal() {
        let g = UniformGrid::new(5.0, 51).unwrap();
        let s = convolve_signal(&DensityProfile::new(g, vec![0.0; 51]).unwrap());
        assert!(s.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn discrete_delta_gives_greens_function() {
        let g = UniformGrid::new(10.0, 2001).unwrap();
        let h = g.spacing();
        let mut r = vec![0.0; g.len()];
        r[g.center()] = 1.0 / h;
        let s = convolve_signal(&DensityProfile::new(g, r).unwrap());
        for (i, x) in g.nodes().into_iter().enumerate() {
            let exact = 0.5 * (-x.abs()).exp();
            let tol = if i == g.center() { h } else { h * h };
            assert!(
                (s.values()[i] - exact).abs() <= tol * exact.max(1e-300) + 1e-300,
                "x = {x}"
            );
        }
    }

    #[test]
    fn exponential_self_convolution_closed_form() {
        let g = UniformGrid::new(30.0, 6001).unwrap();
        let rho = DensityProfile::from_fn(g, |x| 0.5 * (-x.abs()).exp()).unwrap();
        let s = convolve_signal(&rho);
        for (i, x) in g.nodes().into_iter().enumerate() {
            if x.abs() > 20.0 {
                continue;
            }
            let exact = 0.25 * (1.0 + x.abs()) * (-x.abs()).exp();
            assert!((s.values()[i] - exact).abs() < 2e-5, "x = {x}");
        }
    }

    #[test]
    fn recursion_matches_quadrature_oracle() {
        let g = UniformGrid::new(8.0, 161).unwrap();
        let rho = DensityProfile::from_fn(g, |x| {
            (-(x - 1.0) * (x - 1.0)).exp() + 0.5 * (-(x + 2.0) * (x + 2.0) / 0.5).exp()
        })
        .unwrap();
        let fast = convolve_signal(&rho);
        let slow = direct_convolution(&rho);
        for (a, b) in fast.values().iter().zip(&slow) {
            // the oracle's own trapezoid error on the refined mesh is O((h/8)^2)
            assert!((a - b).abs() < 2e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn even_density_gives_even_signal() {
        let g = UniformGrid::new(10.0, 201).unwrap();
        let rho = DensityProfile::from_fn(g, |x| (-(x * x)).exp() * (1.0 + x * x)).unwrap();
        let s = convolve_signal(&rho);
        let v = s.values();
        for i in 0..v.len() {
            assert_eq!(v[i], v[v.len() - 1 - i]);
        }
    }

    #[test]
    fn mass_is_preserved() {
        for l in [20.0, 30.0, 40.0] {
            let g = UniformGrid::new(l, 257).unwrap();
            let rho =
                DensityProfile::from_fn(g, |x| 3.0 * (-(x - 0.5) * (x - 0.5) / 2.0).exp()).unwrap();
            let s = convolve_signal(&rho);
            let gap = rho.mass() - s.mass();
            // the exponential tails beyond ±L carry S(-L) + S(L)
            let tail = s.values()[0] + s.values()[g.len() - 1];
            assert!(
                (gap - tail).abs() < 1e-10 * rho.mass() + 0.05 * tail,
                "L={l}: {gap:e} vs {tail:e}"
            );
        }
    }

    #[test]
    fn second_difference_residual_is_small() {
        let g = UniformGrid::new(15.0, 601).unwrap();
        let rho = DensityProfile::from_fn(g, |x| (-(x * x) / 2.0).exp()).unwrap();
        let s = convolve_signal(&rho);
        let h = g.spacing();
        let (sv, rv) = (s.values(), rho.values());
        for i in 1..g.len() - 1 {
            let lap = (sv[i + 1] - 2.0 * sv[i] + sv[i - 1]) / (h * h);
            assert!((-lap + sv[i] - rv[i]).abs() < 0.5 * h * h, "i = {i}");
        }
    }

    #[test]
    fn moment_recursion_examples() {
        let m = 2.5;
        let s = signal_moments(&[m, 0.0]);
        assert_eq!(s.values(), &[m, 0.0]);
        let s = signal_moments(&[1.0, 0.3, 2.0, 0.1, 5.0]);
        assert_eq!(s.get(2), 2.0 + 2.0 * 1.0);
        assert!((s.get(4) - (5.0 + 12.0 * 2.0 + 24.0 * 1.0)).abs() < 1e-14);
        assert!((s.get(3) - (0.1 + 6.0 * 0.3)).abs() < 1e-14);
    }

    #[test]
    fn cross_moment_examples() {
        let s = signal_moments(&[2.0, 0.0, 3.0]);
        // n = 0 → S_0 R_N
        assert_eq!(cross_moment(0, 2, &s, &[2.0, 0.0, 3.0]).unwrap(), 6.0);
        // n = 1, N = 2: −S_0 R_2 + S_1 R_1
        assert_eq!(cross_moment(1, 2, &s, &[2.0, 0.0, 3.0]).unwrap(), -6.0);
        assert!(cross_moment(3, 2, &s, &[2.0, 0.0, 3.0]).is_err());
        assert!(cross_moment(2, 4, &s, &[2.0, 0.0, 3.0]).is_err());
    }
}
