//! Quadrature rules and interpolation on uniform grids.

use std::f64::consts::PI;

/// Gauss–Legendre rule on `[0, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule mapped to the unit interval. Nodes ascend.
    pub fn unit(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, z);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            // z descends with i; map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - z);
            nodes[n - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Rule mapped to `[a, b]`.
    pub fn on(n: usize, a: f64, b: f64) -> Self {
        let unit = Self::unit(n);
        let h = b - a;
        GaussLegendre {
            nodes: unit.nodes.iter().map(|u| a + h * u).collect(),
            weights: unit.weights.iter().map(|w| h * w).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let dp = n as f64 * (z * p - p0) / (z * z - 1.0);
    (p, dp)
}

/// Linear interpolation at fractional index `pos`; zero outside `[0, n-1]`.
#[inline]
pub fn linear_at(values: &[f64], pos: f64) -> f64 {
    let n = values.len();
    if !(pos >= 0.0) || pos > (n - 1) as f64 {
        return 0.0;
    }
    let i = pos.floor() as usize;
    if i + 1 >= n {
        return values[n - 1];
    }
    let t = pos - i as f64;
    (1.0 - t) * values[i] + t * values[i + 1]
}

/// Four-point Lagrange interpolation at fractional index `pos`.
///
/// Values beyond the array are taken as zero and the result is zero outside
/// `[0, n-1]`. Reproduces cubic polynomials exactly away from the edges.
#[inline]
pub fn cubic_at(values: &[f64], pos: f64) -> f64 {
    let n = values.len();
    if !(pos >= 0.0) || pos > (n - 1) as f64 {
        return 0.0;
    }
    let i = pos.floor() as isize;
    let t = pos - i as f64;
    let w = cubic_weights(t);
    let mut acc = 0.0;
    for (k, wk) in w.iter().enumerate() {
        let idx = i + k as isize - 1;
        if idx >= 0 && (idx as usize) < n {
            acc += wk * values[idx as usize];
        }
    }
    acc
}

/// Lagrange weights for stencil offsets `-1, 0, 1, 2` at fraction `t ∈ [0, 1)`.
#[inline]
pub fn cubic_weights(t: f64) -> [f64; 4] {
    let tm1 = t - 1.0;
    let tm2 = t - 2.0;
    let tp1 = t + 1.0;
    [
        -t * tm1 * tm2 / 6.0,
        tp1 * tm1 * tm2 / 2.0,
        -tp1 * t * tm2 / 2.0,
        tp1 * t * tm1 / 6.0,
    ]
}
