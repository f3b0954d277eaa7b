use nalgebra::{Complex, DMatrix};

use super::table::MomentTable;
use super::{binomial, factorial};
use crate::error::{Error, Result};
use crate::signal::signal_moments;

/// Tolerance separating stable, marginal and unstable spectra.
pub const REAL_PART_TOL: f64 = 1e-9;

/// One product `coefficient · S_k · R_j` of lower-order moments entering
/// row `row` of the order-`N` block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub row: usize,
    pub coefficient: f64,
    pub s_index: usize,
    pub r_index: usize,
}

/// The order-`N` block `d/dt a = C_N a + b(lower moments)` in the basis
/// `a = (A_{N,0}, A_{N-1,1}, …, A_{0,N})`.
#[derive(Debug, Clone)]
pub struct MomentSystem {
    pub order: usize,
    pub mass: f64,
    pub matrix: DMatrix<f64>,
    pub couplings: Vec<Coupling>,
}

impl MomentSystem {
    /// Evaluates the inhomogeneity from a table holding all orders below `N`
    /// (entries of order `N` are ignored).
    pub fn inhomogeneity(&self, lower: &MomentTable) -> Result<Vec<f64>> {
        if lower.order() + 1 < self.order {
            return Err(Error::IndexOutOfRange(format!(
                "order {} block needs moments up to order {}",
                self.order,
                self.order - 1
            )));
        }
        let r: Vec<f64> = (0..self.order).map(|j| lower.get(j, 0)).collect();
        let s = signal_moments(&r);
        let mut b = vec![0.0; self.order + 1];
        for c in &self.couplings {
            b[c.row] += c.coefficient * s.get(c.s_index) * r[c.r_index];
        }
        Ok(b)
    }
}

/// Assembles `C_N`: diagonal `-M`, superdiagonal `N - n` in row `n`, and
/// `((-1)^n + δ_{n,N}) M` added to column 0.
pub fn build_matrix(order: usize, mass: f64) -> Result<MomentSystem> {
    if order == 0 {
        return Err(Error::invalid("N", "order must be at least 1"));
    }
    let n_dim = order + 1;
    let mut c = DMatrix::zeros(n_dim, n_dim);
    let mut couplings = Vec::new();
    for n in 0..=order {
        c[(n, n)] -= mass;
        if n < order {
            c[(n, n + 1)] += (order - n) as f64;
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let delta = if n == order { 1.0 } else { 0.0 };
        c[(n, 0)] += (sign + delta) * mass;

        // Σ_k C(n,k)(-1)^{n-k} S_k R_{N-k} without the k = 0 term and
        // without the order-N part of S_N
        for k in 1..=n {
            let coeff = binomial(n, k) * if (n - k) % 2 == 0 { 1.0 } else { -1.0 };
            if k < order {
                couplings.push(Coupling {
                    row: n,
                    coefficient: coeff,
                    s_index: k,
                    r_index: order - k,
                });
            } else if order >= 2 {
                // S_N = R_N + N(N-1) S_{N-2}, paired with R_0
                couplings.push(Coupling {
                    row: n,
                    coefficient: coeff * (order * (order - 1)) as f64,
                    s_index: order - 2,
                    r_index: 0,
                });
            }
        }
    }
    Ok(MomentSystem {
        order,
        mass,
        matrix: c,
        couplings,
    })
}

/// `q_N(M) = 1 + Σ_{n<N} (-1)^{N-n} M^n / n!`.
pub fn q_n(order: usize, mass: f64) -> f64 {
    let mut total = 1.0;
    let mut term = 1.0;
    for n in 0..order {
        if n > 0 {
            term *= mass / n as f64;
        }
        let sign = if (order - n).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        total += sign * term;
    }
    total
}

/// `p_N(λ) = -λ(-M-λ)^N + M N! Σ_{n<N} (-M-λ)^n/n! + (-1)^N M N!`,
/// which equals `det(C_N - λ I)`.
pub fn char_poly_pn(order: usize, mass: f64, lambda: f64) -> f64 {
    let w = -mass - lambda;
    let nf = factorial(order);
    let mut sum = 0.0;
    let mut term = 1.0;
    for n in 0..order {
        if n > 0 {
            term *= w / n as f64;
        }
        sum += term;
    }
    let sign = if order.is_multiple_of(2) { 1.0 } else { -1.0 };
    -lambda * w.powi(order as i32) + mass * nf * sum + sign * mass * nf
}

/// Coefficients of `p_N` in ascending powers of `λ` (degree `N + 1`).
pub fn char_poly_coefficients(order: usize, mass: f64) -> Vec<f64> {
    // (-M-λ)^n = Σ_j C(n,j) (-M)^{n-j} (-λ)^j
    let power = |n: usize| -> Vec<f64> {
        (0..=n)
            .map(|j| {
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                binomial(n, j) * (-mass).powi((n - j) as i32) * sign
            })
            .collect()
    };
    let nf = factorial(order);
    let mut coeffs = vec![0.0; order + 2];
    for (j, c) in power(order).into_iter().enumerate() {
        coeffs[j + 1] -= c;
    }
    for n in 0..order {
        let scale = mass * nf / factorial(n);
        for (j, c) in power(n).into_iter().enumerate() {
            coeffs[j] += scale * c;
        }
    }
    coeffs[0] += if order.is_multiple_of(2) { 1.0 } else { -1.0 } * mass * nf;
    coeffs
}

/// Positive zeros of `q_N` found by one scan.
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalMassEntry {
    pub order: usize,
    pub roots: Vec<f64>,
}

impl CriticalMassEntry {
    /// The smallest root, if any.
    pub fn critical_mass(&self) -> Option<f64> {
        self.roots.first().copied()
    }
}

const SCAN_STEP: f64 = 0.01;
const BISECTION_TOL: f64 = 1e-10;

/// Scans `q_N` on `(0, M_max]` in steps of 0.01 for `N = 2..=N_max` and
/// refines every sign change by bisection. An empty root list means no
/// zero was found in the range.
pub fn critical_masses(max_order: usize, max_mass: f64) -> Result<Vec<CriticalMassEntry>> {
    if max_order < 2 {
        return Err(Error::invalid("N_max", "must be at least 2"));
    }
    if !(max_mass.is_finite() && max_mass > SCAN_STEP) {
        return Err(Error::invalid("M_max", "must exceed the scan step 0.01"));
    }
    let steps = (max_mass / SCAN_STEP).floor() as usize;
    Ok((2..=max_order)
        .map(|order| {
            let q = |m: f64| q_n(order, m);
            let mut roots = Vec::new();
            let mut prev_m = SCAN_STEP;
            let mut prev_q = q(prev_m);
            if prev_q == 0.0 {
                roots.push(prev_m);
            }
            for i in 2..=steps {
                let m = i as f64 * SCAN_STEP;
                let qm = q(m);
                if qm == 0.0 {
                    roots.push(m);
                } else if prev_q != 0.0 && (prev_q < 0.0) != (qm < 0.0) {
                    roots.push(bisect(q, prev_m, m, prev_q));
                }
                prev_m = m;
                prev_q = qm;
            }
            CriticalMassEntry { order, roots }
        })
        .collect())
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    Unstable,
    Marginal,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Stable => "stable",
            Verdict::Unstable => "unstable",
            Verdict::Marginal => "marginal",
        })
    }
}

#[derive(Debug, Clone)]
pub struct StabilityReport {
    pub order: usize,
    pub mass: f64,
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_real_part: f64,
    pub verdict: Verdict,
    /// Routh–Hurwitz verdict on the characteristic polynomial
    /// (`true` when every root lies strictly in the left half-plane).
    pub routh_hurwitz: bool,
}

impl StabilityReport {
    /// Both tests agree: strict stability exactly when the verdict is stable.
    pub fn consistent(&self) -> bool {
        self.routh_hurwitz == (self.verdict == Verdict::Stable)
    }
}

/// Spectrum of `C_N` and the resulting stability verdict.
pub fn stability(order: usize, mass: f64) -> Result<StabilityReport> {
    let system = build_matrix(order, mass)?;
    let eigenvalues: Vec<Complex<f64>> = system
        .matrix
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    let max_real_part = eigenvalues
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max);
    let verdict = if max_real_part < -REAL_PART_TOL {
        Verdict::Stable
    } else if max_real_part > REAL_PART_TOL {
        Verdict::Unstable
    } else {
        Verdict::Marginal
    };
    let routh_hurwitz = routh_hurwitz_stable(&char_poly_coefficients(order, mass));
    Ok(StabilityReport {
        order,
        mass,
        eigenvalues,
        max_real_part,
        verdict,
        routh_hurwitz,
    })
}

/// Routh–Hurwitz test for a real polynomial given in ascending powers.
/// Returns `true` iff all roots have strictly negative real part.
pub fn routh_hurwitz_stable(ascending: &[f64]) -> bool {
    let mut coeffs: Vec<f64> = ascending.iter().rev().copied().collect();
    while coeffs.first() == Some(&0.0) {
        coeffs.remove(0);
    }
    if coeffs.is_empty() {
        return false;
    }
    if coeffs[0] < 0.0 {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    if coeffs.iter().any(|&c| c <= 0.0) {
        return false;
    }
    let scale = coeffs.iter().fold(0.0f64, |a, c| a.max(c.abs()));
    let mut upper: Vec<f64> = coeffs.iter().step_by(2).copied().collect();
    let mut lower: Vec<f64> = coeffs.iter().skip(1).step_by(2).copied().collect();
    for _ in 1..coeffs.len() {
        let pivot = lower.first().copied().unwrap_or(0.0);
        if pivot <= 1e-14 * scale {
            return false;
        }
        let next: Vec<f64> = (0..upper.len().saturating_sub(1))
            .map(|i| upper[i + 1] - upper[0] * lower.get(i + 1).copied().unwrap_or(0.0) / pivot)
            .collect();
        upper = lower;
        lower = next;
        if lower.is_empty() {
            break;
        }
    }
    true
}

/// Roots of `r_N(μ) = (-1)^N + Σ_{n≤N} μ^n/n!` (companion-matrix
/// eigenvalues). For large `M` the spectrum of `C_N` approaches
/// `{-N} ∪ {-M - μ_j}`.
pub fn asymptotic_roots(order: usize) -> Vec<Complex<f64>> {
    if order == 0 {
        return Vec::new();
    }
    let lead = 1.0 / factorial(order);
    let mut coeffs: Vec<f64> = (0..order).map(|n| 1.0 / factorial(n) / lead).collect();
    coeffs[0] += if order.is_multiple_of(2) { 1.0 } else { -1.0 } / lead;
    let mut comp = DMatrix::zeros(order, order);
    for i in 1..order {
        comp[(i, i - 1)] = 1.0;
    }
    for (i, c) in coeffs.iter().enumerate() {
        comp[(i, order - 1)] = -c;
    }
    comp.complex_eigenvalues().iter().copied().collect()
}
