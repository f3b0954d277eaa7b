//! Nodal fields on the phase-space grid.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::grid::{SpatialGrid, VelocityGrid};

/// Nonnegative density `f(x_i, v_j)` stored as an `n_x × n_v` array.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    x: SpatialGrid,
    v: VelocityGrid,
    values: Array2<f64>,
}

impl PhaseField {
    pub fn new(x: SpatialGrid, v: VelocityGrid, values: Array2<f64>) -> Result<Self> {
        if values.dim() != (x.len(), v.len()) {
            return Err(Error::invalid(
                "values",
                format!(
                    "shape {:?} does not match grids ({}, {})",
                    values.dim(),
                    x.len(),
                    v.len()
                ),
            ));
        }
        if let Some(bad) = values.iter().find(|f| !(f.is_finite() && **f >= 0.0)) {
            return Err(Error::invalid(
                "values",
                format!("phase density must be finite and nonnegative, found {bad}"),
            ));
        }
        Ok(PhaseField { x, v, values })
    }

    /// Builds a field by sampling `f(x, v)` at the nodes.
    pub fn from_fn(x: SpatialGrid, v: VelocityGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = Array2::from_shape_fn((x.len(), v.len()), |(i, j)| f(x.node(i), v.node(j)));
        Self::new(x, v, values)
    }

    pub fn zeros(x: SpatialGrid, v: VelocityGrid) -> Self {
        PhaseField {
            x,
            v,
            values: Array2::zeros((x.len(), v.len())),
        }
    }

    /// Constructs without validation; callers guarantee nonnegativity.
    pub(crate) fn from_parts(x: SpatialGrid, v: VelocityGrid, values: Array2<f64>) -> Self {
        debug_assert_eq!(values.dim(), (x.len(), v.len()));
        PhaseField { x, v, values }
    }

    pub fn x_grid(&self) -> &SpatialGrid {
        &self.x
    }

    pub fn v_grid(&self) -> &VelocityGrid {
        &self.v
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    /// `∬ f dv dx` by the trapezoid rule.
    pub fn mass(&self) -> f64 {
        let wx = self.x.trapezoid_weights();
        let wv = self.v.trapezoid_weights();
        let mut total = 0.0;
        for (i, row) in self.values.outer_iter().enumerate() {
            let inner: f64 = row.iter().zip(&wv).map(|(f, w)| f * w).sum();
            total += wx[i] * inner;
        }
        total
    }

    /// `ρ(x) = ∫ f dv`.
    pub fn density(&self) -> DensityProfile {
        let wv = self.v.trapezoid_weights();
        let rho = self
            .values
            .outer_iter()
            .map(|row| row.iter().zip(&wv).map(|(f, w)| f * w).sum::<f64>())
            .collect();
        DensityProfile::from_parts(self.x, rho)
    }

    /// Multiplies the field so that its trapezoid mass equals `mass`.
    pub fn normalized(mut self, mass: f64) -> Result<Self> {
        let m = self.mass();
        if !(m > 0.0) {
            return Err(Error::invalid(
                "mass",
                "cannot normalize a field of zero mass",
            ));
        }
        self.values *= mass / m;
        Ok(self)
    }

    /// Largest deviation from joint evenness `f(x, v) = f(-x, -v)`.
    pub fn evenness_defect(&self) -> f64 {
        let (nx, nv) = self.values.dim();
        let mut worst: f64 = 0.0;
        for i in 0..nx {
            for j in 0..nv {
                let d = (self.values[[i, j]] - self.values[[nx - 1 - i, nv - 1 - j]]).abs();
                worst = worst.max(d);
            }
        }
        worst
    }
}

/// Nonnegative profile on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile<K> {
    grid: SpatialGrid,
    values: Vec<f64>,
    _kind: std::marker::PhantomData<K>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityKind;
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalKind;

/// Macroscopic cell density `ρ(x)`.
pub type DensityProfile = Profile<DensityKind>;
/// Chemoattractant concentration `S(x)`.
pub type SignalProfile = Profile<SignalKind>;

impl<K> Profile<K> {
    pub fn new(grid: SpatialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::invalid(
                "values",
                format!(
                    "length {} does not match grid ({})",
                    values.len(),
                    grid.len()
                ),
            ));
        }
        if let Some(bad) = values.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
            return Err(Error::invalid(
                "values",
                format!("profile must be finite and nonnegative, found {bad}"),
            ));
        }
        Ok(Self::from_parts(grid, values))
    }

    pub fn from_fn(grid: SpatialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    pub(crate) fn from_parts(grid: SpatialGrid, values: Vec<f64>) -> Self {
        Profile {
            grid,
            values,
            _kind: std::marker::PhantomData,
        }
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mass(&self) -> f64 {
        self.grid.integrate(&self.values)
    }

    /// `∫ x^k ρ dx` for `k = 0..=order`.
    pub fn moments(&self, order: usize) -> Vec<f64> {
        let w = self.grid.trapezoid_weights();
        (0..=order)
            .map(|k| {
                (0..self.grid.len())
                    .map(|i| w[i] * self.grid.node(i).powi(k as i32) * self.values[i])
                    .sum()
            })
            .collect()
    }

    /// Linear interpolation at an arbitrary position, zero outside the grid.
    #[inline]
    pub fn sample_linear(&self, x: f64) -> f64 {
        crate::quad::linear_at(&self.values, self.grid.fractional_index(x))
    }

    /// Four-point interpolation at an arbitrary position, clamped at zero.
    #[inline]
    pub fn sample_cubic(&self, x: f64) -> f64 {
        crate::quad::cubic_at(&self.values, self.grid.fractional_index(x)).max(0.0)
    }

    /// Average with the mirror image.
    pub fn symmetrized(&self) -> Self {
        let n = self.values.len();
        let values = (0..n)
            .map(|i| 0.5 * (self.values[i] + self.values[n - 1 - i]))
            .collect();
        Self::from_parts(self.grid, values)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_parts(self.grid, self.values.iter().map(|r| r * factor).collect())
    }

    /// `∫ |a - b| dx`.
    pub fn l1_distance(&self, other: &Self) -> f64 {
        let diff: Vec<f64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .collect();
        self.grid.integrate(&diff)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grids;

    #[test]
    fn zero_field_has_zero_mass() {
        let (x, v) = make_grids(5.0, 21, 5.0, 21).unwrap();
        assert_eq!(PhaseField::zeros(x, v).mass(), 0.0);
    }

    #[test]
    fn single_node_spike_normalizes_to_mass() {
        let (x, v) = make_grids(5.0, 21, 5.0, 21).unwrap();
        let mut vals = Array2::zeros((21, 21));
        vals[[10, 10]] = 1.0;
        let f = PhaseField::new(x, v, vals)
            .unwrap()
            .normalized(3.5)
            .unwrap();
        assert!((f.mass() - 3.5).abs() < 1e-14);
        assert!((f.get(10, 10) * x.spacing() * v.spacing() - 3.5).abs() < 1e-13);
    }

    #[test]
    fn gaussian_mass_is_accurate() {
        let (x, _) = make_grids(20.0, 801, 20.0, 5).unwrap();
        // 4 * N(1, 0.7^2)
        let s: f64 = 0.7;
        let rho = DensityProfile::from_fn(x, |y| {
            4.0 * (-(y - 1.0) * (y - 1.0) / (2.0 * s * s)).exp()
                / (s * (2.0 * std::f64::consts::PI).sqrt())
        })
        .unwrap();
        assert!((rho.mass() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn piecewise_linear_field_mass_is_exact() {
        let (x, v) = make_grids(3.0, 31, 2.0, 21).unwrap();
        let f = PhaseField::from_fn(x, v, |a, b| {
            (1.0 - a.abs()).max(0.0) * (1.0 - b.abs()).max(0.0)
        })
        .unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_values() {
        let (x, v) = make_grids(1.0, 5, 1.0, 5).unwrap();
        let mut vals = Array2::zeros((5, 5));
        vals[[1, 1]] = -1e-3;
        assert!(PhaseField::new(x, v, vals).is_err());
        assert!(DensityProfile::new(x, vec![0.0, 1.0, -1.0, 0.0, 0.0]).is_err());
        assert!(DensityProfile::new(x, vec![0.0; 4]).is_err());
    }

    #[test]
    fn even_field_reflection_is_identity() {
        let (x, v) = make_grids(4.0, 41, 3.0, 31).unwrap();
        let f = PhaseField::from_fn(x, v, |a, b| (-(a * a) - b * b - a * b).exp()).unwrap();
        assert_eq!(f.evenness_defect(), 0.0);
        let rho = f.density();
        let r = rho.values();
        for i in 0..r.len() {
            assert!((r[i] - r[r.len() - 1 - i]).abs() <= 1e-15 * r[i].abs().max(1.0));
        }
    }
}
