//! Uniform, symmetric tensor grids.
//!
//! Point counts are odd so that `0` is always a node and reflection about the
//! central index is an exact symmetry of the grid.

use crate::error::{Error, Result};

/// Uniformly spaced nodes `x_i = (i - c) dx` on `[-L, L]`, `c = (n - 1) / 2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    half_width: f64,
    len: usize,
    spacing: f64,
}

pub type SpatialGrid = UniformGrid;
pub type VelocityGrid = UniformGrid;

impl UniformGrid {
    pub fn new(half_width: f64, len: usize) -> Result<Self> {
        Self::checked("half_width", "len", half_width, len)
    }

    fn checked(width_name: &str, len_name: &str, half_width: f64, len: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::invalid(
                width_name,
                format!("must be positive, got {half_width}"),
            ));
        }
        if len < 5 {
            return Err(Error::invalid(
                len_name,
                format!("need at least 5 points, got {len}"),
            ));
        }
        if len.is_multiple_of(2) {
            return Err(Error::invalid(
                len_name,
                format!("point count must be odd, got {len}"),
            ));
        }
        Ok(UniformGrid {
            half_width,
            len,
            spacing: 2.0 * half_width / (len - 1) as f64,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Index of the node at the origin.
    #[inline]
    pub fn center(&self) -> usize {
        (self.len - 1) / 2
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        (i as f64 - self.center() as f64) * self.spacing
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len).map(|i| self.node(i)).collect()
    }

    /// Index of the mirror node `-x_i`.
    #[inline]
    pub fn mirror(&self, i: usize) -> usize {
        self.len - 1 - i
    }

    /// Fractional index of an arbitrary position (may lie outside `[0, n-1]`).
    #[inline]
    pub fn fractional_index(&self, position: f64) -> f64 {
        position / self.spacing + self.center() as f64
    }

    /// Composite trapezoid weights.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let mut w = vec![self.spacing; self.len];
        w[0] *= 0.5;
        w[self.len - 1] *= 0.5;
        w
    }

    #[inline]
    pub fn trapezoid_weight(&self, i: usize) -> f64 {
        if i == 0 || i + 1 == self.len {
            0.5 * self.spacing
        } else {
            self.spacing
        }
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len);
        let inner: f64 = values[1..self.len - 1].iter().sum();
        self.spacing * (inner + 0.5 * (values[0] + values[self.len - 1]))
    }
}

/// Builds the spatial and velocity grids of a phase-space computation.
pub fn make_grids(
    half_width_x: f64,
    n_x: usize,
    half_width_v: f64,
    n_v: usize,
) -> Result<(SpatialGrid, VelocityGrid)> {
    let x = UniformGrid::checked("L", "n_x", half_width_x, n_x)?;
    let v = UniformGrid::checked("V", "n_v", half_width_v, n_v)?;
    Ok((x, v))
}
