//! Choice of reference frame for the initial datum.

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::field::PhaseField;
use crate::quad::linear_at;

/// Outcome of recentring an initial datum.
#[derive(Debug, Clone)]
pub struct CenteredField {
    pub field: PhaseField,
    /// Limit `A_{1,0}(∞) = A_{1,0}(0) + A_{0,1}(0)/M` of the first spatial
    /// moment before recentring.
    pub asymptotic_moment: f64,
    /// Position `A_{1,0}(∞)/M` that was moved to the origin.
    pub shift: f64,
    /// Initial flux `A_{0,1}(0)`, which no translation can remove.
    pub residual_flux: f64,
}

/// Translates `f_I` in `x` so that the long-time centre of mass sits at 0.
///
/// The first moments obey `Ȧ_{1,0} = A_{0,1}`, `Ȧ_{0,1} = -M A_{0,1}`, so
/// `A_{1,0}(t) → A_{1,0}(0) + A_{0,1}(0)/M`. Translation uses linear
/// interpolation with zero inflow.
pub fn center_frame(f: &PhaseField, mass: f64) -> Result<CenteredField> {
    if !(mass > 0.0) {
        return Err(Error::invalid(
            "M",
            format!("mass must be positive, got {mass}"),
        ));
    }
    let xg = *f.x_grid();
    let vg = *f.v_grid();
    let wx = xg.trapezoid_weights();
    let wv = vg.trapezoid_weights();
    let (mut a10, mut a01) = (0.0, 0.0);
    for i in 0..xg.len() {
        for j in 0..vg.len() {
            let w = wx[i] * wv[j] * f.get(i, j);
            a10 += w * xg.node(i);
            a01 += w * vg.node(j);
        }
    }
    let asymptotic_moment = a10 + a01 / mass;
    let shift = asymptotic_moment / mass;
    if shift == 0.0 {
        return Ok(CenteredField {
            field: f.clone(),
            asymptotic_moment,
            shift,
            residual_flux: a01,
        });
    }
    let offset = shift / xg.spacing();
    let mut out = Array2::zeros((xg.len(), vg.len()));
    let mut column = vec![0.0; xg.len()];
    for j in 0..vg.len() {
        for (i, c) in column.iter_mut().enumerate() {
            *c = f.get(i, j);
        }
        for i in 0..xg.len() {
            out[[i, j]] = linear_at(&column, i as f64 + offset);
        }
    }
    Ok(CenteredField {
        field: PhaseField::from_parts(xg, vg, out),
        asymptotic_moment,
        shift,
        residual_flux: a01,
    })
}
