use nalgebra::{Complex, Matrix3};

use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};

/// Growth threshold reported as "unbounded" for Model B runs.
pub const GROWTH_THRESHOLD: f64 = 1e6;

/// Trajectory of `(A_{2,0}, A_{1,1}, A_{0,2})` for Model B with diagnostics.
#[derive(Debug, Clone)]
pub struct ModelBReport {
    pub mass: f64,
    pub times: Vec<f64>,
    pub states: Vec<[f64; 3]>,
    /// `D = A_{2,0} A_{0,2} - A_{1,1}²` along the trajectory.
    pub determinant: Vec<f64>,
    /// Largest relative gap between `D(t) - D(0)` and the integral of
    /// `2M A_{2,0}(M + A_{2,0})` carried along as an extra state.
    pub integral_defect: f64,
    /// Largest relative gap between `dD/dt` computed from the vector field
    /// and `2M A_{2,0}(M + A_{2,0})`.
    pub pointwise_defect: f64,
    pub min_diagonal: f64,
    /// First recorded time at which `max(A_{2,0}, A_{0,2})` exceeds 1e6.
    pub exceeds_threshold_at: Option<f64>,
    pub jacobian_eigenvalues: Vec<Complex<f64>>,
    pub steady_state: [f64; 3],
}

fn field(mass: f64, a: &[f64], d: &mut [f64]) {
    d[0] = 2.0 * a[1];
    d[1] = a[2] - mass * a[0];
    d[2] = 2.0 * mass * (mass + a[0] - a[1]);
}

/// Jacobian of the (linear) Model B second-order system.
pub fn model_b_jacobian(mass: f64) -> Matrix3<f64> {
    Matrix3::new(0.0, 2.0, 0.0, -mass, 0.0, 1.0, 2.0 * mass, -2.0 * mass, 0.0)
}

/// The unique equilibrium `(-M, 0, -M²)`, which no nonnegative density can reach.
pub fn model_b_steady_state(mass: f64) -> [f64; 3] {
    [-mass, 0.0, -mass * mass]
}

/// Integrates `Ȧ20 = 2A11`, `Ȧ11 = A02 - M A20`, `Ȧ02 = 2M(M + A20 - A11)`
/// from `initial = (A20, A11, A02)` up to `t_end`, stopping early once the
/// moments pass 1e12.
pub fn model_b_order2(mass: f64, initial: [f64; 3], t_end: f64) -> Result<ModelBReport> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("M", "mass must be positive"));
    }
    let [a20, a11, a02] = initial;
    if !(a20 > 0.0 && a02 > 0.0 && a20 * a02 > a11 * a11) {
        return Err(Error::invalid(
            "initial",
            "need A_2_0 > 0, A_0_2 > 0 and A_2_0 A_0_2 > A_1_1²",
        ));
    }

    // fourth state: ∫ 2M A20 (M + A20) dt
    let rhs = |_t: f64, y: &[f64], dy: &mut [f64]| {
        field(mass, &y[..3], &mut dy[..3]);
        dy[3] = 2.0 * mass * y[0] * (mass + y[0]);
    };
    let det = |y: &[f64]| y[0] * y[2] - y[1] * y[1];
    let d0 = det(&initial);

    let mut times = vec![0.0];
    let mut states = vec![initial];
    let mut determinant = vec![d0];
    let mut integral_defect: f64 = 0.0;
    let mut pointwise_defect: f64 = 0.0;
    let mut min_diagonal = a20.min(a02);
    let mut exceeds = None;

    let mut check = |t: f64, y: &[f64]| {
        let d = det(y);
        let target = 2.0 * mass * y[0] * (mass + y[0]);
        let mut dy = [0.0; 3];
        field(mass, &y[..3], &mut dy);
        let dd = dy[0] * y[2] + y[0] * dy[2] - 2.0 * y[1] * dy[1];
        pointwise_defect = pointwise_defect.max((dd - target).abs() / target.abs().max(1.0));
        integral_defect = integral_defect.max((d - d0 - y[3]).abs() / d.abs().max(1.0));
        min_diagonal = min_diagonal.min(y[0]).min(y[2]);
        if exceeds.is_none() && y[0].max(y[2]) > GROWTH_THRESHOLD {
            exceeds = Some(t);
        }
        times.push(t);
        states.push([y[0], y[1], y[2]]);
        determinant.push(d);
    };

    let mut solver = Dopri5::new(Tolerances::new(1e-12, 1e-12)).with_guard(1e12);
    solver.integrate(rhs, 0.0, &[a20, a11, a02, 0.0], t_end, |t, y| check(t, y))?;

    let jacobian_eigenvalues = model_b_jacobian(mass)
        .complex_eigenvalues()
        .iter()
        .copied()
        .collect();
    Ok(ModelBReport {
        mass,
        times,
        states,
        determinant,
        integral_defect,
        pointwise_defect,
        min_diagonal,
        exceeds_threshold_at: exceeds,
        jacobian_eigenvalues,
        steady_state: model_b_steady_state(mass),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growth_and_identity() {
        for m in [1.0, 4.0] {
            let r = model_b_order2(m, [m, 0.0, m], 50.0).unwrap();
            assert!(r.min_diagonal > 0.0);
            assert!(r.exceeds_threshold_at.is_some());
            assert!(r.integral_defect < 1e-8, "{}", r.integral_defect);
            assert!(r.pointwise_defect < 1e-12);
        }
    }

    #[test]
    fn jacobian_has_unstable_direction() {
        for m in [0.5, 2.0, 10.0] {
            let r = model_b_order2(m, [1.0, 0.0, 1.0], 0.1).unwrap();
            assert!(r.jacobian_eigenvalues.iter().any(|z| z.re > 0.0));
            assert!(r.steady_state[0] < 0.0 && r.steady_state[2] < 0.0);
        }
    }

    #[test]
    fn steady_state_is_equilibrium() {
        let s = model_b_steady_state(3.0);
        let mut d = [0.0; 3];
        field(3.0, &s, &mut d);
        assert_eq!(d, [0.0; 3]);
    }

    #[test]
    fn rejects_non_positive_definite_start() {
        assert!(model_b_order2(1.0, [1.0, 2.0, 1.0], 1.0).is_err());
    }
}
