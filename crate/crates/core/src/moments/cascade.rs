use super::table::MomentTable;
use crate::error::{Error, Result};
use crate::ode::{Dopri5, Tolerances};
use crate::signal::{cross_moment_unchecked, signal_moments};

/// Magnitude at which a cascade run is declared divergent.
pub const DIVERGENCE_GUARD: f64 = 1e12;

/// Time derivative of every entry of a Model A moment table:
///
/// `dA_{m,n}/dt = m A_{m-1,n+1} + Σ_k C(n,k) (-1)^{n-k} S_k R_{m+n-k} - M A_{m,n}`
///
/// with `M = A_{0,0}`, `R_j = A_{j,0}` and `S_k` from the signal recursion.
pub fn moment_rhs_a(table: &MomentTable) -> MomentTable {
    let mut out = MomentTable::zeros(table.order());
    rhs_into(table.order(), table.as_slice(), &mut out);
    out
}

fn rhs_into(order: usize, flat: &[f64], out: &mut MomentTable) {
    let t = MomentTable::from_flat(order, flat.to_vec()).expect("flat length matches order");
    let r = t.density_moments();
    let s = signal_moments(&r);
    let mass = t.mass();
    for k in 0..=order {
        for n in 0..=k {
            let m = k - n;
            let transport = if m > 0 {
                m as f64 * t.get(m - 1, n + 1)
            } else {
                0.0
            };
            let gain = cross_moment_unchecked(n, k, s.values(), &r);
            out.set(m, n, transport + gain - mass * t.get(m, n));
        }
    }
}

/// Moment tables along a cascade integration.
#[derive(Debug, Clone)]
pub struct CascadeTrajectory {
    pub times: Vec<f64>,
    pub tables: Vec<MomentTable>,
    /// First time at which some moment exceeded the divergence guard.
    pub diverged_at: Option<f64>,
}

impl CascadeTrajectory {
    pub fn last(&self) -> &MomentTable {
        self.tables
            .last()
            .expect("trajectory holds the initial table")
    }
}

fn check_initial(initial: &MomentTable, mass: f64) -> Result<()> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid("M", "mass must be positive"));
    }
    if (initial.mass() - mass).abs() > 1e-9 * mass {
        return Err(Error::invalid(
            "initial",
            format!("A_0_0 = {} is inconsistent with M = {mass}", initial.mass()),
        ));
    }
    Ok(())
}

fn rhs_closure(order: usize) -> impl FnMut(f64, &[f64], &mut [f64]) {
    let mut scratch = MomentTable::zeros(order);
    move |_t, y, dy| {
        rhs_into(order, y, &mut scratch);
        dy.copy_from_slice(scratch.as_slice());
    }
}

/// Integrates the joint system of all orders up to `initial.order()` and
/// records every accepted step. Divergence stops the run without an error.
pub fn integrate_cascade(
    initial: &MomentTable,
    mass: f64,
    t_end: f64,
    tol: Tolerances,
) -> Result<CascadeTrajectory> {
    check_initial(initial, mass)?;
    let order = initial.order();
    let mut times = vec![0.0];
    let mut tables = vec![initial.clone()];
    let mut solver = Dopri5::new(tol).with_guard(DIVERGENCE_GUARD);
    let out = solver.integrate(
        rhs_closure(order),
        0.0,
        initial.as_slice(),
        t_end,
        |t, y| {
            times.push(t);
            tables.push(MomentTable::from_flat(order, y.to_vec()).expect("state length"));
        },
    )?;
    Ok(CascadeTrajectory {
        times,
        tables,
        diverged_at: out.blew_up.then_some(out.time),
    })
}

/// Like [`integrate_cascade`] but reports the moments exactly at `times`
/// (strictly increasing, starting at or after 0). A divergent run returns
/// the samples reached before the guard tripped.
pub fn sample_cascade(
    initial: &MomentTable,
    mass: f64,
    times: &[f64],
    tol: Tolerances,
) -> Result<CascadeTrajectory> {
    check_initial(initial, mass)?;
    let order = initial.order();
    let mut solver = Dopri5::new(tol).with_guard(DIVERGENCE_GUARD);
    let (samples, out) = solver.sample(rhs_closure(order), 0.0, initial.as_slice(), times)?;
    let tables: Vec<MomentTable> = samples
        .into_iter()
        .map(|y| MomentTable::from_flat(order, y).expect("state length"))
        .collect();
    Ok(CascadeTrajectory {
        times: times[..tables.len()].to_vec(),
        tables,
        diverged_at: out.blew_up.then_some(out.time),
    })
}

/// Equilibrium of the centred second-order block: `(2M/(M-2), 0, 2M²/(M-2))`.
pub fn second_order_steady_state(mass: f64) -> Result<(f64, f64, f64)> {
    if !(mass.is_finite() && mass > 2.0) {
        return Err(Error::CriticalMassNotExceeded { mass });
    }
    let d = mass - 2.0;
    Ok((2.0 * mass / d, 0.0, 2.0 * mass * mass / d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn centred(mass: f64, a20: f64, a11: f64, a02: f64) -> MomentTable {
        let mut t = MomentTable::zeros(2);
        t.set(0, 0, mass);
        t.set(2, 0, a20);
        t.set(1, 1, a11);
        t.set(0, 2, a02);
        t
    }

    #[test]
    fn first_order_equations() {
        let mut t = MomentTable::zeros(1);
        t.set(0, 0, 3.0);
        t.set(1, 0, 0.7);
        t.set(0, 1, -1.3);
        let d = moment_rhs_a(&t);
        assert_eq!(d.get(0, 0), 0.0);
        assert!((d.get(1, 0) - (-1.3)).abs() < 1e-15);
        assert!((d.get(0, 1) - 3.0 * 1.3).abs() < 1e-14);
    }

    #[test]
    fn second_order_equations() {
        let m = 2.5;
        let (a20, a11, a02) = (1.1, -0.4, 3.7);
        let d = moment_rhs_a(&centred(m, a20, a11, a02));
        assert!((d.get(2, 0) - 2.0 * a11).abs() < 1e-14);
        assert!((d.get(1, 1) - (a02 - m * a11 - m * a20)).abs() < 1e-14);
        assert!((d.get(0, 2) - (2.0 * m * a20 - m * a02 + 2.0 * m * m)).abs() < 1e-13);
    }

    #[test]
    fn steady_state_is_a_fixed_point() {
        for m in [2.5, 3.0, 4.0, 10.0] {
            let (a, b, c) = second_order_steady_state(m).unwrap();
            let d = moment_rhs_a(&centred(m, a, b, c));
            assert!(d.as_slice().iter().all(|v| v.abs() < 1e-12));
        }
        assert_eq!(second_order_steady_state(4.0).unwrap(), (4.0, 0.0, 16.0));
        assert_eq!(second_order_steady_state(3.0).unwrap(), (6.0, 0.0, 18.0));
        assert!(matches!(
            second_order_steady_state(2.0),
            Err(Error::CriticalMassNotExceeded { .. })
        ));
    }

    #[test]
    fn cascade_converges_above_two() {
        let traj = integrate_cascade(
            &centred(4.0, 4.0, 0.0, 4.0),
            4.0,
            60.0,
            Tolerances::default(),
        )
        .unwrap();
        assert!(traj.diverged_at.is_none());
        let last = traj.last();
        assert!((last.get(2, 0) - 4.0).abs() < 1e-6);
        assert!((last.get(0, 2) - 16.0).abs() < 1e-6);
    }

    #[test]
    fn cascade_diverges_below_two() {
        let traj = integrate_cascade(
            &centred(1.5, 1.5, 0.0, 1.5),
            1.5,
            1e4,
            Tolerances::default(),
        )
        .unwrap();
        assert!(traj.diverged_at.is_some());
    }

    #[test]
    fn stationary_start_stays_put() {
        let (a, b, c) = second_order_steady_state(4.0).unwrap();
        let t0 = centred(4.0, a, b, c);
        let traj = sample_cascade(&t0, 4.0, &[0.0, 5.0, 10.0], Tolerances::default()).unwrap();
        for t in &traj.tables {
            let d = (t.get(2, 0) - a).abs().max((t.get(0, 2) - c).abs());
            assert!(d < 1e-10);
        }
    }

    #[test]
    fn inconsistent_mass_rejected() {
        assert!(integrate_cascade(
            &centred(4.0, 1.0, 0.0, 1.0),
            3.0,
            1.0,
            Tolerances::default()
        )
        .is_err());
    }
}
