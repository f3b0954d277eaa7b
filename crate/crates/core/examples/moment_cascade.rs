//! Integrates the closed second-order moment system on both sides of the
//! critical mass `M = 2`.

use kinchem::moments::{integrate_cascade, second_order_steady_state, MomentTable};
use kinchem::ode::Tolerances;

fn main() -> kinchem::Result<()> {
    let tol = Tolerances::new(1e-12, 1e-12);
    for mass in [1.0, 1.9, 2.5, 4.0, 10.0] {
        let mut init = MomentTable::zeros(2);
        init.set(0, 0, mass);
        init.set(2, 0, mass);
        init.set(0, 2, mass);
        let traj = integrate_cascade(&init, mass, 1000.0, tol)?;
        match traj.diverged_at {
            Some(t) => println!("M = {mass:>4}: moments blow past the guard at t = {t:.2}"),
            None => {
                let last = traj.last();
                let (a20, _, a02) = second_order_steady_state(mass)?;
                println!(
                    "M = {mass:>4}: A20 = {:.8} (steady {a20:.8}), A11 = {:.1e}, A02 = {:.8} (steady {a02:.8})",
                    last.get(2, 0),
                    last.get(1, 1),
                    last.get(0, 2)
                );
            }
        }
    }
    Ok(())
}
