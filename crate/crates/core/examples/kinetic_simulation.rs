//! Runs Model A from a Gaussian product and prints the second moments next
//! to the closed moment cascade started from the same data.

use kinchem::kinetic::{simulate, SimulationConfig};
use kinchem::moments::{compute_moments, sample_cascade};
use kinchem::ode::Tolerances;
use kinchem::{make_grids, ModelKind, PhaseField};

fn main() -> kinchem::Result<()> {
    let mass = 4.0;
    let (x, v) = make_grids(16.0, 129, 16.0, 129)?;
    let f0 = PhaseField::from_fn(x, v, |a, b| (-(a * a + b * b) / 2.0).exp())?.normalized(mass)?;

    let mut cfg = SimulationConfig::new(ModelKind::A, 0.02, 3.0);
    cfg.stride = 25;
    let traj = simulate(&cfg, &f0)?;
    let ode = sample_cascade(
        &compute_moments(&f0, 2),
        mass,
        &traj.times,
        Tolerances::new(1e-12, 1e-12),
    )?;

    println!(
        "{:>6} {:>12} {:>12} {:>12} {:>12}",
        "t", "A20 pde", "A20 ode", "A02 pde", "A02 ode"
    );
    for (k, t) in traj.times.iter().enumerate() {
        let (p, o) = (&traj.moments[k], &ode.tables[k]);
        println!(
            "{t:>6.2} {:>12.6} {:>12.6} {:>12.6} {:>12.6}",
            p.get(2, 0),
            o.get(2, 0),
            p.get(0, 2),
            o.get(0, 2)
        );
    }
    println!(
        "mass drift {:.2e}, outflow {:.2e}",
        traj.max_mass_drift(),
        traj.outflow.last().copied().unwrap_or(0.0)
    );
    Ok(())
}
