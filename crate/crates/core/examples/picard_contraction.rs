//! Contraction of the Duhamel map for Model A on short horizons, and the
//! monotone iteration for Model B.

use kinchem::kinetic::{monotone_iterate_b, picard_contraction_test};
use kinchem::{make_grids, DensityProfile, PhaseField, UniformGrid};

fn main() -> kinchem::Result<()> {
    let grid = UniformGrid::new(8.0, 81)?;
    let a = DensityProfile::from_fn(grid, |x| (-(x - 1.0) * (x - 1.0)).exp())?;
    let b = DensityProfile::from_fn(grid, |x| (-(x + 0.5) * (x + 0.5) / 2.0).exp())?;
    for (mass, horizon) in [(1.0, 0.2), (1.0, 0.5), (2.0, 0.3)] {
        let (a, b) = (a.scaled(mass / a.mass()), b.scaled(mass / b.mass()));
        let r = picard_contraction_test(&a, &b, horizon, mass)?;
        println!(
            "M = {mass}, T = {horizon}: ratio {:.4}, bound {:.4}",
            r.ratio, r.bound
        );
    }

    let (x, v) = make_grids(8.0, 65, 8.0, 65)?;
    let f = PhaseField::from_fn(x, v, |a, b| (-(a - 0.5).powi(2) - b * b / 2.0).exp())?
        .normalized(2.0)?;
    let r = monotone_iterate_b(&f, 0.5, 0.05, 6)?;
    println!(
        "Model B iterates: {} monotonicity violations, smallest increment {:.2e}, largest mass {:.10}",
        r.violations,
        r.min_increment,
        r.max_mass()
    );
    Ok(())
}
