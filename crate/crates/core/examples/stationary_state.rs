//! Steady state of Model A at `M = 4` and its moments, regularity and strong
//! residual.

use kinchem::make_grids;
use kinchem::stationary::{regularity_diagnostic, solve_stationary, StationaryOptions};

fn main() -> kinchem::Result<()> {
    let mass = 4.0;
    let (x, v) = make_grids(20.0, 257, 20.0, 257)?;
    let res = solve_stationary(mass, &x, &v, &StationaryOptions::default())?;
    println!(
        "converged in {} iterations, update {:.1e}",
        res.iterations, res.update
    );
    println!(
        "A20 = {:.5} (exact {}), A11 = {:.1e}, A02 = {:.5} (exact {})",
        res.moments.get(2, 0),
        2.0 * mass / (mass - 2.0),
        res.moments.get(1, 1),
        res.moments.get(0, 2),
        2.0 * mass * mass / (mass - 2.0)
    );
    println!(
        "max |v| f = {:.4} ≤ M² = {}",
        res.max_velocity_weighted,
        mass * mass
    );
    println!("strong residual {:.2e}", res.residual);
    let reg = regularity_diagnostic(&res);
    println!(
        "fitted decay order of the 2D transform: {}",
        reg.fitted_order
    );
    for x0 in [0.0, 1.0, 4.0] {
        println!("ρ({x0}) = {:.6}", res.rho.sample_cubic(x0));
    }
    Ok(())
}
