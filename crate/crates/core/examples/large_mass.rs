//! Concentration of steady states as the mass grows: the velocity marginal
//! approaches `½ e^{-|v|}` and `A20/M` shrinks like `2/(M-2)`.

use kinchem::make_grids;
use kinchem::stationary::{large_mass_comparison, solve_stationary, StationaryOptions};

fn main() -> kinchem::Result<()> {
    for (mass, l) in [(10.0, 8.0), (25.0, 6.0), (50.0, 4.0)] {
        let (x, v) = make_grids(l, 201, 20.0, 401)?;
        let res = solve_stationary(mass, &x, &v, &StationaryOptions::default())?;
        let r = large_mass_comparison(&res);
        println!(
            "M = {mass:>4}: marginal L¹ {:.4}, A20/M {:.5} (2/(M-2) = {:.5}), A02/M {:.4} (2M/(M-2) = {:.4})",
            r.marginal_l1, r.rescaled_a20, r.expected_a20, r.rescaled_a02, r.expected_a02
        );
    }
    Ok(())
}
