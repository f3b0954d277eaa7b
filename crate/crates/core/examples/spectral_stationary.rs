//! Solves the stationary problem for `ρ̂` in Fourier space and compares the
//! inverted density with the physical-space solver.

use kinchem::make_grids;
use kinchem::stationary::{
    inverse_transform, solve_stationary, solve_stationary_spectral, spectral_decay,
    SpectralOptions, StationaryOptions,
};

fn main() -> kinchem::Result<()> {
    let mass = 4.0;
    let spectral = solve_stationary_spectral(mass, &SpectralOptions::default())?;
    println!(
        "spectral iteration: {} steps, update {:.1e}",
        spectral.iterations, spectral.update
    );
    for n in 0..4 {
        let d = spectral_decay(&spectral.profile, n);
        println!("  (1+ξ²)^{n} |ρ̂| bounded on the band: {}", d.bounded());
    }

    let (x, v) = make_grids(20.0, 257, 20.0, 257)?;
    let physical = solve_stationary(mass, &x, &v, &StationaryOptions::default())?;
    let (rho, _) = inverse_transform(&spectral.profile, &x);
    println!(
        "L¹ distance between the two densities: {:.2e}",
        rho.l1_distance(&physical.rho)
    );
    Ok(())
}
