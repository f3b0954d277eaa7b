//! Moments of the signal `S = ½ e^{-|·|} * ρ` from the density moments,
//! checked against direct quadrature of the computed signal.

use kinchem::signal::{convolve_signal, signal_moments};
use kinchem::{DensityProfile, UniformGrid};

fn main() -> kinchem::Result<()> {
    let grid = UniformGrid::new(30.0, 3001)?;
    let rho = DensityProfile::from_fn(grid, |x| {
        (-(x - 1.0).powi(2)).exp() + 0.5 * (-(x + 2.0).powi(2) / 3.0).exp()
    })?;
    let s = convolve_signal(&rho);
    let closed = signal_moments(&rho.moments(4));
    let xs = grid.nodes();
    println!("{:>2} {:>14} {:>14}", "k", "closed form", "quadrature");
    for k in 0..=4 {
        let vals: Vec<f64> = xs
            .iter()
            .zip(s.values())
            .map(|(x, s)| x.powi(k as i32) * s)
            .collect();
        println!(
            "{k:>2} {:>14.8} {:>14.8}",
            closed.get(k),
            grid.integrate(&vals)
        );
    }
    Ok(())
}
