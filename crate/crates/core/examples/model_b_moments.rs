//! Second-order moments of Model B grow without bound for every mass; the
//! determinant identity holds along the way.

use kinchem::moments::{model_b_order2, model_b_steady_state};

fn main() -> kinchem::Result<()> {
    for mass in [0.5, 1.0, 4.0] {
        let r = model_b_order2(mass, [1.0, 0.0, 1.0], 100.0)?;
        let growth = r
            .jacobian_eigenvalues
            .iter()
            .map(|z| z.re)
            .fold(f64::NEG_INFINITY, f64::max);
        println!(
            "M = {mass}: steady state {:?} (unstable, growth rate {growth:.4}); exceeds 1e6 at t = {:?}; identity defect {:.1e}",
            model_b_steady_state(mass),
            r.exceeds_threshold_at,
            r.integral_defect
        );
    }
    Ok(())
}
