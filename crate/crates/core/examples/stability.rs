//! Spectrum of the moment matrix `C_N`: eigenvalues, Routh–Hurwitz verdict
//! and the large-mass asymptotics of the roots.

use kinchem::moments::{asymptotic_roots, char_poly_coefficients, stability};

fn main() -> kinchem::Result<()> {
    for (order, mass) in [(2, 1.0), (2, 4.0), (4, 2.4), (4, 2.6), (6, 3.3)] {
        let r = stability(order, mass)?;
        println!(
            "N = {order}, M = {mass}: max Re λ = {:+.5}, {:?}, Routh-Hurwitz stable = {}",
            r.max_real_part, r.verdict, r.routh_hurwitz
        );
    }

    let (order, mass) = (3, 1000.0);
    println!(
        "\ncharacteristic polynomial of C_3 at M = 1000: {:?}",
        char_poly_coefficients(order, mass)
    );
    let mut eig = stability(order, mass)?.eigenvalues;
    eig.sort_by(|a, b| b.re.total_cmp(&a.re));
    println!("eigenvalues:");
    for z in &eig {
        println!("  {:+.4} {:+.4}i", z.re, z.im);
    }
    println!("prediction: -3 and -M - μ_j with");
    for mu in asymptotic_roots(order) {
        println!("  μ = {:+.4} {:+.4}i", mu.re, mu.im);
    }
    Ok(())
}
