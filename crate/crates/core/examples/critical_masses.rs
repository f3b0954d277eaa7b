//! Prints the critical mass of every moment order up to 12.

use kinchem::moments::critical_masses;

fn main() -> kinchem::Result<()> {
    println!("{:>3} {:>16}  positive roots of q_N", "N", "M_N");
    for entry in critical_masses(12, 10.0)? {
        let m = entry
            .critical_mass()
            .map_or("none".to_string(), |m| format!("{m:.12}"));
        let roots: Vec<String> = entry.roots.iter().map(|r| format!("{r:.6}")).collect();
        println!("{:>3} {m:>16}  [{}]", entry.order, roots.join(", "));
    }
    Ok(())
}
