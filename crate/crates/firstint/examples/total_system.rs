//! Integrals of a completely solvable total differential system
//! dx = G1 x dt1 + G2 x dt2 with commuting G1, G2.

use firstint::builder::{analyze, BuildConfig};
use firstint::system::parse_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_spec(include_bytes!("sys_2_37.json"))?;
    let a = analyze(&spec, &BuildConfig::default())?;
    println!("commutator residual {:.1e}", a.verdict.max_commutator_residual);
    if let Some(data) = &a.common {
        for t in &data.tuples {
            println!("common eigenvector with λ per direction {:?}", t.lambdas);
        }
    }
    for p in &a.chains {
        println!("chain on direction {}: derivative constants {:?}", p.matrix + 1, p.mu);
    }
    for f in a.integrals() {
        println!("{}", f.render());
    }
    Ok(())
}
