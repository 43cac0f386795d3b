//! General integral of an autonomous linear ODE with complex spectrum.
//!
//! cargo run --example analyze_ode [spec.json]

use firstint::builder::{analyze, BuildConfig};
use firstint::system::parse_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sys_3_20.json").into());
    let spec = parse_spec(&std::fs::read(&path)?)?;
    let a = analyze(&spec, &BuildConfig::default())?;
    for e in &a.eigen[0].eigenvalues {
        println!("λ = {:.6}  multiplicity {}  divisors {:?}", e.value, e.multiplicity, e.divisor_degrees);
    }
    let asm = a.assembly.as_ref().expect("solvable system");
    println!("rank {}/{} ({} autonomous)", asm.rank, asm.target_total, asm.autonomous_count);
    for (i, f) in a.integrals().iter().enumerate() {
        println!("F{} [{:?}] = {}", i + 1, f.tag, f.render());
    }
    Ok(())
}
