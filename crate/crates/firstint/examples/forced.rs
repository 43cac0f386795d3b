//! Time-dependent integrals of forced systems dx = (G x + f(t)) dt, where the
//! forcing enters through closed forms or numeric accumulators.

use firstint::builder::{analyze, BuildConfig};
use firstint::system::parse_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for doc in [&include_bytes!("nonhom_ode_3_6.json")[..], include_bytes!("nonhom_total_2_8.json")] {
        let spec = parse_spec(doc)?;
        let a = analyze(&spec, &BuildConfig::default())?;
        println!("{:?} system, forcing residual {:?}", spec.kind, a.verdict.forcing_residual);
        for f in a.integrals() {
            println!("  {}  ({} accumulators)", f.render(), f.quads.len());
        }
    }
    Ok(())
}
