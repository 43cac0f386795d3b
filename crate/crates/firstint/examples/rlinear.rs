//! An R-linear complex system dw = A(w, w̄) dz + B(w, w̄) dz̄, embedded as a
//! real system over (w, w̄) with time coordinates Re z and Im z.

use firstint::builder::{analyze, BuildConfig};
use firstint::system::parse_spec;
use firstint::verify::{verify_integrals, VerifyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_spec(include_bytes!("sys_1_18.json"))?;
    println!("state dimension {} with {} real time directions", spec.dim(), spec.time_dims());
    let a = analyze(&spec, &BuildConfig::default())?;
    let fs = a.integrals();
    for f in &fs {
        println!("{}", f.render());
    }
    let r = verify_integrals(&spec, &a.verdict, &fs, &VerifyConfig::default())?;
    println!("verified: {} (joint rank {:?})", r.passed, r.independence_rank);
    Ok(())
}
