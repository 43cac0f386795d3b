//! Chain functions v_θ of a Jordan chain and their constant derivatives
//! along every direction, plus an exponent system solved for h.

use firstint::builder::{exponent_solution, psi_chain, psi_functions};
use firstint::expr::render;
use firstint::linalg::{CMatrix, C64};
use firstint::system::parse_spec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = parse_spec(include_bytes!("sys_2_18.json"))?;
    let analysis = firstint::builder::analyze(&spec, &Default::default())?;
    let chain = analysis.chains.first().expect("a chain");
    for (k, v) in chain.vectors.iter().enumerate() {
        println!("ν^{k} = {:?}", v.iter().map(|z| z.re).collect::<Vec<_>>());
    }
    for (th, v) in psi_functions(&chain.vectors).iter().enumerate() {
        println!("v_{} = {}", th + 1, render(v));
    }
    let p = psi_chain(&spec, chain.tuple, chain.matrix, &chain.vectors, 100, 0)?;
    for (th, row) in p.mu.iter().enumerate() {
        println!("derivatives of v_{}: {:?}", th + 1, row.iter().map(|z| z.re).collect::<Vec<_>>());
    }

    let c = |re: f64, im: f64| C64::new(re, im);
    let m = CMatrix::from_rows(&[vec![c(1.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)], vec![c(0.0, 1.0), c(1.0, -1.0), c(2.0, 0.0)]]);
    println!("exponents h = {:?}", exponent_solution(&m)?);
    Ok(())
}
