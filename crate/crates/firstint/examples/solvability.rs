//! Complete solvability check: a non-commuting pair of matrices is reported
//! with its commutator as a witness, and the system gets no integrals.

use firstint::builder::{analyze, BuildConfig};
use firstint::system::{frobenius_check, parse_spec};
use firstint::verify::path_independence_check;
use firstint::linalg::C64;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for doc in [&include_bytes!("sys_2_37.json")[..], include_bytes!("sys_2_38.json")] {
        let spec = parse_spec(doc)?;
        let v = frobenius_check(&spec, spec.tol);
        let x0: Vec<C64> = (0..spec.dim()).map(|i| C64::new(0.5 - 0.3 * i as f64, 0.0)).collect();
        let gap = path_independence_check(&spec, &x0, &vec![0.8; spec.time_dims()], 1e-3)?;
        println!("solvable {} residual {:.3e} pair {:?} path gap {:.2e}", v.solvable, v.max_commutator_residual, v.offending_pair, gap);
        if let Some(w) = &v.defect_witness {
            for i in 0..w.rows() {
                println!("  {:?}", w.row(i).iter().map(|z| z.re).collect::<Vec<_>>());
            }
        }
        println!("  integrals: {}", analyze(&spec, &BuildConfig::default())?.integrals().len());
    }
    Ok(())
}
