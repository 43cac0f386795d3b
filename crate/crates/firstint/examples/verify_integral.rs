//! Check a hand-written candidate against a system built in code: Lie
//! residuals at random points and drift along RK4 trajectories.

use firstint::builder::{analyze, BuildConfig, FirstIntegral};
use firstint::expr::parse;
use firstint::linalg::{CMatrix, C64};
use firstint::system::{Kind, SystemSpec};
use firstint::verify::{verify_integrals, VerifyConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r = |v: f64| C64::new(v, 0.0);
    // harmonic oscillator x1' = x2, x2' = -x1
    let g = CMatrix::from_rows(&[vec![r(0.0), r(1.0)], vec![r(-1.0), r(0.0)]]);
    let spec = SystemSpec::new(Kind::Ode, vec![g], None)?;
    let a = analyze(&spec, &BuildConfig::default())?;
    let candidates = [
        "pow(x1,2)+pow(x2,2)",
        "atan2(x2,x1)+t1",
        "x1*x2",
    ];
    for s in candidates {
        let f = FirstIntegral::supplied(parse(s)?);
        let rep = verify_integrals(&spec, &a.verdict, &[f], &VerifyConfig { trajectories: 5, ..Default::default() })?;
        let c = &rep.integrals[0];
        println!("{s:28} lie {:.2e} drift {:.2e} -> {}", c.max_lie_residual, c.max_trajectory_drift, if c.passed { "integral" } else { "not an integral" });
    }
    Ok(())
}
