mod common;

use firstint::builder::FirstIntegral;
use firstint::expr::parse;
use firstint::verify::lie_residual_check;

#[test]
fn printed_integrals_are_integrals() {
    let mut bad = Vec::new();
    for (sys, label, src) in common::printed_integrals() {
        let spec = common::load(sys);
        let e = parse(&src).unwrap_or_else(|e| panic!("{sys} {label}: {e}"));
        let f = FirstIntegral::supplied(e);
        let r = lie_residual_check(&f, &spec, 200, 3).unwrap_or_else(|e| panic!("{sys} {label}: {e}"));
        if r.max_residual > 1e-8 {
            bad.push(format!("{sys} {label}: {:.3e}", r.max_residual));
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

// the printed second chain function of the six-dimensional families has
// denominator P; homogeneity needs P², and only the latter is an integral
#[test]
fn printed_denominator_is_not_an_integral() {
    let spec = common::load("sys_2_32");
    let a = "(x1+x3+x4+x6)";
    let b = "(x3+x5)";
    let p = format!("(pow({a},2)+pow({b},2))");
    let n1 = format!("((x1+x2)*{a}+{b}*(x2+x5+x6))");
    let n2 = format!("({a}*(x2+x5+x6)-(x1+x2)*{b})");
    let num = format!("(pow({n2},2)+2*{p}*((x1+x3)*{a}+{b}*(x1+x3+x5+x6))-pow({n1},2))");
    let printed = FirstIntegral::supplied(parse(&format!("{num}*pow({p},-1)")).unwrap());
    let fixed = FirstIntegral::supplied(parse(&format!("{num}*pow({p},-2)")).unwrap());
    assert!(lie_residual_check(&printed, &spec, 200, 1).unwrap().max_residual > 1e-2);
    assert!(lie_residual_check(&fixed, &spec, 200, 1).unwrap().max_residual < 1e-8);
}
