//! parser, renderer, evaluation, dual numbers and guards

use firstint::expr::{eval, eval_dual, implied_guards, parse, render, Expr, GuardKind, Point};
use firstint::linalg::C64;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn at(x: &[f64], t: &[f64]) -> Point {
    Point::real(t, x)
}

fn val(s: &str, p: &Point) -> C64 {
    eval(&parse(s).unwrap(), p, None).unwrap()
}

#[test]
fn arithmetic_and_precedence() {
    let p = at(&[2.0, 3.0], &[0.5]);
    assert!((val("x1+x2*t1", &p) - c(3.5, 0.0)).norm() < 1e-15);
    assert!((val("-x1*x2", &p) - c(-6.0, 0.0)).norm() < 1e-15);
    assert!((val("(x1+x2)*t1", &p) - c(2.5, 0.0)).norm() < 1e-15);
    assert!((val("pow(x1,3)", &p) - c(8.0, 0.0)).norm() < 1e-12);
    assert!((val("x2*pow(x1,-1)", &p) - c(1.5, 0.0)).norm() < 1e-15);
}

#[test]
fn linear_forms_and_complex_constants() {
    let p = at(&[1.0, 2.0], &[]);
    assert!((val("lin([(1,1),(0,-1)])", &p) - c(1.0, -1.0)).norm() < 1e-15);
    assert!((val("re(lin([(1,1),(0,-1)]))", &p) - c(1.0, 0.0)).norm() < 1e-15);
    assert!((val("im(lin([(1,1),(0,-1)]))", &p) - c(-1.0, 0.0)).norm() < 1e-15);
    assert!((val("exp((0,1)*t1)", &at(&[], &[std::f64::consts::PI])) - c(-1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn transcendental_functions() {
    let p = at(&[1.0, -1.0], &[]);
    assert!((val("atan2(x1,x2)", &p).re - 1.0f64.atan2(-1.0)).abs() < 1e-15);
    assert!((val("log(x1)", &p)).norm() < 1e-15);
    assert!((val("abs(x2)", &p) - c(1.0, 0.0)).norm() < 1e-15);
    assert!((val("exp(x1)", &p).re - std::f64::consts::E).abs() < 1e-14);
}

#[test]
fn parse_errors() {
    for bad in ["", "x0", "y1", "pow(x1)", "lin([])", "x1+", "exp(x1", "quad(-1)", "1..2", "x2/x1"] {
        assert!(parse(bad).is_err(), "{bad}");
    }
}

#[test]
fn render_round_trips() {
    for s in [
        "exp(2*atan2(lin([0,1]),lin([1,0])))*pow(lin([1,1]),-1)",
        "re(lin([(1,1),(0,-1)])*pow(lin([1,(0,1)]),(0.5,0.25)))-3*t1",
        "log(lin([1,2]))+quad(0)",
    ] {
        let e = parse(s).unwrap();
        assert_eq!(parse(&render(&e)).unwrap(), e, "{s}");
    }
}

#[test]
fn dual_matches_finite_difference() {
    let e = parse("exp(t1)*pow(lin([1,2]),(0.5,0.5))*atan2(x2,x1)").unwrap();
    let p = at(&[1.3, 0.7], &[0.2]);
    let dt = [0.4];
    let dx = [c(-0.3, 0.0), c(0.9, 0.0)];
    let (v, d) = eval_dual(&e, &p, &dt, &dx, None).unwrap();
    let h = 1e-6;
    let shift = |s: f64| Point::real(&[0.2 + s * dt[0]], &[1.3 + s * dx[0].re, 0.7 + s * dx[1].re]);
    let fd = (eval(&e, &shift(h), None).unwrap() - eval(&e, &shift(-h), None).unwrap()) / (2.0 * h);
    assert!((v - eval(&e, &p, None).unwrap()).norm() < 1e-15);
    assert!((d - fd).norm() < 1e-7 * (1.0 + d.norm()));
}

#[test]
fn guards_follow_expression_shape() {
    let kinds = |s: &str| -> Vec<GuardKind> { implied_guards(&parse(s).unwrap()).iter().map(|g| g.kind).collect() };
    assert_eq!(kinds("pow(lin([1,0]),-2)"), vec![GuardKind::NonZero]);
    assert_eq!(kinds("pow(lin([1,0]),0.5)"), vec![GuardKind::Branch]);
    assert_eq!(kinds("log(x1)"), vec![GuardKind::Branch]);
    assert_eq!(kinds("atan2(x1,x2)"), vec![GuardKind::Sign, GuardKind::Sign]);
    assert!(kinds("x1*x2+pow(x1,2)").is_empty());
    // the same base appears once
    assert_eq!(kinds("pow(lin([1,0]),-1)+pow(lin([1,0]),-1)").len(), 1);
}

#[test]
fn structural_queries() {
    let e = parse("exp(-t1)*lin([1,0])").unwrap();
    assert!(e.contains_t() && e.contains_x() && !e.contains_quad());
    assert!(!parse("lin([1,0])").unwrap().contains_t());
    assert!(matches!(Expr::lin(vec![c(1.0, 0.0)]), Expr::Lin(_)));
}
