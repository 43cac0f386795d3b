//! candidate construction, exponent systems and general-integral assembly

mod common;

use firstint::builder::{
    analyze, exponent_basis, psi_functions, rank_targets, rationalize, BuildConfig, FirstIntegral, Tag,
};
use firstint::expr::{eval, parse, render, Point};
use firstint::linalg::{CMatrix, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[test]
fn rank_targets_by_kind() {
    assert_eq!(rank_targets(&common::load("sys_1_8")), (2, 4));
    assert_eq!(rank_targets(&common::load("sys_2_37")), (2, 4));
    assert_eq!(rank_targets(&common::load("sys_1_18")), (4, 6));
    assert_eq!(rank_targets(&common::load("nonhom_ode_3_6")).0, 0);
}

#[test]
fn analysis_reaches_targets() {
    for &(name, want_auto, want_total) in common::GOLDEN {
        let a = analyze(&common::load(name), &BuildConfig::default()).unwrap();
        let asm = a.assembly.as_ref().unwrap();
        assert_eq!(asm.rank, asm.target_total, "{name}");
        assert!(asm.autonomous_count >= want_auto, "{name}");
        assert!(a.integrals().len() >= want_total, "{name}");
    }
}

#[test]
fn unsolvable_systems_get_no_integrals() {
    let a = analyze(&common::load("sys_2_38"), &BuildConfig::default()).unwrap();
    assert!(!a.verdict.solvable);
    assert!(a.integrals().is_empty());
}

#[test]
fn analysis_is_deterministic() {
    let s = common::load("sys_3_20");
    let a = analyze(&s, &BuildConfig { seed: 5, ..Default::default() }).unwrap();
    let b = analyze(&s, &BuildConfig { seed: 5, ..Default::default() }).unwrap();
    let ra: Vec<String> = a.integrals().iter().map(|f| f.render()).collect();
    let rb: Vec<String> = b.integrals().iter().map(|f| f.render()).collect();
    assert_eq!(ra, rb);
}

#[test]
fn autonomous_integrals_do_not_mention_time() {
    let a = analyze(&common::load("sys_3_20"), &BuildConfig::default()).unwrap();
    for f in &a.candidates {
        assert_eq!(f.autonomous, !f.expr.contains_t(), "{}", f.render());
    }
    assert!(a.candidates.iter().any(|f| f.tag == Tag::ConjugateTime || f.tag == Tag::EigenTime));
}

#[test]
fn exponent_basis_spans_nullspace() {
    let m = CMatrix::from_rows(&[vec![c(1.0, 0.0), c(-2.0, 0.0), c(1.0, 0.0)]]);
    let hs = exponent_basis(&m).unwrap();
    assert_eq!(hs.len(), 2);
    for h in &hs {
        let r: C64 = m.row(0).iter().zip(h).map(|(a, b)| a * b).sum();
        assert!(r.norm() < 1e-12);
    }
}

#[test]
fn rationalize_snaps_small_ratios() {
    let h = rationalize(&[c(0.5000000000001, 0.0), c(-1.0, 0.0), c(0.25, 0.0)]);
    let r = h[0] / h[1];
    assert!((r - c(-0.5, 0.0)).norm() < 1e-14);
}

#[test]
fn psi_functions_for_a_short_chain() {
    // ν⁰ = e1, ν¹ = e2 gives v_1 = x2 / x1
    let vs = vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]];
    let v = psi_functions(&vs);
    assert_eq!(v.len(), 1);
    let p = Point::real(&[], &[2.0, 3.0]);
    assert!((eval(&v[0], &p, None).unwrap() - c(1.5, 0.0)).norm() < 1e-15);
}

#[test]
fn supplied_integrals_carry_guards() {
    let f = FirstIntegral::supplied(parse("x2*pow(x1,-1)").unwrap());
    assert!(f.autonomous);
    assert_eq!(f.tag, Tag::Supplied);
    assert_eq!(f.guards.len(), 1);
    assert_eq!(render(&f.expr), f.render());
    assert!(!FirstIntegral::supplied(parse("x1*exp(-t1)").unwrap()).autonomous);
}
