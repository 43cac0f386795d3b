//! common eigenvectors, pivot choice and chains

mod common;

use firstint::linalg::{CMatrix, C64};
use firstint::spectral::{chain_on, common_chain, common_eigenvectors, family_eigen, select_pivot_matrix};

fn residual(b: &CMatrix, lambda: C64, v: &[C64]) -> f64 {
    let bv = b.mul_vec(v);
    bv.iter().zip(v).map(|(a, x)| (a - lambda * x).norm()).fold(0.0, f64::max)
}

#[test]
fn tuples_are_common_eigenvectors() {
    for name in ["sys_2_3", "sys_2_8", "sys_2_12", "sys_2_37", "sys_1_18", "sys_3_20"] {
        let s = common::load(name);
        let eigen = family_eigen(&s, s.tol).unwrap();
        let data = common_eigenvectors(&s, &eigen, s.tol).unwrap();
        assert!(!data.tuples.is_empty(), "{name}");
        let bs = s.operator_matrices();
        for t in &data.tuples {
            let scale: f64 = t.vector.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (b, &l) in bs.iter().zip(&t.lambdas) {
                assert!(residual(b, l, &t.vector) <= 1e-8 * scale.max(1.0), "{name}: λ {l}");
            }
        }
    }
}

#[test]
fn conjugate_partners_pair_up_on_real_systems() {
    let s = common::load("sys_3_20");
    let eigen = family_eigen(&s, s.tol).unwrap();
    let data = common_eigenvectors(&s, &eigen, s.tol).unwrap();
    for (i, t) in data.tuples.iter().enumerate() {
        if let Some(p) = t.conjugate_partner {
            let q = &data.tuples[p];
            assert_eq!(q.conjugate_partner, Some(i));
            for (a, b) in t.lambdas.iter().zip(&q.lambdas) {
                assert!((a - b.conj()).norm() < 1e-9);
            }
        } else {
            assert!(t.is_real);
        }
    }
    // one representative per conjugate pair
    let reps = data.representatives(true);
    let pairs = data.tuples.iter().filter(|t| t.conjugate_partner.is_some()).count();
    assert_eq!(reps.len(), data.tuples.len() - pairs / 2);
}

#[test]
fn pivot_has_fewest_divisors() {
    let s = common::load("sys_2_37");
    let eigen = family_eigen(&s, s.tol).unwrap();
    let p = select_pivot_matrix(&eigen);
    assert!(eigen.iter().all(|e| e.divisor_count() >= eigen[p].divisor_count()));
}

#[test]
fn chains_satisfy_the_scaled_recursion() {
    for name in ["sys_2_18", "sys_2_21", "sys_2_37", "sys_3_17"] {
        let s = common::load(name);
        let eigen = family_eigen(&s, s.tol).unwrap();
        let data = common_eigenvectors(&s, &eigen, s.tol).unwrap();
        let bs = s.operator_matrices();
        let mut found = 0;
        for i in 0..data.tuples.len() {
            for j in 0..bs.len() {
                let Ok(ch) = chain_on(&s, &bs, &eigen, &data.tuples, i, j, s.tol) else { continue };
                found += 1;
                for k in 1..ch.vectors.len() {
                    let lhs = bs[j].shift(ch.lambda).mul_vec(&ch.vectors[k]);
                    let err = lhs.iter().zip(&ch.vectors[k - 1]).map(|(a, b)| (a - b * k as f64).norm()).fold(0.0, f64::max);
                    assert!(err < 1e-8, "{name} tuple {i} matrix {j} step {k}: {err:e}");
                }
            }
        }
        assert!(found > 0, "{name}: no chain");
    }
}

#[test]
fn common_chain_keeps_span_invariant() {
    let s = common::load("sys_2_37");
    let eigen = family_eigen(&s, s.tol).unwrap();
    let data = common_eigenvectors(&s, &eigen, s.tol).unwrap();
    let bs = s.operator_matrices();
    let ch = data.chains.first().expect("a chain");
    let t = &data.tuples[ch.tuple];
    let vs = common_chain(&bs, &t.lambdas, ch.matrix, &t.vector, ch.vectors.len(), s.tol).expect("common chain");
    // every (B_j − λ_j) maps ν^k into the span of the earlier vectors
    for (j, b) in bs.iter().enumerate() {
        for k in 1..vs.len() {
            let w = b.shift(t.lambdas[j]).mul_vec(&vs[k]);
            let basis = CMatrix::from_cols(w.len(), &vs[..k]);
            let coef = firstint::linalg::solve_min_norm(&basis, &w, 1e-12).unwrap();
            let back = basis.mul_vec(&coef);
            let gap = back.iter().zip(&w).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(gap < 1e-8, "direction {j} step {k}: {gap:e}");
        }
    }
}
