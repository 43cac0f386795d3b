//! Integrals of forced systems: w = exp(−Σ C_j t_j)·z − Q with
//! z_θ = ν^θx·φ(t), φ = exp(−Σ λ^j t_j) and ∂_j Q = exp(−Σ C t)·(ν^θ f_j)·φ.
//!
//! C_j is the strictly lower matrix of (B_j − λ^j)ν^θ = Σ_{δ<θ} c^j_{θδ} ν^δ,
//! so any common invariant chain works, not only the pivot's.

use num_complex::Complex64 as C64;

use super::{FirstIntegral, Tag};
use crate::error::{Error, Result};
use crate::expr::{Expr, QuadratureDef};
use crate::linalg::{norm_inf_vec, solve_min_norm, CMatrix};
use crate::system::SystemSpec;

type EMat = Vec<Vec<Expr>>;

fn emul(a: &EMat, b: &EMat) -> EMat {
    let s = a.len();
    (0..s)
        .map(|i| (0..s).map(|j| Expr::sum((0..s).map(|k| Expr::prod(vec![a[i][k].clone(), b[k][j].clone()])).collect())).collect())
        .collect()
}

/// lower coefficients c[j][θ][δ]; None when the span is not invariant
pub fn chain_coefficients(bs: &[CMatrix], lambdas: &[C64], vectors: &[Vec<C64>]) -> Option<Vec<Vec<Vec<C64>>>> {
    let s = vectors.len();
    let n = vectors[0].len();
    let mut out = vec![vec![vec![C64::new(0.0, 0.0); s]; s]; bs.len()];
    for (j, b) in bs.iter().enumerate() {
        for th in 0..s {
            let r: Vec<C64> = b.mul_vec(&vectors[th]).iter().zip(&vectors[th]).map(|(a, v)| a - lambdas[j] * v).collect();
            let scale = (1.0 + b.norm_inf()) * norm_inf_vec(&vectors[th]);
            if th == 0 {
                if norm_inf_vec(&r) > 1e-8 * scale {
                    return None;
                }
                continue;
            }
            let lower = CMatrix::from_cols(n, &vectors[..th]);
            let c = solve_min_norm(&lower, &r, 1e-10)?;
            let back = lower.mul_vec(&c);
            if back.iter().zip(&r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) > 1e-8 * scale {
                return None;
            }
            for (d, cd) in c.into_iter().enumerate() {
                out[j][th][d] = cd;
            }
        }
    }
    Some(out)
}

/// E(t) = exp(−Σ C_j t_j) as an expression matrix (nilpotent series)
fn decay_matrix(coeffs: &[Vec<Vec<C64>>], s: usize) -> EMat {
    let t: EMat = (0..s)
        .map(|th| (0..s).map(|d| Expr::lin_t(&coeffs.iter().map(|c| c[th][d]).collect::<Vec<_>>())).collect())
        .collect();
    let mut e: EMat = (0..s).map(|i| (0..s).map(|j| Expr::real(if i == j { 1.0 } else { 0.0 })).collect()).collect();
    let mut pow = t.clone();
    let mut fact = 1.0;
    for k in 1..s {
        fact *= k as f64;
        let c = C64::new(if k % 2 == 1 { -1.0 } else { 1.0 } / fact, 0.0);
        for i in 0..s {
            for j in 0..s {
                e[i][j] = Expr::sum(vec![e[i][j].clone(), pow[i][j].clone().scaled(c)]);
            }
        }
        pow = emul(&pow, &t);
    }
    e
}

/// Integrals of one chain block (a single vector when s = 1).
pub fn forced_block(spec: &SystemSpec, tuple: usize, vectors: &[Vec<C64>], lambdas: &[C64], split_real: bool) -> Result<Vec<FirstIntegral>> {
    let forcing = spec.forcing.as_ref().ok_or_else(|| Error::precondition("system has no forcing"))?;
    let bs = spec.operator_matrices();
    let s = vectors.len();
    let coeffs = chain_coefficients(&bs, lambdas, vectors).ok_or_else(|| Error::structural("chain span is not invariant"))?;
    let e = decay_matrix(&coeffs, s);
    let phi = Expr::exp(Expr::lin_t(&lambdas.iter().map(|l| -l).collect::<Vec<_>>()));
    let tag = if s == 1 { Tag::Forced } else { Tag::ForcedChain };
    let real_tuple = spec.is_real() && vectors.iter().all(|v| v.iter().all(|z| z.im == 0.0)) && lambdas.iter().all(|l| l.im == 0.0);

    let mut out = Vec::new();
    for th in 0..s {
        let main = Expr::prod(vec![
            Expr::sum((0..=th).map(|d| Expr::prod(vec![e[th][d].clone(), Expr::lin(vectors[d].clone())])).collect()),
            phi.clone(),
        ]);
        let integrand = |j: usize| -> Expr {
            let terms = (0..=th)
                .map(|d| {
                    let nf = Expr::sum(forcing[j].iter().zip(&vectors[d]).map(|(f, c)| f.clone().scaled(*c)).collect());
                    Expr::prod(vec![e[th][d].clone(), nf])
                })
                .collect();
            Expr::prod(vec![Expr::sum(terms), phi.clone()])
        };
        let ints: Vec<Expr> = (0..spec.directions()).map(integrand).collect();
        let mk = |expr: Expr, quads: Vec<QuadratureDef>| FirstIntegral {
            expr,
            autonomous: false,
            tag,
            guards: vec![],
            quads,
            provenance: vec![tuple],
        };
        let q0 = Expr::Quad(0).neg();
        if real_tuple {
            out.push(mk(Expr::sum(vec![main, q0]), vec![QuadratureDef { integrands: ints }]));
        } else if split_real {
            let re = QuadratureDef { integrands: ints.iter().cloned().map(Expr::re).collect() };
            let im = QuadratureDef { integrands: ints.iter().cloned().map(Expr::im).collect() };
            out.push(mk(Expr::sum(vec![Expr::re(main.clone()), q0.clone()]), vec![re]));
            out.push(mk(Expr::sum(vec![Expr::im(main), q0]), vec![im]));
        } else {
            let re = QuadratureDef { integrands: ints.iter().cloned().map(Expr::re).collect() };
            let im = QuadratureDef { integrands: ints.iter().cloned().map(Expr::im).collect() };
            let q1 = Expr::Quad(1).scaled(C64::new(0.0, -1.0));
            out.push(mk(Expr::sum(vec![main, q0, q1]), vec![re, im]));
        }
    }
    Ok(out)
}
