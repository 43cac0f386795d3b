//! Chain functions v_θ and their constant derivatives μ.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{eval_dual, Expr};
use crate::report::ser_cvec;
use crate::system::SystemSpec;
use crate::verify::{rng_for, sample_point};

/// accepted chains keep every 𝔭_j v_θ within this of its mean
pub const MU_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Serialize)]
pub struct PsiChain {
    pub tuple: usize,
    /// operator direction whose matrix carries the chain
    pub matrix: usize,
    #[serde(skip)]
    pub vectors: Vec<Vec<C64>>,
    /// v_1 … v_{s-1}
    #[serde(serialize_with = "ser_exprs")]
    pub v: Vec<Expr>,
    /// mu[θ-1][j] = 𝔭_j v_θ
    #[serde(serialize_with = "ser_rows")]
    pub mu: Vec<Vec<C64>>,
    pub mu_constant_violation: f64,
    pub accepted: bool,
    pub note: Option<String>,
}

fn ser_exprs<S: serde::Serializer>(v: &[Expr], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::expr::render))
}

fn ser_rows<S: serde::Serializer>(v: &[Vec<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    #[derive(Serialize)]
    struct Row<'a>(#[serde(serialize_with = "ser_cvec")] &'a [C64]);
    s.collect_seq(v.iter().map(|r| Row(r)))
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// v_1 = ν¹x/ν⁰x and
/// v_θ = (ν^θx − Σ_{δ<θ} C(θ−1, δ−1) v_δ ν^{θ−δ}x) / ν⁰x.
pub fn psi_functions(vectors: &[Vec<C64>]) -> Vec<Expr> {
    let lin = |k: usize| Expr::lin(vectors[k].clone());
    let inv0 = Expr::recip(lin(0));
    let mut v: Vec<Expr> = Vec::new();
    for th in 1..vectors.len() {
        let mut num = vec![lin(th)];
        for d in 1..th {
            num.push(Expr::prod(vec![v[d - 1].clone(), lin(th - d)]).scaled(C64::new(-binom(th - 1, d - 1), 0.0)));
        }
        v.push(Expr::prod(vec![Expr::sum(num), inv0.clone()]));
    }
    v
}

fn snap(z: C64) -> C64 {
    let s = |a: f64| {
        let h = (2.0 * a).round() / 2.0;
        if (a - h).abs() <= 1e-9 {
            h
        } else {
            a
        }
    };
    C64::new(s(z.re), s(z.im))
}

/// Build the chain functions and measure 𝔭_j v_θ over `samples` points where
/// |ν⁰x| is comfortably away from zero.
pub fn psi_chain(spec: &SystemSpec, tuple: usize, matrix: usize, vectors: &[Vec<C64>], samples: usize, seed: u64) -> Result<PsiChain> {
    if vectors.len() < 2 {
        return Err(Error::input("", "a chain needs at least two vectors"));
    }
    let v = psi_functions(vectors);
    let d = spec.directions();
    let scale: f64 = vectors[0].iter().map(|z| z.norm()).sum();
    let mut rng = rng_for(seed, 0x5e1 + tuple as u64 * 31 + matrix as u64);
    let zero_t = vec![0.0; spec.time_dims()];
    let mut vals: Vec<Vec<Vec<C64>>> = vec![vec![Vec::new(); d]; v.len()];
    let mut got = 0;
    let mut tries = 0;
    while got < samples {
        tries += 1;
        if tries > 100 * samples {
            return Err(Error::precondition("could not sample away from the chain's leading form"));
        }
        let p = sample_point(spec, &mut rng, 2.0);
        let lead: C64 = vectors[0].iter().zip(&p.x).map(|(a, b)| a * b).sum();
        if lead.norm() < 0.1 * scale {
            continue;
        }
        for j in 0..d {
            let dx = spec.matrices[j].mul_vec(&p.x);
            for (th, e) in v.iter().enumerate() {
                vals[th][j].push(eval_dual(e, &p, &zero_t, &dx, None)?.1);
            }
        }
        got += 1;
    }
    let mut mu = vec![vec![C64::new(0.0, 0.0); d]; v.len()];
    let mut violation: f64 = 0.0;
    for th in 0..v.len() {
        for j in 0..d {
            let xs = &vals[th][j];
            let mean = xs.iter().sum::<C64>() / xs.len() as f64;
            let dev = xs.iter().map(|z| (z - mean).norm()).fold(0.0, f64::max);
            violation = violation.max(dev / (1.0 + mean.norm()));
            mu[th][j] = snap(mean);
        }
    }
    // on its own matrix the chain must give 𝔭 v_1 = 1 and 𝔭 v_θ = 0 beyond
    let mut note = None;
    for th in 0..v.len() {
        let want = if th == 0 { 1.0 } else { 0.0 };
        if (mu[th][matrix] - C64::new(want, 0.0)).norm() > 1e-6 {
            note = Some(format!("v_{} has derivative {} along its own matrix", th + 1, mu[th][matrix]));
        }
    }
    if note.is_none() && violation > MU_TOL {
        note = Some(format!("chain derivatives are not constant (deviation {violation:.3e})"));
    }
    Ok(PsiChain {
        tuple,
        matrix,
        vectors: vectors.to_vec(),
        v,
        mu,
        mu_constant_violation: violation,
        accepted: note.is_none(),
        note,
    })
}
