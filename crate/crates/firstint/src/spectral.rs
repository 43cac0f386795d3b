//! Common eigenvectors of commuting families and the chains attached to them.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    adapted_eigenbasis, chain_length, eigen_structure, inner, jordan_chain, norm_inf_vec, normalize_eigvec, nullspace,
    solve_min_norm, solve_square, CMatrix, EigenStructure,
};
use crate::report::ser_cvec;
use crate::system::{Kind, SystemSpec};

#[derive(Debug, Clone, Serialize)]
pub struct Tuple {
    #[serde(serialize_with = "ser_cvec")]
    pub vector: Vec<C64>,
    /// eigenvalue of every operator matrix, in direction order
    #[serde(serialize_with = "ser_cvec")]
    pub lambdas: Vec<C64>,
    pub is_real: bool,
    pub conjugate_partner: Option<usize>,
    /// chain length of this eigenvector for the pivot matrix
    pub pivot_chain_length: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct Chain {
    pub tuple: usize,
    /// operator matrix the chain was built on
    pub matrix: usize,
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub lambda: C64,
    #[serde(serialize_with = "ser_vecs")]
    pub vectors: Vec<Vec<C64>>,
}

fn ser_vecs<S: serde::Serializer>(v: &[Vec<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let conv: Vec<Vec<[f64; 2]>> = v.iter().map(|x| crate::report::cvec_pairs(x)).collect();
    s.serialize_some(&conv)
}

#[derive(Debug, Clone, Serialize)]
pub struct CommonEigenData {
    pub tuples: Vec<Tuple>,
    pub pivot: usize,
    /// pivot-matrix chains of length ≥ 2, one per tuple that heads one
    pub chains: Vec<Chain>,
    pub warnings: Vec<String>,
}

impl CommonEigenData {
    /// tuples used as building blocks: real ones and one of each conjugate pair
    pub fn representatives(&self, real_field: bool) -> Vec<usize> {
        (0..self.tuples.len())
            .filter(|&i| {
                let t = &self.tuples[i];
                if !real_field || t.is_real {
                    return true;
                }
                match t.conjugate_partner {
                    Some(p) => is_positive_rep(&t.lambdas, &self.tuples[p].lambdas, i, p),
                    None => true,
                }
            })
            .collect()
    }
}

// the member of a conjugate pair whose first non-real eigenvalue has positive
// imaginary part; index order breaks exact ties
fn is_positive_rep(mine: &[C64], other: &[C64], i: usize, p: usize) -> bool {
    for (a, b) in mine.iter().zip(other) {
        if (a.im - b.im).abs() > 1e-9 {
            return a.im > b.im;
        }
    }
    i < p
}

/// index of the matrix with the fewest elementary divisors, lowest on ties
pub fn select_pivot_matrix(eigen: &[EigenStructure]) -> usize {
    let mut best = 0;
    for (j, e) in eigen.iter().enumerate() {
        if e.divisor_count() < eigen[best].divisor_count() {
            best = j;
        }
    }
    best
}

pub fn family_eigen(spec: &SystemSpec, tol: f64) -> Result<Vec<EigenStructure>> {
    spec.operator_matrices().iter().map(|b| eigen_structure(b, tol)).collect()
}

fn rayleigh(b: &CMatrix, v: &[C64]) -> C64 {
    inner(v, &b.mul_vec(v)) / inner(v, v)
}

// split a common invariant subspace into joint eigenspaces of `others`
fn split(n: usize, s: Vec<Vec<C64>>, others: &[&CMatrix], tol: f64, warnings: &mut Vec<String>) -> Result<Vec<Vec<Vec<C64>>>> {
    if s.len() <= 1 || others.is_empty() {
        return Ok(vec![s]);
    }
    let b = others[0];
    let sm = CMatrix::from_cols(n, &s);
    let sa = sm.adjoint();
    // restriction R with B S = S R
    let r = solve_square(&sa.mul(&sm), &sa.mul(&b.mul(&sm)), 1e-12)
        .ok_or_else(|| Error::structural("degenerate eigenspace basis"))?;
    let es = eigen_structure(&r, tol)?;
    let mut out = Vec::new();
    let mut got = 0;
    for ev in &es.eigenvalues {
        let k = nullspace(&r.shift(ev.value), tol)?;
        got += k.len();
        let sub: Vec<Vec<C64>> = k.iter().map(|c| sm.mul_vec(c)).collect();
        out.extend(split(n, sub, &others[1..], tol, warnings)?);
    }
    if got < s.len() {
        warnings.push(format!("restriction to a {}-dimensional common eigenspace is defective", s.len()));
    }
    Ok(out)
}

/// Common eigenvectors with their eigenvalue tuples, taken from the pivot
/// matrix's eigenspaces and split by the remaining matrices.
pub fn common_eigenvectors(spec: &SystemSpec, eigen: &[EigenStructure], tol: f64) -> Result<CommonEigenData> {
    let bs = spec.operator_matrices();
    let n = spec.dim();
    let pivot = select_pivot_matrix(eigen);
    let others: Vec<&CMatrix> = (0..bs.len()).filter(|&j| j != pivot).map(|j| &bs[j]).collect();
    let mut warnings = Vec::new();
    let mut tuples: Vec<Tuple> = Vec::new();

    for ev in &eigen[pivot].eigenvalues {
        let kernel = nullspace(&bs[pivot].shift(ev.value), tol)?;
        let smax = *ev.divisor_degrees.first().unwrap_or(&1);
        for space in split(n, kernel, &others, tol, &mut warnings)? {
            for (v, s) in adapted_eigenbasis(&bs[pivot], ev.value, &space, smax, tol) {
                let v = normalize_eigvec(&v);
                let lambdas: Vec<C64> = bs.iter().map(|b| rayleigh(b, &v)).collect();
                for (j, b) in bs.iter().enumerate() {
                    let res: Vec<C64> = b.mul_vec(&v).iter().zip(&v).map(|(a, x)| a - lambdas[j] * x).collect();
                    if norm_inf_vec(&res) > 1e-6 * (1.0 + b.norm_inf()) * norm_inf_vec(&v) {
                        warnings.push(format!("vector {} is not an eigenvector of matrix {}", tuples.len(), j + 1));
                    }
                }
                tuples.push(Tuple { vector: v, lambdas, is_real: false, conjugate_partner: None, pivot_chain_length: s });
            }
        }
    }
    link_conjugates(spec, &mut tuples);

    let mut chains = Vec::new();
    for (i, t) in tuples.iter().enumerate() {
        if t.pivot_chain_length >= 2 {
            if let Ok(c) = chain_on(spec, &bs, eigen, &tuples, i, pivot, tol) {
                chains.push(c);
            }
        }
    }
    Ok(CommonEigenData { tuples, pivot, chains, warnings })
}

fn conj_image(spec: &SystemSpec, v: &[C64]) -> Vec<C64> {
    match spec.kind {
        // γ = (w, w̄): conjugating a form swaps the blocks
        Kind::Rlinear => {
            let n = spec.n;
            (0..2 * n).map(|i| v[if i < n { i + n } else { i - n }].conj()).collect()
        }
        _ => v.iter().map(|z| z.conj()).collect(),
    }
}

fn conj_lambdas(spec: &SystemSpec, l: &[C64]) -> Vec<C64> {
    match spec.kind {
        Kind::Rlinear => {
            let m = spec.m;
            (0..2 * m).map(|k| l[if k < m { k + m } else { k - m }].conj()).collect()
        }
        _ => l.iter().map(|z| z.conj()).collect(),
    }
}

fn collinear(a: &[C64], b: &[C64]) -> bool {
    let ab = inner(a, b).norm();
    let na = inner(a, a).re.sqrt();
    let nb = inner(b, b).re.sqrt();
    (ab - na * nb).abs() <= 1e-8 * na * nb
}

fn link_conjugates(spec: &SystemSpec, tuples: &mut [Tuple]) {
    let real_field = spec.is_real();
    for t in tuples.iter_mut() {
        t.is_real = real_field && t.vector.iter().all(|z| z.im == 0.0) && t.lambdas.iter().all(|z| z.im.abs() <= 1e-12);
        if t.is_real {
            for z in t.lambdas.iter_mut() {
                z.im = 0.0;
            }
        }
    }
    if !(real_field || spec.kind == Kind::Rlinear) {
        return;
    }
    for i in 0..tuples.len() {
        if tuples[i].is_real || tuples[i].conjugate_partner.is_some() {
            continue;
        }
        let cv = conj_image(spec, &tuples[i].vector);
        let cl = conj_lambdas(spec, &tuples[i].lambdas);
        let found = (0..tuples.len()).find(|&k| {
            k != i
                && tuples[k].conjugate_partner.is_none()
                && collinear(&tuples[k].vector, &cv)
                && tuples[k].lambdas.iter().zip(&cl).all(|(a, b)| (a - b).norm() <= 1e-8 * (1.0 + b.norm()))
        });
        if let Some(k) = found {
            if k == i {
                continue;
            }
            tuples[i].conjugate_partner = Some(k);
            tuples[k].conjugate_partner = Some(i);
            if real_field {
                // make the pair exact conjugates
                tuples[k].vector = cv;
                tuples[k].lambdas = cl;
            }
        }
    }
}

/// Chain through tuple `i`'s eigenvector built on operator matrix `matrix`.
pub fn chain_on(
    spec: &SystemSpec,
    bs: &[CMatrix],
    eigen: &[EigenStructure],
    tuples: &[Tuple],
    i: usize,
    matrix: usize,
    tol: f64,
) -> Result<Chain> {
    let _ = spec;
    let t = &tuples[i];
    let lambda = t.lambdas[matrix];
    let cap = eigen[matrix]
        .eigenvalues
        .iter()
        .filter(|e| (e.value - lambda).norm() <= 1e-6 * (1.0 + lambda.norm()))
        .map(|e| e.divisor_degrees[0])
        .next()
        .unwrap_or(1);
    let s = chain_length(&bs[matrix], lambda, &t.vector, cap, tol);
    if s < 2 {
        return Err(Error::structural("eigenvector heads no chain on this matrix"));
    }
    let vectors = jordan_chain(&bs[matrix], lambda, s, &t.vector, tol)?;
    let vectors = common_chain(bs, &t.lambdas, matrix, &t.vector, s, tol).unwrap_or(vectors);
    Ok(Chain { tuple: i, matrix, lambda, vectors })
}

/// Chain on `matrix` whose span is invariant under every other matrix:
/// each step solves (B_p − λ_p)ν^k = kν^{k−1} together with
/// (B_j − λ_j)ν^k ∈ span(ν^0..ν^{k−1}) for j ≠ p, minimum norm.
/// None when some step has no such solution.
pub fn common_chain(bs: &[CMatrix], lambdas: &[C64], matrix: usize, v0: &[C64], s: usize, tol: f64) -> Option<Vec<Vec<C64>>> {
    let n = v0.len();
    let others: Vec<usize> = (0..bs.len()).filter(|&j| j != matrix).collect();
    let mut chain = vec![v0.to_vec()];
    for k in 1..s {
        // unknowns: ν^k then c[j][δ] for each other direction and δ < k
        let cols = n + others.len() * k;
        let rows = n * bs.len();
        let mut a = vec![C64::new(0.0, 0.0); rows * cols];
        let mut rhs = vec![C64::new(0.0, 0.0); rows];
        for (blk, &j) in std::iter::once(&matrix).chain(others.iter()).enumerate() {
            let sh = bs[j].shift(lambdas[j]);
            for r in 0..n {
                a[(blk * n + r) * cols..(blk * n + r) * cols + n].copy_from_slice(sh.row(r));
                if blk == 0 {
                    rhs[r] = chain[k - 1][r] * k as f64;
                } else {
                    for d in 0..k {
                        a[(blk * n + r) * cols + n + (blk - 1) * k + d] = -chain[d][r];
                    }
                }
            }
        }
        let a = CMatrix::new(rows, cols, a).ok()?;
        let y = solve_min_norm(&a, &rhs, tol)?;
        let back = a.mul_vec(&y);
        let scale = (1.0 + a.norm_inf()) * (1.0 + norm_inf_vec(&rhs));
        if back.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max) > 1e-8 * scale {
            return None;
        }
        chain.push(y[..n].to_vec());
    }
    Some(chain)
}
