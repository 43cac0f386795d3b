use num_complex::Complex64 as C64;
use serde::Serialize;

use super::matrix::{norm_inf_vec, CMatrix};
use super::poly;
use super::rref::{column_basis, intersect, nullspace, rank, solve_min_norm};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct EigenValue {
    #[serde(serialize_with = "crate::report::ser_c64")]
    pub value: C64,
    pub multiplicity: usize,
    /// sizes of the elementary divisors, largest first
    pub divisor_degrees: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EigenStructure {
    pub eigenvalues: Vec<EigenValue>,
    /// per eigenvalue, a Jordan basis split into chains ν^0..ν^{s-1}
    #[serde(serialize_with = "crate::report::ser_chains")]
    pub chains: Vec<Vec<Vec<Vec<C64>>>>,
    pub tolerance_used: f64,
    /// two clusters closer than ten times the clustering radius
    pub ambiguous: bool,
}

impl EigenStructure {
    pub fn divisor_count(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.divisor_degrees.len()).sum()
    }

    pub fn find(&self, lambda: C64, tol: f64) -> Option<usize> {
        self.eigenvalues.iter().position(|e| (e.value - lambda).norm() <= tol)
    }
}

pub fn cluster_tol(b: &CMatrix, tol: f64) -> f64 {
    tol.max(1e-7 * b.norm_inf())
}

// a k-fold root is a simple root of the (k-1)-th derivative
fn refine(cp: &[C64], start: C64, k: usize) -> C64 {
    let mut d = cp.to_vec();
    for _ in 1..k {
        d = poly::derivative(&d);
    }
    let dd = poly::derivative(&d);
    let mut lam = start;
    poly::polish(&d, &dd, &mut lam);
    lam
}

struct Cluster {
    members: Vec<usize>,
}

fn mean(roots: &[C64], idx: &[usize]) -> C64 {
    idx.iter().map(|&i| roots[i]).sum::<C64>() / idx.len() as f64
}

// a cluster of size k is genuine when (B - λE)^k drops rank by exactly k
fn cluster_ok(b: &CMatrix, lambda: C64, k: usize, tol: f64) -> bool {
    let n = b.rows();
    rank(&b.shift(lambda).pow(k), tol) == n - k
}

// single-linkage dendrogram split: cut the largest internal edge
fn split(roots: &[C64], members: &[usize]) -> (Vec<usize>, Vec<usize>) {
    // minimum spanning tree over the members (Prim), then drop its longest edge
    let k = members.len();
    let mut in_tree = vec![false; k];
    let mut best = vec![f64::INFINITY; k];
    let mut parent = vec![usize::MAX; k];
    best[0] = 0.0;
    let mut edges = Vec::new();
    for _ in 0..k {
        let u = (0..k).filter(|&i| !in_tree[i]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        in_tree[u] = true;
        if parent[u] != usize::MAX {
            edges.push((best[u], parent[u], u));
        }
        for v in 0..k {
            if !in_tree[v] {
                let d = (roots[members[u]] - roots[members[v]]).norm();
                if d < best[v] {
                    best[v] = d;
                    parent[v] = u;
                }
            }
        }
    }
    let cut = edges.iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).map(|(i, _)| i).unwrap();
    // components after removing the cut edge
    let mut comp = vec![0usize; k];
    let mut label = 0;
    for s in 0..k {
        if comp[s] != 0 {
            continue;
        }
        label += 1;
        let mut stack = vec![s];
        comp[s] = label;
        while let Some(u) = stack.pop() {
            for (i, &(_, a, b)) in edges.iter().enumerate() {
                if i == cut {
                    continue;
                }
                let other = if a == u { b } else if b == u { a } else { continue };
                if comp[other] == 0 {
                    comp[other] = label;
                    stack.push(other);
                }
            }
        }
    }
    let left = (0..k).filter(|&i| comp[i] == 1).map(|i| members[i]).collect();
    let right = (0..k).filter(|&i| comp[i] != 1).map(|i| members[i]).collect();
    (left, right)
}

/// Eigenvalues with multiplicities, elementary-divisor degrees and a Jordan
/// basis in the factor-k chain convention.
pub fn eigen_structure(b: &CMatrix, tol: f64) -> Result<EigenStructure> {
    if !b.is_square() {
        return Err(Error::input("", "eigen_structure needs a square matrix"));
    }
    if b.rows() > 32 {
        return Err(Error::input("", "matrices larger than 32x32 are not supported"));
    }
    let n = b.rows();
    let cp = poly::char_poly(b);
    let roots = poly::roots(&cp)?;
    let ctol = cluster_tol(b, tol);
    let real = b.is_real(0.0);

    // multiple roots come back spread by ~eps^(1/k); link loosely, then let
    // the rank test split clusters that are not genuine
    let loose = ctol.max(1e-2 * (1.0 + b.norm_inf()));
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut Vec<usize>, i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() <= loose {
                let (a, bb) = (find(&mut comp, i), find(&mut comp, j));
                if a != bb {
                    comp[a.max(bb)] = a.min(bb);
                }
            }
        }
    }
    let labels: Vec<usize> = (0..n).map(|i| find(&mut comp, i)).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        match groups.iter_mut().find(|g| labels[g[0]] == labels[i]) {
            Some(g) => g.push(i),
            None => groups.push(vec![i]),
        }
    }
    let mut work: Vec<Cluster> = groups.into_iter().map(|m| Cluster { members: m }).collect();
    let mut done: Vec<Cluster> = Vec::new();
    while let Some(c) = work.pop() {
        let k = c.members.len();
        let lam = refine(&cp, mean(&roots, &c.members), k);
        let spread = c.members.iter().map(|&i| (roots[i] - lam).norm()).fold(0.0, f64::max);
        if k == 1 || spread <= ctol || cluster_ok(b, lam, k, tol) {
            done.push(c);
        } else {
            let (l, r) = split(&roots, &c.members);
            work.push(Cluster { members: l });
            work.push(Cluster { members: r });
        }
    }

    let mut eigenvalues = Vec::new();
    for c in &done {
        let k = c.members.len();
        let mut lam = refine(&cp, mean(&roots, &c.members), k);
        // real matrices: real roots come back with round-off imaginary parts
        if real && lam.im.abs() <= ctol {
            lam.im = 0.0;
        }
        eigenvalues.push((lam, k));
    }
    eigenvalues.sort_by(|a, b| {
        let ka = ((a.0.re * 1e7).round() as i64, a.0.im);
        let kb = ((b.0.re * 1e7).round() as i64, b.0.im);
        ka.0.cmp(&kb.0).then(ka.1.total_cmp(&kb.1))
    });
    let mut ambiguous = false;
    for i in 0..eigenvalues.len() {
        for j in i + 1..eigenvalues.len() {
            if (eigenvalues[i].0 - eigenvalues[j].0).norm() <= 10.0 * ctol {
                ambiguous = true;
            }
        }
    }

    let mut out = Vec::new();
    let mut chains = Vec::new();
    for &(lam, mult) in &eigenvalues {
        let nmat = b.shift(lam);
        let mut ranks = vec![n];
        for k in 1..=mult {
            ranks.push(rank(&nmat.pow(k), tol));
        }
        // blocks of size >= k: ranks[k-1] - ranks[k]
        let mut degrees = Vec::new();
        for k in (1..=mult).rev() {
            let ge_k = ranks[k - 1].saturating_sub(ranks[k]);
            let ge_k1 = if k < mult { ranks[k].saturating_sub(ranks[k + 1]) } else { 0 };
            for _ in 0..ge_k.saturating_sub(ge_k1) {
                degrees.push(k);
            }
        }
        if degrees.iter().sum::<usize>() != mult {
            // rank sequence inconsistent with the cluster size; fall back to
            // whatever the kernel dimension says and report it as ambiguous
            ambiguous = true;
            let geo = n - ranks[1];
            degrees = vec![1; geo.max(1)];
            let extra = mult.saturating_sub(degrees.len());
            degrees[0] += extra;
        }
        let basis = adapted_eigenbasis(b, lam, &nullspace(&nmat, tol)?, *degrees.first().unwrap_or(&1), tol);
        let mut cs = Vec::new();
        for (v, s) in basis {
            let v = normalize_eigvec(&v);
            match jordan_chain(b, lam, s, &v, tol) {
                Ok(ch) => cs.push(ch),
                Err(_) => cs.push(vec![v]),
            }
        }
        out.push(EigenValue { value: lam, multiplicity: mult, divisor_degrees: degrees });
        chains.push(cs);
    }
    Ok(EigenStructure { eigenvalues: out, chains, tolerance_used: tol, ambiguous })
}

/// Largest s with ν ∈ range((B - λE)^{s-1}), capped at `cap`.
pub fn chain_length(b: &CMatrix, lambda: C64, v: &[C64], cap: usize, tol: f64) -> usize {
    let nmat = b.shift(lambda);
    let mut s = 1;
    while s < cap {
        if solve_min_norm(&nmat.pow(s), v, tol).is_none() {
            break;
        }
        s += 1;
    }
    s
}

/// Basis of the eigenspace `kernel` adapted to the filtration
/// ker N ∩ range N^{k-1}; each vector is tagged with its chain length.
pub fn adapted_eigenbasis(b: &CMatrix, lambda: C64, kernel: &[Vec<C64>], smax: usize, tol: f64) -> Vec<(Vec<C64>, usize)> {
    let n = b.rows();
    let nmat = b.shift(lambda);
    let mut chosen: Vec<(Vec<C64>, usize)> = Vec::new();
    for k in (1..=smax).rev() {
        let level = if k == 1 {
            kernel.to_vec()
        } else {
            let range = column_basis(&nmat.pow(k - 1), tol);
            intersect(n, kernel, &range, tol)
        };
        for v in reduced_basis(n, &level, tol) {
            let mut cur: Vec<Vec<C64>> = chosen.iter().map(|c| c.0.clone()).collect();
            cur.push(v.clone());
            if rank(&CMatrix::from_cols(n, &cur), tol) == cur.len() {
                chosen.push((v, k));
            }
        }
    }
    chosen
}

// row-reduce the span so basis vectors have unit pivots; keeps integer
// eigenvectors integer where possible
fn reduced_basis(n: usize, vs: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    if vs.is_empty() {
        return Vec::new();
    }
    let m = CMatrix::from_cols(n, vs).transpose();
    let rr = super::rref::rref(&m, tol);
    (0..rr.rank()).map(|i| rr.reduced.row(i).to_vec()).collect()
}

/// Chain ν^0..ν^{s-1} with (B - λE)ν^k = k ν^{k-1}.
///
/// Built from the minimum-norm top vector u solving (B - λE)^{s-1} u = ν^0,
/// then ν^k = k! (B - λE)^{s-1-k} u.
pub fn jordan_chain(b: &CMatrix, lambda: C64, s: usize, v0: &[C64], tol: f64) -> Result<Vec<Vec<C64>>> {
    if s == 0 {
        return Err(Error::input("", "chain length must be at least 1"));
    }
    let nmat = b.shift(lambda);
    let scale = tol * (1.0 + b.norm_inf()) * (1.0 + norm_inf_vec(v0));
    if norm_inf_vec(&nmat.mul_vec(v0)) > scale * 10.0 {
        return Err(Error::input("", "ν0 is not an eigenvector for the given λ"));
    }
    if s == 1 {
        return Ok(vec![v0.to_vec()]);
    }
    let top = match solve_min_norm(&nmat.pow(s - 1), v0, tol) {
        Some(u) => u,
        None => {
            let got = chain_length(b, lambda, v0, s, tol);
            return Err(Error::structural(format!("chain extends only to length {got}, requested {s}")));
        }
    };
    let mut chain = vec![Vec::new(); s];
    let mut w = top;
    // walk down from ν^{s-1}
    for k in (0..s).rev() {
        let f = (1..=k).map(|i| i as f64).product::<f64>();
        chain[k] = w.iter().map(|z| z * f).collect();
        if k > 0 {
            w = nmat.mul_vec(&w);
        }
    }
    chain[0] = v0.to_vec();
    Ok(chain)
}

/// Scale so the pivot entry (lowest index within 10% of the largest
/// magnitude) is 1; then clear small denominators so integer-valued vectors
/// come out as integers, and make the first nonzero entry positive.
pub fn normalize_eigvec(v: &[C64]) -> Vec<C64> {
    let big = norm_inf_vec(v);
    if big == 0.0 {
        return v.to_vec();
    }
    let p = v.iter().position(|z| z.norm() >= 0.9 * big).unwrap();
    let s = v[p];
    let mut w: Vec<C64> = v.iter().map(|z| z / s).collect();
    for z in w.iter_mut() {
        if z.re.abs() < 1e-13 {
            z.re = 0.0;
        }
        if z.im.abs() < 1e-13 {
            z.im = 0.0;
        }
    }
    if let Some(k) = (1..=64u32).find(|&k| {
        w.iter().all(|z| {
            let (a, b) = (z.re * k as f64, z.im * k as f64);
            (a - a.round()).abs() < 1e-9 && (b - b.round()).abs() < 1e-9 && a.abs() <= 64.0 && b.abs() <= 64.0
        })
    }) {
        w = w.iter().map(|z| C64::new((z.re * k as f64).round(), (z.im * k as f64).round())).collect();
    }
    if let Some(first) = w.iter().find(|z| z.norm() > 0.0) {
        if first.re < 0.0 || (first.re == 0.0 && first.im < 0.0) {
            w = w.iter().map(|z| -z).collect();
        }
    }
    w
}
