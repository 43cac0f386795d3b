use num_complex::Complex64 as C64;

use super::matrix::{inner, norm_inf_vec, CMatrix};
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Reduced row echelon form with the pivot columns it found.
#[derive(Debug, Clone)]
pub struct Rref {
    pub reduced: CMatrix,
    pub pivots: Vec<usize>,
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn check_finite(m: &CMatrix) -> Result<()> {
    if m.data().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::input("", "matrix has non-finite entries"));
    }
    Ok(())
}

/// Gauss-Jordan elimination, columns in ascending order, row partial pivoting.
/// A column becomes a pivot only when its best candidate exceeds
/// `tol * (1 + ||M||inf)`.
pub fn rref(m: &CMatrix, tol: f64) -> Rref {
    let thresh = tol * (1.0 + m.norm_inf());
    rref_abs(m, thresh, m.cols())
}

// eliminate only over the first `ncols` columns; later columns ride along
fn rref_abs(m: &CMatrix, thresh: f64, ncols: usize) -> Rref {
    let mut a = m.clone();
    let (rows, cols) = (a.rows(), a.cols());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows {
            break;
        }
        let mut best = r;
        let mut best_abs = a[(r, c)].norm();
        for i in r + 1..rows {
            let v = a[(i, c)].norm();
            if v > best_abs {
                best = i;
                best_abs = v;
            }
        }
        if best_abs <= thresh {
            // numerically zero below the current row
            for i in r..rows {
                a[(i, c)] = ZERO;
            }
            continue;
        }
        if best != r {
            for j in 0..cols {
                let t = a[(r, j)];
                a[(r, j)] = a[(best, j)];
                a[(best, j)] = t;
            }
        }
        let inv = C64::new(1.0, 0.0) / a[(r, c)];
        for j in 0..cols {
            a[(r, j)] *= inv;
        }
        a[(r, c)] = C64::new(1.0, 0.0);
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[(i, c)];
            if f == ZERO {
                continue;
            }
            for j in 0..cols {
                let v = a[(r, j)];
                a[(i, j)] -= f * v;
            }
            a[(i, c)] = ZERO;
        }
        pivots.push(c);
        r += 1;
    }
    Rref { reduced: a, pivots }
}

pub fn rank(m: &CMatrix, tol: f64) -> usize {
    rref(m, tol).rank()
}

/// Kernel basis read off the RREF: one vector per free column (ascending),
/// free entry 1, pivot entries back-substituted. Empty for full column rank.
pub fn nullspace(m: &CMatrix, tol: f64) -> Result<Vec<Vec<C64>>> {
    if tol <= 0.0 {
        return Err(Error::input("", "tolerance must be positive"));
    }
    check_finite(m)?;
    let rr = rref(m, tol);
    let n = m.cols();
    let mut basis = Vec::new();
    for f in 0..n {
        if rr.pivots.contains(&f) {
            continue;
        }
        let mut v = vec![ZERO; n];
        v[f] = C64::new(1.0, 0.0);
        for (i, &p) in rr.pivots.iter().enumerate() {
            v[p] = -rr.reduced[(i, f)];
        }
        basis.push(v);
    }
    Ok(basis)
}

/// Gram-Schmidt (twice) over the given vectors; drops near-dependent ones.
pub fn orthonormalize(vs: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    let mut q: Vec<Vec<C64>> = Vec::new();
    for v in vs {
        let scale = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if scale == 0.0 {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &q {
                let c = inner(u, &w);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > tol * scale {
            q.push(w.iter().map(|z| z / nrm).collect());
        }
    }
    q
}

/// Minimum-norm solution of `m x = b`, or `None` when the system is
/// inconsistent at the given tolerance.
pub fn solve_min_norm(m: &CMatrix, b: &[C64], tol: f64) -> Option<Vec<C64>> {
    let n = m.cols();
    let bcol = CMatrix::from_cols(m.rows(), &[b.to_vec()]);
    let aug = m.hstack(&bcol);
    let scale = 1.0 + m.norm_inf().max(norm_inf_vec(b));
    let rr = rref_abs(&aug, tol * scale, n);
    // consistency: rows below the rank must have a vanishing right side
    for i in rr.rank()..m.rows() {
        if rr.reduced[(i, n)].norm() > tol * scale {
            return None;
        }
    }
    let mut x = vec![ZERO; n];
    for (i, &p) in rr.pivots.iter().enumerate() {
        x[p] = rr.reduced[(i, n)];
    }
    let kernel = nullspace(m, tol).ok()?;
    for q in orthonormalize(&kernel, 1e-12) {
        let c = inner(&q, &x);
        for (xi, qi) in x.iter_mut().zip(&q) {
            *xi -= c * qi;
        }
    }
    let res = m.mul_vec(&x);
    let err = res.iter().zip(b).map(|(r, bi)| (r - bi).norm()).fold(0.0, f64::max);
    if err > 10.0 * tol * scale * (1.0 + norm_inf_vec(&x)) {
        return None;
    }
    Some(x)
}

/// Solve a square nonsingular system `a X = b` column by column.
pub fn solve_square(a: &CMatrix, b: &CMatrix, tol: f64) -> Option<CMatrix> {
    let n = a.rows();
    let aug = a.hstack(b);
    let rr = rref_abs(&aug, tol * (1.0 + a.norm_inf()), n);
    if rr.rank() < n {
        return None;
    }
    let mut x = CMatrix::zeros(n, b.cols());
    for i in 0..n {
        for j in 0..b.cols() {
            x[(i, j)] = rr.reduced[(i, n + j)];
        }
    }
    Some(x)
}

/// Columns of `m` that carry RREF pivots, as vectors.
pub fn column_basis(m: &CMatrix, tol: f64) -> Vec<Vec<C64>> {
    rref(m, tol).pivots.iter().map(|&c| m.col(c)).collect()
}

/// Basis of span(us) ∩ span(vs); both given as column vectors of length n.
pub fn intersect(n: usize, us: &[Vec<C64>], vs: &[Vec<C64>], tol: f64) -> Vec<Vec<C64>> {
    if us.is_empty() || vs.is_empty() {
        return Vec::new();
    }
    let u = CMatrix::from_cols(n, us);
    let v = CMatrix::from_cols(n, vs).scale(C64::new(-1.0, 0.0));
    let kern = nullspace(&u.hstack(&v), tol).unwrap_or_default();
    let p = us.len();
    let vecs: Vec<Vec<C64>> = kern.iter().map(|k| u.mul_vec(&k[..p])).collect();
    if vecs.is_empty() {
        return vecs;
    }
    column_basis(&CMatrix::from_cols(n, &vecs), tol)
}

/// Whether `v` lies in span(basis) within tolerance.
pub fn in_span(basis: &[Vec<C64>], v: &[C64], tol: f64) -> bool {
    let scale = norm_inf_vec(v);
    if scale == 0.0 {
        return true;
    }
    let q = orthonormalize(basis, 1e-12);
    let mut w = v.to_vec();
    for u in &q {
        let c = inner(u, &w);
        for (wi, ui) in w.iter_mut().zip(u) {
            *wi -= c * ui;
        }
    }
    norm_inf_vec(&w) <= tol * scale
}
