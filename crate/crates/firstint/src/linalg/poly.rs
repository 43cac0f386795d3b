//! Characteristic polynomials and their roots.

use num_complex::Complex64 as C64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

pub const MAX_SWEEPS: usize = 500;

/// Coefficients of det(λE - B), lowest degree first, monic.
/// Faddeev-LeVerrier recursion.
pub fn char_poly(b: &CMatrix) -> Vec<C64> {
    let n = b.rows();
    let mut c = vec![C64::new(0.0, 0.0); n + 1];
    c[n] = C64::new(1.0, 0.0);
    let id = CMatrix::identity(n);
    let mut m = CMatrix::zeros(n, n);
    for k in 1..=n {
        m = b.mul(&m).add(&id.scale(c[n - k + 1]));
        c[n - k] = -b.mul(&m).trace() / k as f64;
    }
    c
}

pub fn eval(c: &[C64], z: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub fn derivative(c: &[C64]) -> Vec<C64> {
    c.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect()
}

/// rounding-level size of p(z): Σ |c_k| |z|^k
fn magnitude(c: &[C64], z: C64) -> f64 {
    let r = z.norm();
    c.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
}

/// All roots by simultaneous Aberth-Ehrlich iteration followed by a guarded
/// Newton polish. `c` lowest degree first with a nonzero leading coefficient.
pub fn roots(c: &[C64]) -> Result<Vec<C64>> {
    let n = c.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    if n == 1 {
        return Ok(vec![-c[0] / lead]);
    }
    let dc = derivative(c);
    let center = -c[n - 1] / (lead * n as f64);
    // Cauchy-style radius bound around the centroid
    let radius = 1.0 + c[..n].iter().map(|a| (a / lead).norm()).fold(0.0, f64::max);
    let mut z: Vec<C64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / n as f64 + 0.4;
            center + C64::from_polar(radius * 0.5 + 0.1, th)
        })
        .collect();

    let eps = f64::EPSILON;
    let mut converged = vec![false; n];
    for _ in 0..MAX_SWEEPS {
        let mut all = true;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let p = eval(c, z[k]);
            if p.norm() <= 4.0 * eps * magnitude(c, z[k]) {
                converged[k] = true;
                continue;
            }
            all = false;
            let w = p / eval(&dc, z[k]);
            let s: C64 = (0..n).filter(|&j| j != k).map(|j| C64::new(1.0, 0.0) / (z[k] - z[j])).sum();
            let step = w / (C64::new(1.0, 0.0) - w * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[k] -= step;
                if step.norm() <= eps * (1.0 + z[k].norm()) {
                    converged[k] = true;
                }
            }
        }
        if all {
            break;
        }
    }
    if converged.iter().any(|&ok| !ok) {
        let residuals = z.iter().map(|&r| eval(c, r).norm()).collect();
        return Err(Error::Numerical {
            msg: format!("root iteration did not converge in {MAX_SWEEPS} sweeps"),
            residuals,
        });
    }
    for r in z.iter_mut() {
        polish(c, &dc, r);
    }
    Ok(z)
}

/// Newton steps accepted only while |p| decreases.
pub fn polish(c: &[C64], dc: &[C64], z: &mut C64) {
    let mut pz = eval(c, *z).norm();
    for _ in 0..8 {
        let d = eval(dc, *z);
        if d.norm() == 0.0 {
            return;
        }
        let cand = *z - eval(c, *z) / d;
        let pc = eval(c, cand).norm();
        if !(pc < pz) {
            return;
        }
        *z = cand;
        pz = pc;
    }
}
