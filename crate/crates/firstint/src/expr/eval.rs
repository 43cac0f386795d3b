use num_complex::Complex64 as C64;

use super::{render, Expr, QuadratureDef};
use crate::error::{Error, Result};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const TINY: f64 = 1e-300;

/// A point (t, x). State entries are complex; real systems keep zero
/// imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub t: Vec<f64>,
    pub x: Vec<C64>,
}

impl Point {
    pub fn new(t: Vec<f64>, x: Vec<C64>) -> Point {
        Point { t, x }
    }
    pub fn real(t: &[f64], x: &[f64]) -> Point {
        Point { t: t.to_vec(), x: x.iter().map(|&v| C64::new(v, 0.0)).collect() }
    }
}

/// Accumulator values at the current point plus their definitions.
#[derive(Debug, Clone, Copy)]
pub struct QuadEnv<'a> {
    pub values: &'a [f64],
    pub defs: &'a [QuadratureDef],
}

fn is_int(h: C64) -> Option<i32> {
    if h.im == 0.0 && h.re.fract() == 0.0 && h.re.abs() <= 1e6 {
        Some(h.re as i32)
    } else {
        None
    }
}

fn pow_value(b: C64, h: C64, base: &Expr) -> Result<C64> {
    if b.norm() <= TINY && (h.re < 0.0 || is_int(h).is_none()) {
        return Err(Error::domain(render(base)));
    }
    Ok(match is_int(h) {
        Some(k) => b.powi(k),
        None if b.im == 0.0 && h.im == 0.0 && b.re < 0.0 => C64::new((-b.re).powf(h.re), 0.0),
        None => (h * b.ln()).exp(),
    })
}

/// Plain evaluation.
pub fn eval(e: &Expr, p: &Point, env: Option<QuadEnv>) -> Result<C64> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::T(j) => C64::new(*p.t.get(*j).ok_or_else(|| Error::input("", format!("t{} out of range", j + 1)))?, 0.0),
        Expr::X(i) => *p.x.get(*i).ok_or_else(|| Error::input("", format!("x{} out of range", i + 1)))?,
        Expr::Lin(v) => {
            if v.len() != p.x.len() {
                return Err(Error::input("", "linear form length differs from state dimension"));
            }
            v.iter().zip(&p.x).map(|(a, b)| a * b).sum()
        }
        Expr::Re(a) => C64::new(eval(a, p, env)?.re, 0.0),
        Expr::Im(a) => C64::new(eval(a, p, env)?.im, 0.0),
        Expr::Sum(v) => {
            let mut s = ZERO;
            for c in v {
                s += eval(c, p, env)?;
            }
            s
        }
        Expr::Prod(v) => {
            let mut s = ONE;
            for c in v {
                s *= eval(c, p, env)?;
            }
            s
        }
        Expr::Pow(b, h) => pow_value(eval(b, p, env)?, *h, b)?,
        Expr::Exp(a) => eval(a, p, env)?.exp(),
        Expr::Log(a) => {
            let v = eval(a, p, env)?;
            if v.norm() <= TINY {
                return Err(Error::domain(render(a)));
            }
            v.ln()
        }
        Expr::Abs(a) => C64::new(eval(a, p, env)?.norm(), 0.0),
        Expr::Atan2(a, b) => {
            let (y, x) = (eval(a, p, env)?.re, eval(b, p, env)?.re);
            if y.abs() <= TINY && x.abs() <= TINY {
                return Err(Error::domain(render(b)));
            }
            C64::new(y.atan2(x), 0.0)
        }
        Expr::Quad(id) => {
            let env = env.ok_or_else(|| Error::input("", format!("quad({id}) needs accumulator values")))?;
            C64::new(*env.values.get(*id).ok_or_else(|| Error::input("", format!("quad({id}) unbound")))?, 0.0)
        }
    })
}

/// Value and directional derivative along (dt, dx). Non-holomorphic nodes
/// (re, im, abs, atan2) assume a real curve.
pub fn eval_dual(e: &Expr, p: &Point, dt: &[f64], dx: &[C64], env: Option<QuadEnv>) -> Result<(C64, C64)> {
    Ok(match e {
        Expr::Const(c) => (*c, ZERO),
        Expr::T(j) => (eval(e, p, env)?, C64::new(dt[*j], 0.0)),
        Expr::X(i) => (eval(e, p, env)?, dx[*i]),
        Expr::Lin(v) => (eval(e, p, env)?, v.iter().zip(dx).map(|(a, b)| a * b).sum()),
        Expr::Re(a) => {
            let (v, d) = eval_dual(a, p, dt, dx, env)?;
            (C64::new(v.re, 0.0), C64::new(d.re, 0.0))
        }
        Expr::Im(a) => {
            let (v, d) = eval_dual(a, p, dt, dx, env)?;
            (C64::new(v.im, 0.0), C64::new(d.im, 0.0))
        }
        Expr::Sum(v) => {
            let (mut s, mut ds) = (ZERO, ZERO);
            for c in v {
                let (a, b) = eval_dual(c, p, dt, dx, env)?;
                s += a;
                ds += b;
            }
            (s, ds)
        }
        Expr::Prod(v) => {
            // (uv)' = u'v + uv', accumulated left to right
            let (mut s, mut ds) = (ONE, ZERO);
            for c in v {
                let (a, b) = eval_dual(c, p, dt, dx, env)?;
                ds = ds * a + s * b;
                s *= a;
            }
            (s, ds)
        }
        Expr::Pow(base, h) => {
            let (b, db) = eval_dual(base, p, dt, dx, env)?;
            let v = pow_value(b, *h, base)?;
            let d = match is_int(*h) {
                Some(0) => ZERO,
                Some(k) => b.powi(k - 1) * db * k as f64,
                // |b|^h on the negative axis and the principal branch share h v / b
                None => *h * v / b * db,
            };
            (v, d)
        }
        Expr::Exp(a) => {
            let (v, d) = eval_dual(a, p, dt, dx, env)?;
            let ev = v.exp();
            (ev, ev * d)
        }
        Expr::Log(a) => {
            let (v, d) = eval_dual(a, p, dt, dx, env)?;
            if v.norm() <= TINY {
                return Err(Error::domain(render(a)));
            }
            (v.ln(), d / v)
        }
        Expr::Abs(a) => {
            let (v, d) = eval_dual(a, p, dt, dx, env)?;
            let r = v.norm();
            if r <= TINY {
                return Err(Error::domain(render(a)));
            }
            (C64::new(r, 0.0), C64::new((v.conj() * d).re / r, 0.0))
        }
        Expr::Atan2(a, b) => {
            let (y, dy) = eval_dual(a, p, dt, dx, env)?;
            let (x, dxx) = eval_dual(b, p, dt, dx, env)?;
            let (y, x) = (y.re, x.re);
            let r2 = x * x + y * y;
            if r2 <= TINY {
                return Err(Error::domain(render(b)));
            }
            (C64::new(y.atan2(x), 0.0), C64::new((x * dy.re - y * dxx.re) / r2, 0.0))
        }
        Expr::Quad(id) => {
            let v = eval(e, p, env)?;
            let env = env.unwrap();
            let def = env.defs.get(*id).ok_or_else(|| Error::input("", format!("quad({id}) has no definition")))?;
            (v, C64::new(def.rate(&p.t, dt)?, 0.0))
        }
    })
}
