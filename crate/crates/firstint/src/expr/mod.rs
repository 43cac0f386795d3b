//! Expression trees over time variables t_j and state variables x_i.
//!
//! Variables are 0-based internally and render 1-based (`t1`, `x1`).

mod eval;
mod parse;
mod render;

use num_complex::Complex64 as C64;
use serde::Serialize;

pub use eval::{eval, eval_dual, Point, QuadEnv};
pub use parse::parse;
pub use render::{fmt_c64, render};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(C64),
    T(usize),
    X(usize),
    /// ν·x
    Lin(Vec<C64>),
    Re(Box<Expr>),
    Im(Box<Expr>),
    Sum(Vec<Expr>),
    Prod(Vec<Expr>),
    Pow(Box<Expr>, C64),
    Exp(Box<Expr>),
    Log(Box<Expr>),
    Abs(Box<Expr>),
    /// two-argument arctangent of num/den, range (-π, π]
    Atan2(Box<Expr>, Box<Expr>),
    /// value of a co-integrated accumulator
    Quad(usize),
}

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

impl Expr {
    pub fn cnst(c: C64) -> Expr {
        Expr::Const(c)
    }
    pub fn real(v: f64) -> Expr {
        Expr::Const(C64::new(v, 0.0))
    }
    pub fn lin(v: Vec<C64>) -> Expr {
        Expr::Lin(v)
    }

    pub fn sum(items: Vec<Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut k = ZERO;
        for e in items {
            match e {
                Expr::Sum(inner) => {
                    for i in inner {
                        match i {
                            Expr::Const(c) => k += c,
                            other => flat.push(other),
                        }
                    }
                }
                Expr::Const(c) => k += c,
                other => flat.push(other),
            }
        }
        if k != ZERO {
            flat.push(Expr::Const(k));
        }
        match flat.len() {
            0 => Expr::Const(ZERO),
            1 => flat.pop().unwrap(),
            _ => Expr::Sum(canonical(flat)),
        }
    }

    pub fn prod(items: Vec<Expr>) -> Expr {
        let mut flat = Vec::new();
        let mut k = ONE;
        for e in items {
            match e {
                Expr::Prod(inner) => {
                    for i in inner {
                        match i {
                            Expr::Const(c) => k *= c,
                            other => flat.push(other),
                        }
                    }
                }
                Expr::Const(c) => k *= c,
                other => flat.push(other),
            }
        }
        if k == ZERO {
            return Expr::Const(ZERO);
        }
        if k != ONE {
            flat.push(Expr::Const(k));
        }
        match flat.len() {
            0 => Expr::Const(k),
            1 => flat.pop().unwrap(),
            _ => Expr::Prod(canonical(flat)),
        }
    }

    pub fn scaled(self, c: C64) -> Expr {
        Expr::prod(vec![Expr::Const(c), self])
    }

    pub fn neg(self) -> Expr {
        self.scaled(C64::new(-1.0, 0.0))
    }

    pub fn pow(base: Expr, h: C64) -> Expr {
        if h == ONE {
            return base;
        }
        if h == ZERO {
            return Expr::Const(ONE);
        }
        match base {
            Expr::Const(c) if h.im == 0.0 && h.re.fract() == 0.0 => Expr::Const(c.powi(h.re as i32)),
            b => Expr::Pow(Box::new(b), h),
        }
    }

    pub fn recip(base: Expr) -> Expr {
        Expr::pow(base, C64::new(-1.0, 0.0))
    }

    pub fn exp(e: Expr) -> Expr {
        match e {
            Expr::Const(c) if c == ZERO => Expr::Const(ONE),
            e => Expr::Exp(Box::new(e)),
        }
    }

    pub fn log(e: Expr) -> Expr {
        Expr::Log(Box::new(e))
    }
    pub fn abs(e: Expr) -> Expr {
        Expr::Abs(Box::new(e))
    }
    pub fn re(e: Expr) -> Expr {
        Expr::Re(Box::new(e))
    }
    pub fn im(e: Expr) -> Expr {
        Expr::Im(Box::new(e))
    }
    pub fn atan2(num: Expr, den: Expr) -> Expr {
        Expr::Atan2(Box::new(num), Box::new(den))
    }

    /// Σ c_j t_j
    pub fn lin_t(coeffs: &[C64]) -> Expr {
        Expr::sum(coeffs.iter().enumerate().filter(|(_, c)| **c != ZERO).map(|(j, &c)| Expr::T(j).scaled(c)).collect())
    }

    pub fn contains_quad(&self) -> bool {
        self.any(&|e| matches!(e, Expr::Quad(_)))
    }

    pub fn contains_t(&self) -> bool {
        self.any(&|e| matches!(e, Expr::T(_)))
    }

    pub fn contains_x(&self) -> bool {
        self.any(&|e| matches!(e, Expr::X(_) | Expr::Lin(_)))
    }

    pub fn any(&self, f: &dyn Fn(&Expr) -> bool) -> bool {
        if f(self) {
            return true;
        }
        match self {
            Expr::Re(a) | Expr::Im(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Abs(a) | Expr::Pow(a, _) => a.any(f),
            Expr::Sum(v) | Expr::Prod(v) => v.iter().any(|e| e.any(f)),
            Expr::Atan2(a, b) => a.any(f) || b.any(f),
            _ => false,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            Expr::Re(a) | Expr::Im(a) | Expr::Exp(a) | Expr::Log(a) | Expr::Abs(a) | Expr::Pow(a, _) => a.node_count(),
            Expr::Sum(v) | Expr::Prod(v) => v.iter().map(|e| e.node_count()).sum(),
            Expr::Atan2(a, b) => a.node_count() + b.node_count(),
            _ => 0,
        }
    }
}

// sums and products keep children in lexicographic order of their rendering
fn canonical(mut v: Vec<Expr>) -> Vec<Expr> {
    let mut keyed: Vec<(String, Expr)> = v.drain(..).map(|e| (render(&e), e)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.into_iter().map(|(_, e)| e).collect()
}

/// How a registered form restricts the domain of an integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GuardKind {
    /// real form whose sign must not change (denominators, atan2 arguments)
    Sign,
    /// complex form that must stay away from zero
    NonZero,
    /// complex base of a non-integer power: must not cross the negative real axis
    Branch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guard {
    pub expr: Expr,
    pub kind: GuardKind,
    /// typical magnitude; the sampling margin is relative to it
    pub scale: f64,
}

impl Guard {
    pub fn new(expr: Expr, kind: GuardKind) -> Guard {
        let scale = match &expr {
            Expr::Lin(v) => v.iter().map(|z| z.norm()).sum::<f64>().max(1e-300),
            _ => 1.0,
        };
        Guard { expr, kind, scale }
    }
}

/// Excluded sets implied by the shape of an expression: bases of negative
/// or fractional powers, logarithm arguments and both atan2 arguments.
pub fn implied_guards(e: &Expr) -> Vec<Guard> {
    fn walk(e: &Expr, out: &mut Vec<Guard>) {
        match e {
            Expr::Pow(b, h) => {
                if h.im != 0.0 || h.re.fract() != 0.0 {
                    out.push(Guard::new((**b).clone(), GuardKind::Branch));
                } else if h.re < 0.0 {
                    out.push(Guard::new((**b).clone(), GuardKind::NonZero));
                }
                walk(b, out);
            }
            Expr::Log(b) => {
                out.push(Guard::new((**b).clone(), GuardKind::Branch));
                walk(b, out);
            }
            Expr::Atan2(a, b) => {
                out.push(Guard::new((**a).clone(), GuardKind::Sign));
                out.push(Guard::new((**b).clone(), GuardKind::Sign));
                walk(a, out);
                walk(b, out);
            }
            Expr::Re(a) | Expr::Im(a) | Expr::Exp(a) | Expr::Abs(a) => walk(a, out),
            Expr::Sum(v) | Expr::Prod(v) => v.iter().for_each(|c| walk(c, out)),
            _ => {}
        }
    }
    let mut out = Vec::new();
    walk(e, &mut out);
    let mut seen = Vec::new();
    out.retain(|g| {
        let key = (render(&g.expr), g.kind);
        if seen.contains(&key) {
            false
        } else {
            seen.push(key);
            true
        }
    });
    out
}

/// Accumulator Q with ∂Q/∂t_j = Re(integrands[j](t)), Q(anchor) = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureDef {
    pub integrands: Vec<Expr>,
}

impl QuadratureDef {
    /// right-hand side along direction u at time t
    pub fn rate(&self, t: &[f64], u: &[f64]) -> crate::Result<f64> {
        let p = Point::new(t.to_vec(), Vec::new());
        let mut s = 0.0;
        for (j, w) in self.integrands.iter().enumerate() {
            if u[j] != 0.0 {
                s += u[j] * eval(w, &p, None)?.re;
            }
        }
        Ok(s)
    }
}

/// Accumulator values at time t, integrated by RK4 along the straight segment
/// from the anchor 0.
pub fn quad_values(defs: &[QuadratureDef], t: &[f64], step: f64) -> crate::Result<Vec<f64>> {
    let len = t.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut q = vec![0.0; defs.len()];
    if defs.is_empty() || len == 0.0 {
        return Ok(q);
    }
    let steps = (len / step).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let at = |s: f64| -> Vec<f64> { t.iter().map(|v| v * s).collect() };
    for k in 0..steps {
        let s0 = k as f64 * h;
        for (qi, d) in q.iter_mut().zip(defs) {
            // rates depend on t only, so RK4 reduces to Simpson's rule
            let a = d.rate(&at(s0), t)?;
            let b = d.rate(&at(s0 + 0.5 * h), t)?;
            let c = d.rate(&at(s0 + h), t)?;
            *qi += h / 6.0 * (a + 4.0 * b + c);
        }
    }
    Ok(q)
}

/// Derivative of `e` along real time coordinate `r` by virtue of the system:
/// ∂_{t_r} e + (G_r x + f_r(t))·∇ₓ e.
pub fn lie_derivative(e: &Expr, spec: &crate::system::SystemSpec, r: usize, p: &Point, env: Option<QuadEnv>) -> crate::Result<C64> {
    let g = spec.real_direction_matrix(r);
    lie_derivative_with(e, spec, &g, r, p, env)
}

/// As [`lie_derivative`] with the direction's field matrix supplied.
pub fn lie_derivative_with(
    e: &Expr,
    spec: &crate::system::SystemSpec,
    g: &crate::linalg::CMatrix,
    r: usize,
    p: &Point,
    env: Option<QuadEnv>,
) -> crate::Result<C64> {
    let mut dt = vec![0.0; spec.time_dims()];
    dt[r] = 1.0;
    let mut dx = g.mul_vec(&p.x);
    if spec.kind != crate::system::Kind::Rlinear && spec.has_forcing() {
        for (a, b) in dx.iter_mut().zip(spec.forcing_at(r, &p.t)?) {
            *a += b;
        }
    }
    Ok(eval_dual(e, p, &dt, &dx, env)?.1)
}
