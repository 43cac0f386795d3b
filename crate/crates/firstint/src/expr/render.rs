use num_complex::Complex64 as C64;

use super::Expr;

fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    if (1e-5..1e15).contains(&a) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// `re` for real constants, `(re,im)` otherwise.
pub fn fmt_c64(z: C64) -> String {
    if z.im == 0.0 {
        fmt_f64(z.re)
    } else {
        format!("({},{})", fmt_f64(z.re), fmt_f64(z.im))
    }
}

/// Deterministic text in the expression grammar; parse(render(e)) == e for
/// trees built through the canonical constructors.
pub fn render(e: &Expr) -> String {
    match e {
        Expr::Const(c) => fmt_c64(*c),
        Expr::T(j) => format!("t{}", j + 1),
        Expr::X(i) => format!("x{}", i + 1),
        Expr::Lin(v) => format!("lin([{}])", v.iter().map(|z| fmt_c64(*z)).collect::<Vec<_>>().join(",")),
        Expr::Re(a) => format!("re({})", render(a)),
        Expr::Im(a) => format!("im({})", render(a)),
        Expr::Sum(v) => v.iter().map(render).collect::<Vec<_>>().join("+"),
        Expr::Prod(v) => v
            .iter()
            .map(|c| match c {
                Expr::Sum(_) => format!("({})", render(c)),
                _ => render(c),
            })
            .collect::<Vec<_>>()
            .join("*"),
        Expr::Pow(b, h) => format!("pow({},{})", render(b), fmt_c64(*h)),
        Expr::Exp(a) => format!("exp({})", render(a)),
        Expr::Log(a) => format!("log({})", render(a)),
        Expr::Abs(a) => format!("abs({})", render(a)),
        Expr::Atan2(a, b) => format!("atan2({},{})", render(a), render(b)),
        Expr::Quad(id) => format!("quad({id})"),
    }
}
