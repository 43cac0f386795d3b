//! Seeded property checks, 100 cases each. Every function returns the first
//! failure as a message so the acceptance harness can report it.
#![allow(dead_code)]

use firstint::builder::{psi_functions, FirstIntegral};
use firstint::expr::{eval, eval_dual, implied_guards, parse, render, Expr, Point};
use firstint::linalg::{eigen_structure, nullspace, rank, CMatrix, C64};
use firstint::system::{Kind, SystemSpec};
use firstint::verify::{guard_ok, integrate_trajectory, lie_residual_check};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub const CASES: u32 = 100;

pub fn runner(salt: u8) -> TestRunner {
    let mut seed = [7u8; 32];
    seed[0] = salt;
    let cfg = Config { cases: CASES, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(cfg, TestRng::from_seed(RngAlgorithm::ChaCha, &seed))
}

fn c(v: f64) -> C64 {
    C64::new(v, 0.0)
}

fn mat(rows: &[Vec<f64>]) -> CMatrix {
    CMatrix::from_real(rows)
}

fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let k = b.len();
    let m = b[0].len();
    (0..n).map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

/// integer matrix U J U⁻¹ with a prescribed Jordan form; U is a product of
/// elementary row additions so both U and U⁻¹ are exact
fn jordan_strategy() -> impl Strategy<Value = (Vec<Vec<f64>>, Vec<(i32, usize)>)> {
    (vec((-2i32..=2, 1usize..=3), 1..=3), vec((0usize..5, 0usize..5, prop_oneof![Just(-1.0), Just(1.0)]), 0..6)).prop_map(
        |(blocks, ops)| {
            let n: usize = blocks.iter().map(|b| b.1).sum();
            let mut j = vec![vec![0.0; n]; n];
            let mut at = 0;
            for &(l, s) in &blocks {
                for k in 0..s {
                    j[at + k][at + k] = l as f64;
                    if k + 1 < s {
                        j[at + k][at + k + 1] = 1.0;
                    }
                }
                at += s;
            }
            let mut u: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|k| (i == k) as u8 as f64).collect()).collect();
            let mut ui = u.clone();
            for &(a, b, f) in &ops {
                let (a, b) = (a % n, b % n);
                if a == b {
                    continue;
                }
                // u ← E u with E = I + f e_a e_bᵀ; ui ← ui E⁻¹
                for col in 0..n {
                    u[a][col] += f * u[b][col];
                }
                for row in 0..n {
                    ui[row][b] -= f * ui[row][a];
                }
            }
            (matmul(&matmul(&u, &j), &ui), blocks)
        },
    )
}

/// (B − λ)ν^k = k ν^{k−1} for every chain, and divisor degrees match the
/// prescribed Jordan blocks
pub fn chain_identity() -> Result<(), String> {
    runner(1)
        .run(&jordan_strategy(), |(b, blocks)| {
            let bm = mat(&b);
            let es = eigen_structure(&bm, 1e-9).map_err(|e| TestCaseError::fail(e.to_string()))?;
            for (ev, chains) in es.eigenvalues.iter().zip(&es.chains) {
                let lam = ev.value;
                let mut want: Vec<usize> = blocks.iter().filter(|bl| (bl.0 as f64 - lam.re).abs() < 1e-6).map(|bl| bl.1).collect();
                want.sort_unstable_by(|a, b| b.cmp(a));
                prop_assert_eq!(&ev.divisor_degrees, &want, "divisors of {} in {:?}", lam, b);
                for ch in chains {
                    for k in 1..ch.len() {
                        let lhs = bm.shift(lam).mul_vec(&ch[k]);
                        let scale = 1.0 + ch[k].iter().chain(&ch[k - 1]).map(|z| z.norm()).fold(0.0, f64::max);
                        let err = lhs.iter().zip(&ch[k - 1]).map(|(a, v)| (a - v * k as f64).norm()).fold(0.0, f64::max);
                        prop_assert!(err <= 1e-8 * scale * (1.0 + bm.norm_inf()), "chain residual {err:e}");
                    }
                }
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// ν^θx = Σ_{δ=1}^{θ} C(θ−1, δ−1) v_δ ν^{θ−δ}x
pub fn psi_reconstruction() -> Result<(), String> {
    let strat = (2usize..=5, 2usize..=5).prop_flat_map(|(n, s)| (vec(vec(-3i32..=3, n), s), vec(-2.0f64..2.0, n)));
    runner(2)
        .run(&strat, |(vs, x)| {
            let vs: Vec<Vec<C64>> = vs.iter().map(|v| v.iter().map(|&a| c(a as f64)).collect()).collect();
            let dot = |v: &[C64]| v.iter().zip(&x).map(|(a, b)| a * b).sum::<C64>();
            prop_assume!(dot(&vs[0]).norm() > 0.5);
            let p = Point::real(&[0.0], &x);
            let v = psi_functions(&vs);
            let vals: Vec<C64> = v.iter().map(|e| eval(e, &p, None).unwrap()).collect();
            let binom = |n: usize, k: usize| (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64);
            for th in 1..vs.len() {
                let rhs: C64 = (1..=th).map(|d| vals[d - 1] * dot(&vs[th - d]) * binom(th - 1, d - 1)).sum();
                let lhs = dot(&vs[th]);
                prop_assert!((lhs - rhs).norm() <= 1e-9 * (1.0 + lhs.norm() + rhs.norm()), "θ={th}: {lhs} vs {rhs}");
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// random expressions over x1..x3 and t1
pub fn expr_strategy() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(Expr::X),
        Just(Expr::T(0)),
        (-3i32..=3).prop_map(|k| Expr::real(k as f64)),
        vec(-2i32..=2, 3).prop_map(|v| Expr::lin(v.into_iter().map(|a| c(a as f64)).collect())),
    ];
    leaf.prop_recursive(3, 24, 3, |inner| {
        prop_oneof![
            vec(inner.clone(), 2..=3).prop_map(Expr::sum),
            vec(inner.clone(), 2..=3).prop_map(Expr::prod),
            inner.clone().prop_map(|e| Expr::exp(e.scaled(c(0.3)))),
            (inner.clone(), prop_oneof![Just(-1.0), Just(2.0), Just(3.0), Just(0.5)]).prop_map(|(e, h)| Expr::pow(e, c(h))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::atan2(a, b)),
        ]
    })
}

fn well_inside(e: &Expr, p: &Point) -> bool {
    implied_guards(e).iter().all(|g| guard_ok(g, p, None, 0.2))
}

/// forward-mode derivative matches a central difference
pub fn dual_vs_fd() -> Result<(), String> {
    let strat = (expr_strategy(), vec(-1.5f64..1.5, 4), vec(-1.0f64..1.0, 4));
    runner(3)
        .run(&strat, |(e, at, dir)| {
            let p = Point::real(&at[..1], &at[1..]);
            prop_assume!(well_inside(&e, &p));
            let Ok(f) = eval(&e, &p, None) else { return Err(TestCaseError::reject("outside domain")) };
            prop_assume!(f.norm() < 1e6);
            let dx: Vec<C64> = dir[1..].iter().map(|&v| c(v)).collect();
            let (_, d) = eval_dual(&e, &p, &dir[..1], &dx, None).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let h = 1e-5;
            let shift = |s: f64| {
                let t: Vec<f64> = vec![at[0] + s * dir[0]];
                let x: Vec<f64> = (0..3).map(|i| at[i + 1] + s * dir[i + 1]).collect();
                eval(&e, &Point::real(&t, &x), None)
            };
            let (Ok(a), Ok(b)) = (shift(h), shift(-h)) else { return Err(TestCaseError::reject("step leaves domain")) };
            let fd = (a - b) / (2.0 * h);
            let scale = 1.0f64.max(d.norm()).max(f.norm());
            prop_assert!((fd - d).norm() <= 1e-6 * scale, "{}: dual {d} vs fd {fd}", render(&e));
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// error ratio between steps h and h/2 shows order four
pub fn rk4_order() -> Result<(), String> {
    let strat = (2usize..=4).prop_flat_map(|n| (vec(vec(-1.0f64..1.0, n), n), vec(-1.0f64..1.0, n)));
    runner(4)
        .run(&strat, |(a, x0)| {
            let spec = SystemSpec::new(Kind::Ode, vec![mat(&a)], None).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let x0: Vec<C64> = x0.iter().map(|&v| c(v)).collect();
            let path = [vec![0.0], vec![1.0]];
            let end = |h: f64| integrate_trajectory(&spec, &x0, &path, h, &[]).unwrap().xs.last().unwrap().clone();
            let reference = end(0.2 / 256.0);
            let err = |h: f64| end(h).iter().zip(&reference).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let (e1, e2) = (err(0.2), err(0.1));
            prop_assume!(e1 > 1e-11);
            let order = (e1 / e2).log2();
            prop_assert!((3.5..=4.5).contains(&order), "observed order {order} (errors {e1:e}, {e2:e})");
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// nullspace vectors are annihilated and count to columns − rank
pub fn nullspace_membership() -> Result<(), String> {
    let strat = (1usize..=5, 1usize..=5, 1usize..=4)
        .prop_flat_map(|(r, cdim, k)| (vec(vec(-3i32..=3, k), r), vec(vec(-3i32..=3, cdim), k)));
    runner(5)
        .run(&strat, |(l, rt)| {
            let l: Vec<Vec<f64>> = l.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let rt: Vec<Vec<f64>> = rt.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let m = mat(&matmul(&l, &rt));
            let ns = nullspace(&m, 1e-9).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert_eq!(ns.len(), m.cols() - rank(&m, 1e-9));
            for v in &ns {
                let r = m.mul_vec(v).iter().map(|z| z.norm()).fold(0.0, f64::max);
                let vn = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
                prop_assert!(r <= 1e-9 * (1.0 + m.norm_inf()) * vn, "residual {r:e}");
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// render ∘ parse is the identity on rendered text and preserves values
pub fn render_parse_roundtrip() -> Result<(), String> {
    runner(6)
        .run(&(expr_strategy(), vec(-1.5f64..1.5, 4)), |(e, at)| {
            let s = render(&e);
            let back = parse(&s).map_err(|err| TestCaseError::fail(format!("{s}: {err}")))?;
            prop_assert_eq!(render(&back), s.clone());
            let p = Point::real(&at[..1], &at[1..]);
            match (eval(&e, &p, None), eval(&back, &p, None)) {
                (Ok(a), Ok(b)) => prop_assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "{s}: {a} vs {b}"),
                (Err(_), Err(_)) => {}
                (a, b) => prop_assert!(false, "{s}: {a:?} vs {b:?}"),
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// functions that are not integrals show a large Lie residual
pub fn negative_controls() -> Result<(), String> {
    let strat = (2usize..=4).prop_flat_map(|n| (vec(vec(-3i32..=3, n), n), vec(-3i32..=3, n), any::<bool>(), any::<u64>()));
    runner(7)
        .run(&strat, |(a, cv, squared, seed)| {
            let a: Vec<Vec<f64>> = a.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
            let spec = SystemSpec::new(Kind::Ode, vec![mat(&a)], None).map_err(|e| TestCaseError::fail(e.to_string()))?;
            let cv: Vec<C64> = cv.iter().map(|&v| c(v as f64)).collect();
            // the Lie derivative of c·x is (Bc)·x with B = Aᵀ
            let bc = spec.operator_matrices()[0].mul_vec(&cv);
            prop_assume!(bc.iter().map(|z| z.norm()).sum::<f64>() >= 1.0);
            let e = if squared {
                Expr::sum(vec![Expr::pow(Expr::lin(cv.clone()), c(2.0)), Expr::T(0)])
            } else {
                Expr::lin(cv.clone())
            };
            let f = FirstIntegral::supplied(e);
            let r = lie_residual_check(&f, &spec, 200, seed).map_err(|e| TestCaseError::fail(e.to_string()))?;
            prop_assert!(r.max_residual > 1e-2, "residual {:e} for {}", r.max_residual, f.render());
            Ok(())
        })
        .map_err(|e| e.to_string())
}

pub const ALL: &[(&str, fn() -> Result<(), String>)] = &[
    ("chain identity", chain_identity),
    ("chain function reconstruction", psi_reconstruction),
    ("dual number vs finite difference", dual_vs_fd),
    ("rk4 order four", rk4_order),
    ("nullspace membership", nullspace_membership),
    ("render/parse round trip", render_parse_roundtrip),
    ("negative controls", negative_controls),
];
