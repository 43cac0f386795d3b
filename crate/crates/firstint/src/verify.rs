//! Numerical verification of first integrals: Lie residuals at sampled
//! points, constancy along RK4 trajectories, functional independence and
//! path independence of total systems.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::builder::FirstIntegral;
use crate::error::{Error, Result};
use crate::expr::{eval, eval_dual, lie_derivative_with, Expr, quad_values, Guard, GuardKind, Point, QuadEnv, QuadratureDef};
use crate::linalg::{rank, CMatrix};
use crate::system::{Kind, SolvabilityVerdict, SystemSpec};

/// quadrature step used when a single point needs accumulator values
pub const POINT_QUAD_STEP: f64 = 1e-2;
const OVERFLOW: f64 = 1e12;

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub lie_tol: f64,
    pub drift_tol: f64,
    pub samples: usize,
    pub trajectories: usize,
    pub step: f64,
    pub span: f64,
    pub seed: u64,
    /// half-width of the sampling box
    pub half_width: f64,
    /// guard margin relative to each form's scale
    pub margin: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            lie_tol: 1e-8,
            drift_tol: 1e-6,
            samples: 200,
            trajectories: 20,
            step: 1e-3,
            span: 1.0,
            seed: 0,
            half_width: 2.0,
            margin: 1e-3,
        }
    }
}

/// deterministic stream for (seed, purpose, index)
pub fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Number of worker threads from FIRSTINT_THREADS; 0 or unset means auto.
pub fn thread_count() -> usize {
    std::env::var("FIRSTINT_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

fn pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(thread_count()).build().expect("thread pool")
}

/// Uniform point in the box: t real, x real for real systems, complex
/// otherwise, and γ = (w, w̄) for R-linear systems.
pub fn sample_point(spec: &SystemSpec, rng: &mut ChaCha8Rng, half_width: f64) -> Point {
    let mut u = || rng.gen_range(-half_width..half_width);
    let t: Vec<f64> = (0..spec.time_dims()).map(|_| u()).collect();
    let x: Vec<C64> = match spec.kind {
        Kind::Rlinear => {
            let w: Vec<C64> = (0..spec.n).map(|_| C64::new(u(), u())).collect();
            w.iter().copied().chain(w.iter().map(|z| z.conj())).collect()
        }
        _ if spec.is_real() => (0..spec.dim()).map(|_| C64::new(u(), 0.0)).collect(),
        _ => (0..spec.dim()).map(|_| C64::new(u(), u())).collect(),
    };
    Point::new(t, x)
}

/// guard satisfied with the sampling margin
pub fn guard_ok(g: &Guard, p: &Point, env: Option<QuadEnv>, margin: f64) -> bool {
    let v = match eval(&g.expr, p, env) {
        Ok(v) => v,
        Err(_) => return false,
    };
    let m = margin * g.scale;
    match g.kind {
        GuardKind::Sign => v.re.abs() > m,
        GuardKind::NonZero => v.norm() > m,
        GuardKind::Branch => v.norm() > m && (v.re > 0.0 || v.im.abs() > m),
    }
}

/// F is defined, finite and away from its excluded sets at p
pub fn is_safe(f: &FirstIntegral, p: &Point, quads: &[f64], margin: f64) -> bool {
    let env = f.env(quads);
    if !f.guards.iter().all(|g| guard_ok(g, p, env, margin)) {
        return false;
    }
    match eval(&f.expr, p, env) {
        Ok(v) => v.re.is_finite() && v.im.is_finite() && v.norm() < 1e100,
        Err(_) => false,
    }
}

/// Rejection-sample a point safe for every integral in `fs`.
pub fn safe_point(
    fs: &[&FirstIntegral],
    spec: &SystemSpec,
    rng: &mut ChaCha8Rng,
    cfg: &VerifyConfig,
    tries: usize,
) -> Option<(Point, Vec<Vec<f64>>)> {
    for _ in 0..tries {
        let p = sample_point(spec, rng, cfg.half_width);
        let mut qs = Vec::new();
        let mut ok = true;
        for f in fs {
            let q = match quad_values(&f.quads, &p.t, POINT_QUAD_STEP) {
                Ok(q) => q,
                Err(_) => {
                    ok = false;
                    break;
                }
            };
            if !is_safe(f, &p, &q, cfg.margin) {
                ok = false;
                break;
            }
            qs.push(q);
        }
        if ok {
            return Some((p, qs));
        }
    }
    None
}

#[derive(Debug, Clone, Serialize)]
pub struct LieResidual {
    pub max_residual: f64,
    pub samples_used: usize,
}

/// max over safe samples and real time directions of |L_r F| / (1 + |F|)
pub fn lie_residual_check(f: &FirstIntegral, spec: &SystemSpec, n_samples: usize, seed: u64) -> Result<LieResidual> {
    let cfg = VerifyConfig { seed, ..VerifyConfig::default() };
    lie_residual_with(f, spec, n_samples, &cfg, 0)
}

fn lie_residual_with(f: &FirstIntegral, spec: &SystemSpec, n_samples: usize, cfg: &VerifyConfig, salt: u64) -> Result<LieResidual> {
    let mats = spec.real_direction_matrices();
    let mut rng = rng_for(cfg.seed, 0x11e ^ salt);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    let mut tries = 0;
    while used < n_samples {
        tries += 1;
        if tries > 100 * n_samples.max(1) {
            return Err(Error::precondition(format!("domain too thin: {used} safe points after {} tries", tries - 1)));
        }
        let p = sample_point(spec, &mut rng, cfg.half_width);
        let q = quad_values(&f.quads, &p.t, POINT_QUAD_STEP)?;
        if !is_safe(f, &p, &q, cfg.margin) {
            continue;
        }
        let env = f.env(&q);
        let v = eval(&f.expr, &p, env)?;
        for (r, g) in mats.iter().enumerate() {
            let d = lie_derivative_with(&f.expr, spec, g, r, &p, env)?;
            worst = worst.max(d.norm() / (1.0 + v.norm()));
        }
        used += 1;
    }
    Ok(LieResidual { max_residual: worst, samples_used: used })
}

#[derive(Debug, Clone)]
pub struct TrajectorySample {
    /// time point of every step, start included
    pub ts: Vec<Vec<f64>>,
    pub xs: Vec<Vec<C64>>,
    /// accumulator values per step, one entry per definition passed in
    pub quads: Vec<Vec<f64>>,
    pub events: Vec<String>,
}

/// Classical RK4 along a polyline in time, accumulators in lockstep.
pub fn integrate_trajectory(
    spec: &SystemSpec,
    x0: &[C64],
    path: &[Vec<f64>],
    step: f64,
    quads: &[QuadratureDef],
) -> Result<TrajectorySample> {
    if !(step > 0.0) || path.is_empty() {
        return Err(Error::input("", "step must be positive and the path non-empty"));
    }
    let mats = spec.real_direction_matrices();
    let k = spec.time_dims();
    let rl = spec.kind == Kind::Rlinear;
    let n = spec.n;
    let field = |t: &[f64], x: &[C64], u: &[f64]| -> Result<Vec<C64>> {
        let mut out = vec![C64::new(0.0, 0.0); x.len()];
        for r in 0..k {
            if u[r] != 0.0 {
                for (o, v) in out.iter_mut().zip(spec.velocity(&mats, r, t, x)?) {
                    *o += v * u[r];
                }
            }
        }
        Ok(out)
    };
    let mut t = path[0].clone();
    let mut x = x0.to_vec();
    let mut q = vec![0.0; quads.len()];
    // accumulators are anchored at t = 0; start them at the path origin
    if t.iter().any(|v| *v != 0.0) {
        q = quad_values(quads, &t, step)?;
    }
    let mut out = TrajectorySample { ts: vec![t.clone()], xs: vec![x.clone()], quads: vec![q.clone()], events: vec![] };
    for w in path.windows(2) {
        let d: Vec<f64> = w[1].iter().zip(&w[0]).map(|(b, a)| b - a).collect();
        let len = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len == 0.0 {
            continue;
        }
        let u: Vec<f64> = d.iter().map(|v| v / len).collect();
        let steps = (len / step).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        for _ in 0..steps {
            let tm: Vec<f64> = t.iter().zip(&u).map(|(a, b)| a + 0.5 * h * b).collect();
            let te: Vec<f64> = t.iter().zip(&u).map(|(a, b)| a + h * b).collect();
            let add = |x: &[C64], k: &[C64], s: f64| -> Vec<C64> { x.iter().zip(k).map(|(a, b)| a + b * s).collect() };
            let k1 = field(&t, &x, &u)?;
            let k2 = field(&tm, &add(&x, &k1, 0.5 * h), &u)?;
            let k3 = field(&tm, &add(&x, &k2, 0.5 * h), &u)?;
            let k4 = field(&te, &add(&x, &k3, h), &u)?;
            for i in 0..x.len() {
                x[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (h / 6.0);
            }
            if rl {
                for i in 0..n {
                    x[n + i] = x[i].conj();
                }
            }
            for (qi, def) in q.iter_mut().zip(quads) {
                let a = def.rate(&t, &u)?;
                let b = def.rate(&tm, &u)?;
                let c = def.rate(&te, &u)?;
                *qi += h / 6.0 * (a + 4.0 * b + c);
            }
            t = te;
            let norm = x.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if !norm.is_finite() || norm > OVERFLOW {
                out.events.push("overflow".into());
                return Ok(out);
            }
            out.ts.push(t.clone());
            out.xs.push(x.clone());
            out.quads.push(q.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Drift {
    pub drift: f64,
    pub steps_used: usize,
    pub event: Option<String>,
}

// distance from the origin to the segment [a, b]
fn segment_gap(a: C64, b: C64) -> f64 {
    let d = b - a;
    let len = d.norm_sqr();
    if len == 0.0 {
        return a.norm();
    }
    let s = (-(a.re * d.re + a.im * d.im) / len).clamp(0.0, 1.0);
    (a + d * s).norm()
}

fn guard_event(g: &Guard, v0: C64, prev: C64, v: C64) -> bool {
    let tiny = 1e-9 * g.scale;
    match g.kind {
        GuardKind::Sign => v.re.signum() != v0.re.signum() || v.re.abs() <= tiny,
        // a step passing through the origin counts, not only a sample on it
        GuardKind::NonZero => segment_gap(prev, v) <= tiny,
        GuardKind::Branch => v.norm() <= tiny || (v.re < 0.0 && v.im.signum() != v0.im.signum()),
    }
}

/// Max relative deviation of F along a sample, stopping at the first domain
/// event. `offset` locates F's accumulators inside the sample's.
pub fn constancy_check(f: &FirstIntegral, sample: &TrajectorySample, offset: usize) -> Result<Drift> {
    let nq = f.quads.len();
    let at = |k: usize| Point::new(sample.ts[k].clone(), sample.xs[k].clone());
    let q0 = &sample.quads[0][offset..offset + nq];
    let p0 = at(0);
    let env0 = f.env(q0);
    let f0 = eval(&f.expr, &p0, env0).map_err(|_| Error::domain("trajectory start is excluded"))?;
    let g0: Vec<C64> = f.guards.iter().map(|g| eval(&g.expr, &p0, env0)).collect::<Result<_>>()?;
    let mut prev = g0.clone();
    let mut drift: f64 = 0.0;
    for k in 1..sample.xs.len() {
        let p = at(k);
        let env = f.env(&sample.quads[k][offset..offset + nq]);
        for (i, (g, v0)) in f.guards.iter().zip(&g0).enumerate() {
            let crossed = match eval(&g.expr, &p, env) {
                Ok(v) => {
                    let hit = guard_event(g, *v0, prev[i], v);
                    prev[i] = v;
                    hit
                }
                Err(_) => true,
            };
            if crossed {
                return Ok(Drift { drift, steps_used: k, event: Some(format!("left the domain of {}", crate::expr::render(&g.expr))) });
            }
        }
        let v = match eval(&f.expr, &p, env) {
            Ok(v) => v,
            Err(e) => return Ok(Drift { drift, steps_used: k, event: Some(e.to_string()) }),
        };
        drift = drift.max((v - f0).norm() / (1.0 + f0.norm()));
    }
    Ok(Drift { drift, steps_used: sample.xs.len(), event: sample.events.first().cloned() })
}

/// ‖x_axis − x_straight‖∞ / (1 + ‖x_axis‖∞) at t_target.
pub fn path_independence_check(spec: &SystemSpec, x0: &[C64], t_target: &[f64], step: f64) -> Result<f64> {
    let k = spec.time_dims();
    let mut poly = vec![vec![0.0; k]];
    for j in 0..k {
        let mut p = poly.last().unwrap().clone();
        p[j] = t_target[j];
        poly.push(p);
    }
    let a = integrate_trajectory(spec, x0, &poly, step, &[])?;
    let b = integrate_trajectory(spec, x0, &[vec![0.0; k], t_target.to_vec()], step, &[])?;
    if !a.events.is_empty() || !b.events.is_empty() {
        return Err(Error::numerical("trajectory overflow in path comparison", vec![]));
    }
    let xa = a.xs.last().unwrap();
    let xb = b.xs.last().unwrap();
    let gap = xa.iter().zip(xb).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
    let scale = xa.iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(gap / (1.0 + scale))
}

// real coordinate directions (dt, dx) of the (t, x) space
fn coordinate_directions(spec: &SystemSpec) -> Vec<(Vec<f64>, Vec<C64>)> {
    let k = spec.time_dims();
    let d = spec.dim();
    let zero_x = vec![C64::new(0.0, 0.0); d];
    let mut out = Vec::new();
    for r in 0..k {
        let mut dt = vec![0.0; k];
        dt[r] = 1.0;
        out.push((dt, zero_x.clone()));
    }
    let unit = |pairs: &[(usize, C64)]| {
        let mut v = zero_x.clone();
        for &(i, z) in pairs {
            v[i] = z;
        }
        (vec![0.0; k], v)
    };
    let one = C64::new(1.0, 0.0);
    let i_ = C64::new(0.0, 1.0);
    match spec.kind {
        Kind::Rlinear => {
            let n = spec.n;
            for i in 0..n {
                out.push(unit(&[(i, one), (n + i, one)]));
                out.push(unit(&[(i, i_), (n + i, -i_)]));
            }
        }
        _ if spec.is_real() => (0..d).for_each(|i| out.push(unit(&[(i, one)]))),
        _ => {
            for i in 0..d {
                out.push(unit(&[(i, one)]));
                out.push(unit(&[(i, i_)]));
            }
        }
    }
    out
}

/// Gradient rows of F in real (t, x) coordinates: one row for real-valued
/// integrals of real systems, Re and Im rows otherwise.
pub fn jacobian_rows(f: &FirstIntegral, spec: &SystemSpec, p: &Point, quads: &[f64]) -> Result<Vec<Vec<f64>>> {
    let env = f.env(quads);
    let dirs = coordinate_directions(spec);
    let mut g = Vec::with_capacity(dirs.len());
    for (dt, dx) in &dirs {
        let d = match log_derivative(&f.expr, p, dt, dx, env) {
            Some(d) => d,
            None => eval_dual(&f.expr, p, dt, dx, env)?.1,
        };
        g.push(d);
    }
    let two = !(spec.is_real() && spec.kind != Kind::Rlinear);
    let mut rows = vec![g.iter().map(|z| z.re).collect::<Vec<f64>>()];
    if two {
        rows.push(g.iter().map(|z| z.im).collect());
    }
    for r in rows.iter_mut() {
        let s = r.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if s > 0.0 {
            r.iter_mut().for_each(|v| *v /= s);
        }
    }
    Ok(rows)
}

/// dF/F for products and exponentials, summed factor by factor so that a
/// product whose value underflows still has a usable gradient direction;
/// the rank of a Jacobian is unchanged by scaling a row with 1/F
fn log_derivative(e: &Expr, p: &Point, dt: &[f64], dx: &[C64], env: Option<QuadEnv>) -> Option<C64> {
    let factor = |g: &Expr| -> Option<C64> {
        match g {
            Expr::Exp(a) => eval_dual(a, p, dt, dx, env).ok().map(|r| r.1),
            _ => {
                let (v, d) = eval_dual(g, p, dt, dx, env).ok()?;
                (v.norm() > 0.0 && v.is_finite()).then(|| d / v)
            }
        }
    };
    let out = match e {
        Expr::Exp(_) => factor(e)?,
        Expr::Prod(fs) if fs.iter().any(|g| matches!(g, Expr::Exp(_))) => fs.iter().map(factor).sum::<Option<C64>>()?,
        _ => return None,
    };
    out.is_finite().then_some(out)
}

pub fn rank_of_rows(rows: &[Vec<f64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    rank(&CMatrix::from_real(rows), 1e-8)
}

/// Rank of the joint Jacobian of `fs` at `p`. `quads[i]` holds integral i's
/// accumulator values at p.
pub fn independence_check(fs: &[&FirstIntegral], spec: &SystemSpec, p: &Point, quads: &[Vec<f64>]) -> Result<usize> {
    let mut rows = Vec::new();
    for (f, q) in fs.iter().zip(quads) {
        rows.extend(jacobian_rows(f, spec, p, q)?);
    }
    Ok(rank_of_rows(&rows))
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralCheck {
    pub expr: String,
    pub max_lie_residual: f64,
    pub max_trajectory_drift: f64,
    pub samples_used: usize,
    pub trajectories_used: usize,
    pub domain_events: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub solvability: SolvabilityVerdict,
    pub integrals: Vec<IntegralCheck>,
    pub independence_rank: Option<usize>,
    pub autonomous_count: usize,
    pub path_independence_gap: Option<f64>,
    pub seed: u64,
    pub config: VerifyConfig,
    pub passed: bool,
}

/// Lie residuals, trajectory drift, joint rank and (for total systems) the
/// path-independence gap.
pub fn verify_integrals(
    spec: &SystemSpec,
    verdict: &SolvabilityVerdict,
    fs: &[FirstIntegral],
    cfg: &VerifyConfig,
) -> Result<VerificationReport> {
    let pool = pool();
    let k = spec.time_dims();

    let lies: Vec<Result<LieResidual>> = pool.install(|| {
        fs.par_iter().enumerate().map(|(i, f)| lie_residual_with(f, spec, cfg.samples, cfg, i as u64)).collect()
    });

    // every integral's accumulators ride along each trajectory
    let mut defs = Vec::new();
    let mut offsets = Vec::new();
    for f in fs {
        offsets.push(defs.len());
        defs.extend(f.quads.iter().cloned());
    }
    let refs: Vec<&FirstIntegral> = fs.iter().collect();
    let runs: Vec<Result<Vec<Option<Drift>>>> = pool.install(|| {
        (0..cfg.trajectories)
            .into_par_iter()
            .map(|tr| -> Result<Vec<Option<Drift>>> {
                let mut rng = rng_for(cfg.seed, 0x7a0 + tr as u64);
                // start at t = 0 from a state safe for as many integrals as possible
                let mut best: Option<(Point, usize)> = None;
                for _ in 0..200 {
                    let mut p = sample_point(spec, &mut rng, cfg.half_width);
                    p.t = vec![0.0; k];
                    let ok = refs.iter().filter(|f| is_safe(f, &p, &vec![0.0; f.quads.len()], cfg.margin)).count();
                    if best.as_ref().map_or(true, |b| ok > b.1) {
                        best = Some((p, ok));
                    }
                    if ok == refs.len() {
                        break;
                    }
                }
                let p = best.unwrap().0;
                let mut u: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nu = u.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
                u.iter_mut().for_each(|v| *v *= cfg.span / nu);
                let sample = integrate_trajectory(spec, &p.x, &[vec![0.0; k], u], cfg.step, &defs)?;
                Ok(refs
                    .iter()
                    .zip(&offsets)
                    .map(|(f, &off)| {
                        if !is_safe(f, &p, &vec![0.0; f.quads.len()], cfg.margin) {
                            return None;
                        }
                        constancy_check(f, &sample, off).ok()
                    })
                    .collect())
            })
            .collect()
    });
    let runs: Vec<Vec<Option<Drift>>> = runs.into_iter().collect::<Result<_>>()?;

    let mut checks = Vec::new();
    let mut all = true;
    for (i, f) in fs.iter().enumerate() {
        let (lie, used) = match &lies[i] {
            Ok(l) => (l.max_residual, l.samples_used),
            Err(_) => (f64::INFINITY, 0),
        };
        let mut drift: f64 = 0.0;
        let mut traj = 0;
        let mut events = 0;
        for r in &runs {
            if let Some(d) = &r[i] {
                if d.steps_used >= 2 {
                    traj += 1;
                    drift = drift.max(d.drift);
                }
                if d.event.is_some() {
                    events += 1;
                }
            }
        }
        let passed = lie <= cfg.lie_tol && drift <= cfg.drift_tol && used > 0;
        all &= passed;
        checks.push(IntegralCheck {
            expr: crate::expr::render(&f.expr),
            max_lie_residual: lie,
            max_trajectory_drift: drift,
            samples_used: used,
            trajectories_used: traj,
            domain_events: events,
            passed,
        });
    }

    let mut rng = rng_for(cfg.seed, 0x1d);
    let independence_rank = match safe_point(&refs, spec, &mut rng, cfg, 1000) {
        Some((p, qs)) => Some(independence_check(&refs, spec, &p, &qs)?),
        None => None,
    };
    let path_independence_gap = if spec.kind != Kind::Ode {
        let p = sample_point(spec, &mut rng, 1.0);
        let target: Vec<f64> = (0..k).map(|j| 0.5 + 0.2 * (j % 2) as f64).collect();
        path_independence_check(spec, &p.x, &target, cfg.step).ok()
    } else {
        None
    };
    Ok(VerificationReport {
        solvability: verdict.clone(),
        integrals: checks,
        independence_rank,
        autonomous_count: fs.iter().filter(|f| f.autonomous).count(),
        path_independence_gap,
        seed: cfg.seed,
        config: cfg.clone(),
        passed: all,
    })
}
