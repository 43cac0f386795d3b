//! Construction of first integrals from common eigenvectors and chains.
//!
//! Every building block contributes "log coordinates" whose derivative along
//! each operator direction is constant: ln|νx| (derivative λ^j), ln P and
//! arg(νx) for complex tuples of real systems, and the chain functions v_θ
//! (derivative μ). A constant-coefficient combination annihilated by every
//! direction is an autonomous integral; subtracting Σ (derivative)·t gives a
//! time-dependent one. Forced systems go through [`forced`].

pub mod forced;
pub mod psi;

use num_complex::Complex64 as C64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::expr::{quad_values, render, Expr, Guard, GuardKind, QuadEnv, QuadratureDef};
use crate::linalg::{nullspace, CMatrix, EigenStructure};
use crate::spectral::{chain_on, common_eigenvectors, family_eigen, CommonEigenData};
use crate::system::{forcing_compat_check, frobenius_check, uniform_grid, Kind, SolvabilityVerdict, SystemSpec};
use crate::verify::{is_safe, jacobian_rows, rank_of_rows, rng_for, sample_point, VerifyConfig, POINT_QUAD_STEP};

pub use psi::{psi_chain, psi_functions, PsiChain, MU_TOL};

/// How an integral was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tag {
    /// product of powers of real eigen-forms
    EigenProduct,
    /// uses quadratic forms P or arguments of complex eigen-forms
    ConjugateProduct,
    /// product form with chain functions in the exponent
    ChainProduct,
    /// combination of chain functions only
    ChainFunction,
    /// νx·exp(−Σ λ t)
    EigenTime,
    /// P·exp(−2 Σ Re λ t) or arg − Σ Im λ t
    ConjugateTime,
    /// v − Σ μ t
    ChainTime,
    /// forced system, eigenvector block
    Forced,
    /// forced system, chain block
    ForcedChain,
    /// given by the caller
    Supplied,
}

impl Tag {
    pub fn priority(self) -> u8 {
        match self {
            Tag::EigenProduct => 0,
            Tag::ConjugateProduct => 1,
            Tag::ChainProduct | Tag::ChainFunction => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstIntegral {
    pub expr: Expr,
    pub autonomous: bool,
    pub tag: Tag,
    /// excluded sets: every denominator, atan2 argument and branch base
    pub guards: Vec<Guard>,
    /// accumulators referenced by quad(k) nodes
    pub quads: Vec<QuadratureDef>,
    /// tuple indices used
    pub provenance: Vec<usize>,
}

impl FirstIntegral {
    pub fn env<'a>(&'a self, values: &'a [f64]) -> Option<QuadEnv<'a>> {
        if self.quads.is_empty() {
            None
        } else {
            Some(QuadEnv { values, defs: &self.quads })
        }
    }

    pub fn render(&self) -> String {
        render(&self.expr)
    }

    /// Wrap a caller's expression (no quadratures) for verification.
    pub fn supplied(expr: Expr) -> FirstIntegral {
        let guards = crate::expr::implied_guards(&expr);
        FirstIntegral { autonomous: !expr.contains_t(), expr, tag: Tag::Supplied, guards, quads: vec![], provenance: vec![] }
    }
}

impl Serialize for FirstIntegral {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct G {
            form: String,
            kind: GuardKind,
        }
        #[derive(Serialize)]
        struct Out<'a> {
            expr: String,
            autonomous: bool,
            tag: Tag,
            excluded: Vec<G>,
            quadratures: Vec<Vec<String>>,
            provenance: &'a [usize],
        }
        Out {
            expr: render(&self.expr),
            autonomous: self.autonomous,
            tag: self.tag,
            excluded: self.guards.iter().map(|g| G { form: render(&g.expr), kind: g.kind }).collect(),
            quadratures: self.quads.iter().map(|q| q.integrands.iter().map(render).collect()).collect(),
            provenance: &self.provenance,
        }
        .serialize(s)
    }
}

fn is_integer(v: f64) -> bool {
    v.fract() == 0.0 && v.abs() < 1e6
}

/// Scale so entries become small (Gaussian) integers when that is possible.
pub fn rationalize(h: &[C64]) -> Vec<C64> {
    let fit = |w: &[C64]| -> Option<Vec<C64>> {
        (1..=64u32).find_map(|k| {
            let k = k as f64;
            let ok = w.iter().all(|z| {
                let (a, b) = (z.re * k, z.im * k);
                (a - a.round()).abs() <= 1e-9 * (1.0 + a.abs())
                    && (b - b.round()).abs() <= 1e-9 * (1.0 + b.abs())
                    && a.abs() <= 64.5
                    && b.abs() <= 64.5
            });
            ok.then(|| w.iter().map(|z| C64::new((z.re * k).round(), (z.im * k).round())).collect())
        })
    };
    if let Some(v) = fit(h) {
        return v;
    }
    let small = h.iter().filter(|z| z.norm() > 1e-12).min_by(|a, b| a.norm().total_cmp(&b.norm()));
    if let Some(&m) = small {
        let w: Vec<C64> = h.iter().map(|z| z / m).collect();
        if let Some(v) = fit(&w) {
            return v;
        }
    }
    h.to_vec()
}

/// All solutions h of Σ_k M[j][k] h_k = 0, rationalized.
pub fn exponent_basis(m: &CMatrix) -> Result<Vec<Vec<C64>>> {
    Ok(nullspace(m, 1e-9)?.iter().map(|h| rationalize(h)).collect())
}

/// First nullspace vector of the exponent system.
pub fn exponent_solution(m: &CMatrix) -> Result<Vec<C64>> {
    exponent_basis(m)?.into_iter().next().ok_or_else(|| Error::structural("exponent system has only the trivial solution"))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Part {
    Whole,
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CoordKind {
    /// ln|νx|, real tuple
    LogAbs(usize),
    /// ln P with P = (ν̊x)² + (ν̃x)²
    LogP(usize),
    /// atan2(ν̃x, ν̊x)
    Arg(usize),
    /// ln(νx) over the complex field
    LogC(usize),
    /// chain function v_θ of psi chain c (θ ≥ 1)
    V(usize, usize, Part),
}

struct Coord {
    kind: CoordKind,
    derivs: Vec<C64>,
}

fn real_field(spec: &SystemSpec) -> bool {
    spec.is_real() && spec.kind != Kind::Rlinear
}

/// derivative coefficients over operator directions → coefficients over
/// real time coordinates
fn time_coeffs(spec: &SystemSpec, d: &[C64]) -> Vec<C64> {
    match spec.kind {
        Kind::Rlinear => {
            let m = spec.m;
            let i = C64::new(0.0, 1.0);
            (0..2 * m).map(|r| if r < m { d[r] + d[m + r] } else { i * (d[r - m] - d[r]) }).collect()
        }
        _ => d.to_vec(),
    }
}

fn coordinates(spec: &SystemSpec, data: &CommonEigenData, psis: &[PsiChain]) -> Vec<Coord> {
    let re = |v: &[C64]| -> Vec<C64> { v.iter().map(|z| C64::new(z.re, 0.0)).collect() };
    let im = |v: &[C64]| -> Vec<C64> { v.iter().map(|z| C64::new(z.im, 0.0)).collect() };
    let mut out = Vec::new();
    let real = real_field(spec);
    for i in data.representatives(real) {
        let t = &data.tuples[i];
        if !real {
            out.push(Coord { kind: CoordKind::LogC(i), derivs: t.lambdas.clone() });
        } else if t.is_real {
            out.push(Coord { kind: CoordKind::LogAbs(i), derivs: re(&t.lambdas) });
        } else {
            out.push(Coord { kind: CoordKind::LogP(i), derivs: re(&t.lambdas).iter().map(|z| z * 2.0).collect() });
            out.push(Coord { kind: CoordKind::Arg(i), derivs: im(&t.lambdas) });
        }
        for (c, p) in psis.iter().enumerate().filter(|(_, p)| p.tuple == i && p.accepted) {
            for th in 1..=p.v.len() {
                let mu = &p.mu[th - 1];
                if !real {
                    out.push(Coord { kind: CoordKind::V(c, th, Part::Whole), derivs: mu.clone() });
                } else if t.is_real {
                    out.push(Coord { kind: CoordKind::V(c, th, Part::Whole), derivs: re(mu) });
                } else {
                    out.push(Coord { kind: CoordKind::V(c, th, Part::Re), derivs: re(mu) });
                    out.push(Coord { kind: CoordKind::V(c, th, Part::Im), derivs: im(mu) });
                }
            }
        }
    }
    out
}

struct Parts<'a> {
    spec: &'a SystemSpec,
    data: &'a CommonEigenData,
    psis: &'a [PsiChain],
}

impl Parts<'_> {
    fn vec(&self, i: usize) -> &[C64] {
        &self.data.tuples[i].vector
    }
    fn split(&self, i: usize) -> (Expr, Expr) {
        let v = self.vec(i);
        (
            Expr::lin(v.iter().map(|z| C64::new(z.re, 0.0)).collect()),
            Expr::lin(v.iter().map(|z| C64::new(z.im, 0.0)).collect()),
        )
    }
    fn p_form(&self, i: usize) -> Expr {
        let (a, b) = self.split(i);
        Expr::sum(vec![Expr::pow(a, C64::new(2.0, 0.0)), Expr::pow(b, C64::new(2.0, 0.0))])
    }
    fn arg(&self, i: usize) -> (Expr, Vec<Guard>) {
        let (a, b) = self.split(i);
        let g = vec![Guard::new(b.clone(), GuardKind::Sign), Guard::new(a.clone(), GuardKind::Sign)];
        (Expr::atan2(b, a), g)
    }
    fn v(&self, c: usize, th: usize, part: Part) -> (Expr, Guard) {
        let p = &self.psis[c];
        let e = p.v[th - 1].clone();
        let lead = Expr::lin(p.vectors[0].clone());
        let real_lead = p.vectors[0].iter().all(|z| z.im == 0.0) && self.spec.kind != Kind::Rlinear;
        let g = Guard::new(lead, if real_lead { GuardKind::Sign } else { GuardKind::NonZero });
        let e = match part {
            Part::Whole => e,
            Part::Re => Expr::re(e),
            Part::Im => Expr::im(e),
        };
        (e, g)
    }
}

fn dedup_guards(gs: Vec<Guard>) -> Vec<Guard> {
    let mut out: Vec<Guard> = Vec::new();
    for g in gs {
        if !out.iter().any(|o| o.kind == g.kind && o.expr == g.expr) {
            out.push(g);
        }
    }
    out
}

fn product_integral(parts: &Parts, coords: &[Coord], h: &[C64]) -> Option<FirstIntegral> {
    let mut factors = Vec::new();
    let mut terms = Vec::new();
    let mut guards = Vec::new();
    let mut prov = Vec::new();
    let (mut chain, mut conj) = (false, false);
    for (c, &hk) in coords.iter().zip(h) {
        if hk.norm() <= 1e-12 {
            continue;
        }
        match c.kind {
            CoordKind::LogAbs(i) => {
                let l = Expr::lin(parts.vec(i).to_vec());
                let e = hk.re;
                if is_integer(e) {
                    if e < 0.0 {
                        guards.push(Guard::new(l.clone(), GuardKind::Sign));
                    }
                    factors.push(Expr::pow(l, C64::new(e, 0.0)));
                } else {
                    guards.push(Guard::new(l.clone(), GuardKind::Sign));
                    factors.push(Expr::pow(Expr::abs(l), C64::new(e, 0.0)));
                }
                prov.push(i);
            }
            CoordKind::LogP(i) => {
                if hk.re < 0.0 || !is_integer(hk.re) {
                    guards.push(Guard::new(Expr::lin(parts.vec(i).to_vec()), GuardKind::NonZero));
                }
                factors.push(Expr::pow(parts.p_form(i), C64::new(hk.re, 0.0)));
                conj = true;
                prov.push(i);
            }
            CoordKind::Arg(i) => {
                let (a, g) = parts.arg(i);
                terms.push(a.scaled(C64::new(hk.re, 0.0)));
                guards.extend(g);
                conj = true;
                prov.push(i);
            }
            CoordKind::LogC(i) => {
                let l = Expr::lin(parts.vec(i).to_vec());
                if hk.im != 0.0 || !is_integer(hk.re) {
                    guards.push(Guard::new(l.clone(), GuardKind::Branch));
                } else if hk.re < 0.0 {
                    guards.push(Guard::new(l.clone(), GuardKind::NonZero));
                }
                factors.push(Expr::pow(l, hk));
                prov.push(i);
            }
            CoordKind::V(c, th, part) => {
                let (e, g) = parts.v(c, th, part);
                let k = if real_field(parts.spec) { C64::new(hk.re, 0.0) } else { hk };
                terms.push(e.scaled(k));
                guards.push(g);
                chain = true;
                prov.push(parts.psis[c].tuple);
            }
        }
    }
    let expr = if factors.is_empty() {
        Expr::sum(terms)
    } else {
        factors.push(Expr::exp(Expr::sum(terms)));
        Expr::prod(factors)
    };
    if !expr.contains_x() {
        return None;
    }
    let tag = match (chain, conj) {
        (true, _) if !expr_has_factor(&expr) => Tag::ChainFunction,
        (true, _) => Tag::ChainProduct,
        (false, true) => Tag::ConjugateProduct,
        _ => Tag::EigenProduct,
    };
    prov.sort_unstable();
    prov.dedup();
    Some(FirstIntegral { expr, autonomous: true, tag, guards: dedup_guards(guards), quads: vec![], provenance: prov })
}

fn expr_has_factor(e: &Expr) -> bool {
    matches!(e, Expr::Prod(_) | Expr::Pow(..))
}

/// Autonomous integrals: one per nullspace vector of the derivative matrix
/// of all log coordinates.
pub fn build_autonomous(spec: &SystemSpec, data: &CommonEigenData, psis: &[PsiChain]) -> Result<Vec<FirstIntegral>> {
    let coords = coordinates(spec, data, psis);
    if coords.is_empty() {
        return Ok(vec![]);
    }
    let d = spec.directions();
    let rows: Vec<Vec<C64>> = (0..d).map(|j| coords.iter().map(|c| c.derivs[j]).collect()).collect();
    let m = CMatrix::from_rows(&rows);
    let parts = Parts { spec, data, psis };
    Ok(exponent_basis(&m)?.iter().filter_map(|h| product_integral(&parts, &coords, h)).collect())
}

/// Time-dependent integrals, one per log coordinate.
pub fn build_nonautonomous(spec: &SystemSpec, data: &CommonEigenData, psis: &[PsiChain]) -> Vec<FirstIntegral> {
    let parts = Parts { spec, data, psis };
    let mut out = Vec::new();
    let neg = |v: Vec<C64>| -> Vec<C64> { v.iter().map(|z| -z).collect() };
    for c in coordinates(spec, data, psis) {
        let tc = time_coeffs(spec, &c.derivs);
        let (expr, guards, tag, prov) = match c.kind {
            CoordKind::LogAbs(i) | CoordKind::LogC(i) => {
                let e = Expr::prod(vec![Expr::lin(parts.vec(i).to_vec()), Expr::exp(Expr::lin_t(&neg(tc)))]);
                (e, vec![], Tag::EigenTime, i)
            }
            CoordKind::LogP(i) => {
                let e = Expr::prod(vec![parts.p_form(i), Expr::exp(Expr::lin_t(&neg(tc)))]);
                (e, vec![], Tag::ConjugateTime, i)
            }
            CoordKind::Arg(i) => {
                let (a, g) = parts.arg(i);
                (Expr::sum(vec![a, Expr::lin_t(&neg(tc))]), g, Tag::ConjugateTime, i)
            }
            CoordKind::V(k, th, part) => {
                let (e, g) = parts.v(k, th, part);
                (Expr::sum(vec![e, Expr::lin_t(&neg(tc))]), vec![g], Tag::ChainTime, psis[k].tuple)
            }
        };
        let autonomous = !expr.contains_t();
        out.push(FirstIntegral { expr, autonomous, tag, guards, quads: vec![], provenance: vec![prov] });
    }
    out
}

/// Forced systems: one block per representative tuple, using an invariant
/// chain through it when one exists.
pub fn build_forced(spec: &SystemSpec, eigen: &[EigenStructure], data: &CommonEigenData, warnings: &mut Vec<String>) -> Result<Vec<FirstIntegral>> {
    let bs = spec.operator_matrices();
    let real = real_field(spec);
    let mut out = Vec::new();
    for i in data.representatives(real) {
        let t = &data.tuples[i];
        let mut order = vec![data.pivot];
        order.extend((0..bs.len()).filter(|&j| j != data.pivot));
        let mut block = None;
        for &j in &order {
            if let Ok(ch) = chain_on(spec, &bs, eigen, &data.tuples, i, j, spec.tol) {
                if forced::chain_coefficients(&bs, &t.lambdas, &ch.vectors).is_some() {
                    block = Some(ch.vectors);
                    break;
                }
            }
        }
        let vectors = block.unwrap_or_else(|| vec![t.vector.clone()]);
        match forced::forced_block(spec, i, &vectors, &t.lambdas, real) {
            Ok(fs) => out.extend(fs),
            Err(e) => warnings.push(format!("tuple {i}: {e}")),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct BuildConfig {
    pub seed: u64,
    pub mu_samples: usize,
    /// report every candidate, not only the selected general integral
    pub exhaustive: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig { seed: 0, mu_samples: 100, exhaustive: false }
    }
}

/// Try every matrix (pivot first) for a chain through each building-block
/// tuple and keep the first one whose derivatives are constant.
pub fn attach_chains(
    spec: &SystemSpec,
    eigen: &[EigenStructure],
    data: &CommonEigenData,
    cfg: &BuildConfig,
) -> (Vec<PsiChain>, Vec<PsiChain>) {
    let bs = spec.operator_matrices();
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for i in data.representatives(real_field(spec)) {
        let mut order = vec![data.pivot];
        order.extend((0..bs.len()).filter(|&j| j != data.pivot));
        for j in order {
            let Ok(ch) = chain_on(spec, &bs, eigen, &data.tuples, i, j, spec.tol) else { continue };
            match psi_chain(spec, i, j, &ch.vectors, cfg.mu_samples, cfg.seed) {
                Ok(p) if p.accepted => {
                    accepted.push(p);
                    break;
                }
                Ok(p) => rejected.push(p),
                Err(_) => {}
            }
        }
    }
    (accepted, rejected)
}

#[derive(Debug, Clone, Serialize)]
pub struct Assembly {
    /// indices into the candidate list, in selection order
    pub selected: Vec<usize>,
    pub rank: usize,
    pub autonomous_count: usize,
    pub target_autonomous: usize,
    pub target_total: usize,
}

/// (autonomous, total) real Jacobian ranks of a general integral
pub fn rank_targets(spec: &SystemSpec) -> (usize, usize) {
    let f = if real_field(spec) { 1 } else { 2 };
    let auto = if spec.has_forcing() { 0 } else { f * (spec.n - spec.m.min(spec.n)) };
    (auto, f * spec.n)
}

/// Greedy selection by Jacobian rank at a random point: autonomous
/// candidates first, then time-dependent ones.
pub fn assemble_general_integral(cands: &[FirstIntegral], spec: &SystemSpec, seed: u64) -> Result<Assembly> {
    let (ta, tt) = rank_targets(spec);
    let cfg = VerifyConfig::default();
    let mut rng = rng_for(seed, 0xa55e);
    // a point safe for as many candidates as possible
    let mut best: Option<(crate::expr::Point, Vec<Option<Vec<f64>>>, usize)> = None;
    for _ in 0..300 {
        let p = sample_point(spec, &mut rng, cfg.half_width);
        let mut qs = Vec::new();
        let mut ok = 0;
        for f in cands {
            let q = quad_values(&f.quads, &p.t, POINT_QUAD_STEP).ok().filter(|q| is_safe(f, &p, q, cfg.margin));
            ok += q.is_some() as usize;
            qs.push(q);
        }
        let better = best.as_ref().map_or(true, |b| ok > b.2);
        if better {
            best = Some((p, qs, ok));
        }
        if ok == cands.len() {
            break;
        }
    }
    let (p, qs, _) = best.ok_or_else(|| Error::structural("no candidate integrals"))?;
    let mut order: Vec<usize> = (0..cands.len()).collect();
    order.sort_by_key(|&i| (!cands[i].autonomous, cands[i].tag.priority(), i));

    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rank = 0;
    let mut selected = Vec::new();
    let mut auto = 0;
    // a degenerate family can carry more autonomous integrals than n − m,
    // so the second phase considers every candidate left over
    for phase in [true, false] {
        for &i in order.iter().filter(|&&i| !phase || cands[i].autonomous) {
            if selected.contains(&i) {
                continue;
            }
            let target = if phase { ta } else { tt };
            if rank >= target {
                break;
            }
            let Some(q) = &qs[i] else { continue };
            let Ok(r) = jacobian_rows(&cands[i], spec, &p, q) else { continue };
            let mut trial = rows.clone();
            trial.extend(r);
            let k = rank_of_rows(&trial);
            if k > rank {
                rank = k;
                rows = trial;
                selected.push(i);
                auto += cands[i].autonomous as usize;
            }
        }
    }
    Ok(Assembly { selected, rank, autonomous_count: auto, target_autonomous: ta, target_total: tt })
}

/// Full pipeline result for one system.
#[derive(Debug, Clone, Serialize)]
pub struct Analysis {
    pub verdict: SolvabilityVerdict,
    pub eigen: Vec<EigenStructure>,
    pub common: Option<CommonEigenData>,
    pub chains: Vec<PsiChain>,
    pub rejected_chains: Vec<PsiChain>,
    pub candidates: Vec<FirstIntegral>,
    pub assembly: Option<Assembly>,
    pub warnings: Vec<String>,
}

impl Analysis {
    /// the selected general integral
    pub fn integrals(&self) -> Vec<FirstIntegral> {
        match &self.assembly {
            Some(a) => a.selected.iter().map(|&i| self.candidates[i].clone()).collect(),
            None => vec![],
        }
    }
}

/// Solvability, spectral data, candidate integrals and their assembly.
pub fn analyze(spec: &SystemSpec, cfg: &BuildConfig) -> Result<Analysis> {
    let mut verdict = frobenius_check(spec, spec.tol);
    if spec.has_forcing() && spec.kind == Kind::Total && verdict.solvable {
        let res = forcing_compat_check(spec, &uniform_grid(spec.time_dims(), -1.0, 1.0, 11))?;
        verdict.forcing_residual = Some(res);
        if res > 1e-6 {
            verdict.solvable = false;
        }
    }
    let mut out = Analysis {
        verdict,
        eigen: vec![],
        common: None,
        chains: vec![],
        rejected_chains: vec![],
        candidates: vec![],
        assembly: None,
        warnings: vec![],
    };
    if !out.verdict.solvable {
        return Ok(out);
    }
    out.eigen = family_eigen(spec, spec.tol)?;
    for (j, e) in out.eigen.iter().enumerate() {
        if e.ambiguous {
            out.warnings.push(format!("matrix {}: nearly coincident eigenvalues", j + 1));
        }
    }
    let data = common_eigenvectors(spec, &out.eigen, spec.tol)?;
    out.warnings.extend(data.warnings.iter().cloned());
    if spec.has_forcing() {
        out.candidates = build_forced(spec, &out.eigen, &data, &mut out.warnings)?;
    } else {
        let (acc, rej) = attach_chains(spec, &out.eigen, &data, cfg);
        for p in &rej {
            if let Some(n) = &p.note {
                out.warnings.push(format!("chain on tuple {} via matrix {} rejected: {n}", p.tuple, p.matrix + 1));
            }
        }
        out.candidates = build_autonomous(spec, &data, &acc)?;
        out.candidates.extend(build_nonautonomous(spec, &data, &acc));
        out.chains = acc;
        out.rejected_chains = rej;
    }
    out.common = Some(data);
    if !out.candidates.is_empty() {
        let a = assemble_general_integral(&out.candidates, spec, cfg.seed)?;
        if a.rank < a.target_total {
            out.warnings.push(format!("general integral has rank {} of {}", a.rank, a.target_total));
        }
        out.assembly = Some(a);
    }
    Ok(out)
}
