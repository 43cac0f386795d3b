//! System specifications, validation and solvability checks.
//!
//! Matrices are stored as *field* matrices: `dx = Σ_j G_j x dt_j (+ f_j dt_j)`,
//! i.e. row i of G_j holds the coefficients of dx_i. The operator matrices
//! acting on eigenvector coefficients are the transposes.

use num_complex::Complex64 as C64;
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::expr::{eval, parse, Expr, Point};
use crate::linalg::{norm_inf_vec, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ode,
    Total,
    Rlinear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Debug, Clone)]
pub struct SystemSpec {
    pub kind: Kind,
    /// state dimension as written (complex dimension for rlinear)
    pub n: usize,
    /// independent variables as written (complex count for rlinear)
    pub m: usize,
    /// one field matrix per operator direction; rlinear: 2m matrices of size 2n
    /// over γ = (w, w̄), directions z_1..z_m, z̄_1..z̄_m
    pub matrices: Vec<CMatrix>,
    /// per direction, one expression per state component (time variables only)
    pub forcing: Option<Vec<Vec<Expr>>>,
    pub field: Field,
    pub tol: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;

impl SystemSpec {
    /// Validated constructor for ode/total systems from field matrices.
    pub fn new(kind: Kind, matrices: Vec<CMatrix>, forcing: Option<Vec<Vec<Expr>>>) -> Result<SystemSpec> {
        if kind == Kind::Rlinear {
            return Err(Error::input("/kind", "use embed_rlinear for R-linear systems"));
        }
        let m = matrices.len();
        if m == 0 {
            return Err(Error::input("/matrices", "at least one matrix is required"));
        }
        if kind == Kind::Ode && m != 1 {
            return Err(Error::input("/matrices", "an ode system has exactly one matrix"));
        }
        let n = matrices[0].rows();
        for (j, a) in matrices.iter().enumerate() {
            if a.rows() != n || a.cols() != n {
                return Err(Error::input(format!("/matrices/{j}"), format!("expected {n}x{n}")));
            }
        }
        let field = if matrices.iter().all(|a| a.is_real(0.0)) { Field::Real } else { Field::Complex };
        let spec = SystemSpec { kind, n, m, matrices, forcing, field, tol: DEFAULT_TOL };
        spec.check_forcing()?;
        Ok(spec)
    }

    fn check_forcing(&self) -> Result<()> {
        if let Some(f) = &self.forcing {
            if f.len() != self.directions() {
                return Err(Error::input("/forcing", format!("expected {} direction entries", self.directions())));
            }
            for (j, fj) in f.iter().enumerate() {
                if fj.len() != self.dim() {
                    return Err(Error::input(format!("/forcing/{j}"), format!("expected {} components", self.dim())));
                }
                for (i, e) in fj.iter().enumerate() {
                    if e.contains_x() || e.contains_quad() {
                        return Err(Error::input(format!("/forcing/{j}/{i}"), "forcing may only use time variables"));
                    }
                    if e.any(&|s| matches!(s, Expr::T(k) if *k >= self.time_dims())) {
                        return Err(Error::input(format!("/forcing/{j}/{i}"), "time variable out of range"));
                    }
                }
            }
        }
        Ok(())
    }

    /// length of the state vector the matrices act on
    pub fn dim(&self) -> usize {
        self.matrices[0].rows()
    }

    /// number of operator directions (2m for rlinear)
    pub fn directions(&self) -> usize {
        self.matrices.len()
    }

    /// number of real time coordinates (Re z, Im z for rlinear)
    pub fn time_dims(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_real(&self) -> bool {
        self.field == Field::Real
    }

    pub fn has_forcing(&self) -> bool {
        self.forcing.is_some()
    }

    /// operator matrices B_j = G_jᵀ
    pub fn operator_matrices(&self) -> Vec<CMatrix> {
        self.matrices.iter().map(|g| g.transpose()).collect()
    }

    /// Field matrix along real time coordinate r. For rlinear, coordinates
    /// are (Re z_1..Re z_m, Im z_1..Im z_m) with generators X_j + X_{m+j}
    /// and i(X_j - X_{m+j}).
    pub fn real_direction_matrix(&self, r: usize) -> CMatrix {
        match self.kind {
            Kind::Rlinear => {
                let m = self.m;
                if r < m {
                    self.matrices[r].add(&self.matrices[m + r])
                } else {
                    let j = r - m;
                    self.matrices[j].sub(&self.matrices[m + j]).scale(C64::new(0.0, 1.0))
                }
            }
            _ => self.matrices[r].clone(),
        }
    }

    pub fn real_direction_matrices(&self) -> Vec<CMatrix> {
        (0..self.time_dims()).map(|r| self.real_direction_matrix(r)).collect()
    }

    /// forcing vector of direction j at time t
    pub fn forcing_at(&self, j: usize, t: &[f64]) -> Result<Vec<C64>> {
        match &self.forcing {
            None => Ok(vec![C64::new(0.0, 0.0); self.dim()]),
            Some(f) => {
                let p = Point::new(t.to_vec(), Vec::new());
                f[j].iter().map(|e| eval(e, &p, None)).collect()
            }
        }
    }

    /// velocity along real time coordinate r at (t, x)
    pub fn velocity(&self, mats: &[CMatrix], r: usize, t: &[f64], x: &[C64]) -> Result<Vec<C64>> {
        let mut v = mats[r].mul_vec(x);
        if self.forcing.is_some() && self.kind != Kind::Rlinear {
            for (vi, fi) in v.iter_mut().zip(self.forcing_at(r, t)?) {
                *vi += fi;
            }
        }
        Ok(v)
    }
}

fn ptr(base: &str, k: impl std::fmt::Display) -> String {
    format!("{base}/{k}")
}

fn parse_scalar(v: &Value, at: &str) -> Result<C64> {
    let num = |x: &Value, at: &str| -> Result<f64> {
        let f = x.as_f64().ok_or_else(|| Error::input(at, "expected a number"))?;
        if !f.is_finite() {
            return Err(Error::input(at, "non-finite number"));
        }
        Ok(f)
    };
    match v {
        Value::Number(_) => Ok(C64::new(num(v, at)?, 0.0)),
        Value::Array(a) if a.len() == 2 => Ok(C64::new(num(&a[0], &ptr(at, 0))?, num(&a[1], &ptr(at, 1))?)),
        _ => Err(Error::input(at, "expected a number or [re, im]")),
    }
}

fn parse_matrix(v: &Value, at: &str) -> Result<CMatrix> {
    let rows = v.as_array().ok_or_else(|| Error::input(at, "expected an array of rows"))?;
    if rows.is_empty() {
        return Err(Error::input(at, "empty matrix"));
    }
    let mut out = Vec::new();
    let mut width = None;
    for (i, row) in rows.iter().enumerate() {
        let rat = ptr(at, i);
        let cells = row.as_array().ok_or_else(|| Error::input(&rat, "expected a row array"))?;
        if *width.get_or_insert(cells.len()) != cells.len() {
            return Err(Error::input(&rat, "ragged matrix"));
        }
        let mut r = Vec::new();
        for (j, c) in cells.iter().enumerate() {
            r.push(parse_scalar(c, &ptr(&rat, j))?);
        }
        out.push(r);
    }
    Ok(CMatrix::from_rows(&out))
}

fn get_usize(doc: &Value, key: &str) -> Result<usize> {
    doc.get(key)
        .and_then(|v| v.as_u64())
        .map(|v| v as usize)
        .ok_or_else(|| Error::input(format!("/{key}"), "expected a non-negative integer"))
}

/// Parse and validate the JSON system document.
pub fn parse_spec(document: &[u8]) -> Result<SystemSpec> {
    let doc: Value = serde_json::from_slice(document).map_err(|e| Error::input("", format!("malformed JSON: {e}")))?;
    let kind = match doc.get("kind").and_then(|v| v.as_str()) {
        Some("ode") => Kind::Ode,
        Some("total") => Kind::Total,
        Some("rlinear") => Kind::Rlinear,
        _ => return Err(Error::input("/kind", "expected \"ode\", \"total\" or \"rlinear\"")),
    };
    let n = get_usize(&doc, "n")?;
    let m = get_usize(&doc, "m")?;
    if n == 0 || m == 0 {
        return Err(Error::input("/n", "n and m must be positive"));
    }
    if n > 32 || (kind == Kind::Rlinear && 2 * n > 32) {
        return Err(Error::input("/n", "state dimension above 32 is not supported"));
    }
    if kind == Kind::Ode && m != 1 {
        return Err(Error::input("/m", "an ode system has m = 1"));
    }
    let tol = match doc.get("tol") {
        None => DEFAULT_TOL,
        Some(v) => match v.as_f64() {
            Some(t) if t > 0.0 && t.is_finite() => t,
            _ => return Err(Error::input("/tol", "tol must be a positive number")),
        },
    };

    let mut spec = if kind == Kind::Rlinear && doc.get("rlinear_coeffs").is_some() {
        let coeffs = parse_rlinear_coeffs(&doc["rlinear_coeffs"], n, m)?;
        embed_rlinear(n, m, &coeffs)?
    } else {
        let mats = doc.get("matrices").and_then(|v| v.as_array()).ok_or_else(|| Error::input("/matrices", "missing"))?;
        let want = if kind == Kind::Rlinear { 2 * m } else { m };
        let size = if kind == Kind::Rlinear { 2 * n } else { n };
        if mats.len() != want {
            return Err(Error::input("/matrices", format!("expected {want} matrices, found {}", mats.len())));
        }
        let mut ms = Vec::new();
        for (j, v) in mats.iter().enumerate() {
            let a = parse_matrix(v, &ptr("/matrices", j))?;
            if a.rows() != size || a.cols() != size {
                return Err(Error::input(ptr("/matrices", j), format!("expected {size}x{size}")));
            }
            ms.push(a);
        }
        if kind == Kind::Rlinear {
            SystemSpec { kind, n, m, matrices: ms, forcing: None, field: Field::Complex, tol }
        } else {
            SystemSpec::new(kind, ms, None)?
        }
    };
    spec.tol = tol;

    if let Some(f) = doc.get("forcing") {
        let dirs = f.as_array().ok_or_else(|| Error::input("/forcing", "expected an array per direction"))?;
        let mut out = Vec::new();
        for (j, d) in dirs.iter().enumerate() {
            let comps = d.as_array().ok_or_else(|| Error::input(ptr("/forcing", j), "expected an array"))?;
            let mut row = Vec::new();
            for (i, c) in comps.iter().enumerate() {
                let at = format!("/forcing/{j}/{i}");
                let s = c.as_str().ok_or_else(|| Error::input(&at, "expected an expression string"))?;
                row.push(parse(s).map_err(|e| match e {
                    Error::Input { msg, .. } => Error::input(&at, msg),
                    other => other,
                })?);
            }
            out.push(row);
        }
        spec.forcing = Some(out);
        spec.check_forcing()?;
    }
    Ok(spec)
}

fn parse_rlinear_coeffs(v: &Value, n: usize, m: usize) -> Result<Vec<Vec<Vec<C64>>>> {
    let at = "/rlinear_coeffs";
    let rows = v.as_array().filter(|a| a.len() == n).ok_or_else(|| Error::input(at, format!("expected {n} entries")))?;
    let mut out = Vec::new();
    for (tau, r) in rows.iter().enumerate() {
        let rat = ptr(at, tau);
        let ks = r.as_array().filter(|a| a.len() == 2 * m).ok_or_else(|| Error::input(&rat, format!("expected {} entries", 2 * m)))?;
        let mut kk = Vec::new();
        for (k, row) in ks.iter().enumerate() {
            let kat = ptr(&rat, k);
            let cs = row.as_array().filter(|a| a.len() == 2 * n).ok_or_else(|| Error::input(&kat, format!("expected {} entries", 2 * n)))?;
            kk.push(cs.iter().enumerate().map(|(rho, c)| parse_scalar(c, &ptr(&kat, rho))).collect::<Result<Vec<_>>>()?);
        }
        out.push(kk);
    }
    Ok(out)
}

/// Build the 2m field matrices over γ = (w, w̄) from coefficients
/// `a[τ][k][ρ]`: dw_τ = Σ_{k<m} (Σ_ρ a[τ][k][ρ] γ_ρ) dz_k + Σ_{k<m} (Σ_ρ a[τ][m+k][ρ] γ_ρ) dz̄_k.
///
/// The operator matrices (transposes) coincide with the 2n×2n matrices A_k
/// acting on coefficient vectors of linear forms νγ.
pub fn embed_rlinear(n: usize, m: usize, a: &[Vec<Vec<C64>>]) -> Result<SystemSpec> {
    if a.len() != n || a.iter().any(|r| r.len() != 2 * m || r.iter().any(|c| c.len() != 2 * n)) {
        return Err(Error::input("/rlinear_coeffs", "coefficient tensor must be n x 2m x 2n"));
    }
    if a.iter().flatten().flatten().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::input("/rlinear_coeffs", "non-finite coefficient"));
    }
    let swap = |rho: usize| if rho < n { rho + n } else { rho - n };
    let mut mats = Vec::new();
    for k in 0..2 * m {
        // partner direction: z_k <-> z̄_k
        let kp = if k < m { k + m } else { k - m };
        let mut g = CMatrix::zeros(2 * n, 2 * n);
        for tau in 0..n {
            for rho in 0..2 * n {
                g[(tau, rho)] = a[tau][k][rho];
                // d w̄_τ along z_k is the conjugate of d w_τ along z̄_k
                g[(n + tau, swap(rho))] = a[tau][kp][rho].conj();
            }
        }
        mats.push(g);
    }
    Ok(SystemSpec { kind: Kind::Rlinear, n, m, matrices: mats, forcing: None, field: Field::Complex, tol: DEFAULT_TOL })
}

#[derive(Debug, Clone, Serialize)]
pub struct SolvabilityVerdict {
    pub solvable: bool,
    pub max_commutator_residual: f64,
    pub offending_pair: Option<(usize, usize)>,
    pub forcing_residual: Option<f64>,
    #[serde(serialize_with = "ser_opt_matrix")]
    pub defect_witness: Option<CMatrix>,
}

fn ser_opt_matrix<S: serde::Serializer>(m: &Option<CMatrix>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match m {
        None => s.serialize_none(),
        Some(m) => {
            let rows: Vec<Vec<[f64; 2]>> =
                (0..m.rows()).map(|i| m.row(i).iter().map(|z| crate::report::c64_pair(*z)).collect()).collect();
            s.serialize_some(&rows)
        }
    }
}

/// Pairwise commutation of the field matrices.
///
/// The witness for the worst pair (j, ζ) is G_ζ G_j - G_j G_ζ, the field
/// matrix of the bracket [p_j, p_ζ] of the direction operators.
pub fn frobenius_check(spec: &SystemSpec, tol: f64) -> SolvabilityVerdict {
    let g = &spec.matrices;
    let mut worst = 0.0;
    let mut pair = None;
    let mut witness = None;
    for j in 0..g.len() {
        for z in j + 1..g.len() {
            let c = g[z].mul(&g[j]).sub(&g[j].mul(&g[z]));
            let res = c.norm_inf() / (1.0 + g[j].norm_inf() * g[z].norm_inf());
            if res > worst {
                worst = res;
                pair = Some((j, z));
                witness = Some(c);
            }
        }
    }
    let solvable = worst <= tol;
    SolvabilityVerdict {
        solvable,
        max_commutator_residual: worst,
        offending_pair: if solvable { None } else { pair },
        forcing_residual: None,
        defect_witness: if solvable { None } else { witness },
    }
}

/// max over the grid and direction pairs of
/// ‖∂_ζ f_j - G_ζ f_j - ∂_j f_ζ + G_j f_ζ‖∞ (central differences).
pub fn forcing_compat_check(spec: &SystemSpec, grid: &[Vec<f64>]) -> Result<f64> {
    if spec.forcing.is_none() {
        return Err(Error::input("/forcing", "system has no forcing"));
    }
    let d = spec.directions();
    let g = &spec.matrices;
    let mut worst: f64 = 0.0;
    for t in grid {
        if t.len() != spec.time_dims() {
            return Err(Error::input("", "grid point has the wrong number of time coordinates"));
        }
        let f: Vec<Vec<C64>> = (0..d).map(|j| spec.forcing_at(j, t)).collect::<Result<_>>()?;
        // partial of f_j along t_k
        let partial = |j: usize, k: usize| -> Result<Vec<C64>> {
            let h = 1e-6 * (1.0 + t[k].abs());
            let mut tp = t.clone();
            let mut tm = t.clone();
            tp[k] += h;
            tm[k] -= h;
            let (a, b) = (spec.forcing_at(j, &tp)?, spec.forcing_at(j, &tm)?);
            Ok(a.iter().zip(&b).map(|(x, y)| (x - y) / (2.0 * h)).collect())
        };
        for j in 0..d {
            for z in j + 1..d {
                let dz_fj = partial(j, z)?;
                let dj_fz = partial(z, j)?;
                let gz_fj = g[z].mul_vec(&f[j]);
                let gj_fz = g[j].mul_vec(&f[z]);
                let r: Vec<C64> = (0..spec.dim()).map(|i| dz_fj[i] - gz_fj[i] - dj_fz[i] + gj_fz[i]).collect();
                worst = worst.max(norm_inf_vec(&r));
            }
        }
    }
    Ok(worst)
}

/// uniform grid over [lo, hi]^k with `per_axis` points per axis
pub fn uniform_grid(k: usize, lo: f64, hi: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..per_axis {
                let v = if per_axis == 1 { lo } else { lo + (hi - lo) * i as f64 / (per_axis - 1) as f64 };
                let mut q = p.clone();
                q.push(v);
                next.push(q);
            }
        }
        out = next;
    }
    out
}
