//! Fractional Laplacians and fractional powers A^a restricted to the interval (−1, 1).
//!
//! Operators are dense matrices on the interior nodes x_j = −1 + jh, j = 1..N−1, h = 2/N,
//! realizing r⁺P_a e⁺ for a discrete P_a on an enclosing box (−L_box, L_box).

use crate::error::{Error, ErrorKind, Result};
use crate::fit::lstsq;
use crate::fourierops::fft;
use crate::quad::tanh_sinh;
use crate::special::gamma;
use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;

const MODULE: &str = "fracdomain";
pub const DEFAULT_L_BOX: f64 = 256.0;
pub const VARIABLE_L_BOX: f64 = 2.0;
pub const MIN_N: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    BoxFft,
    EigenPower,
}

/// How the matrix was built.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Construction {
    /// |ξ|^{2a} on the periodic box of half-length `l_box` sampled with the interval spacing.
    BoxFft { l_box: f64 },
    /// Power of the Dirichlet second difference on the box.
    EigenPower { l_box: f64 },
    /// Power of −∂² + c(x) on the box, by dense eigendecomposition.
    Variable { l_box: f64 },
}

impl Construction {
    fn code(&self) -> u8 {
        match self {
            Construction::BoxFft { .. } => 0,
            Construction::EigenPower { .. } => 1,
            Construction::Variable { .. } => 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntervalOperator {
    pub a: f64,
    pub n: usize,
    pub h: f64,
    pub nodes: Vec<f64>,
    pub matrix: Mat<f64>,
    pub construction: Construction,
}

impl IntervalOperator {
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let m = self.dim();
        (0..m).map(|i| (0..m).map(|j| self.matrix[(i, j)] * u[j]).sum()).collect()
    }

    pub fn symmetry_defect(&self) -> f64 {
        let m = self.dim();
        let mut d: f64 = 0.0;
        for i in 0..m {
            for j in 0..i {
                d = d.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        d
    }

    /// Binary dump: b"MTRI", N (u64), a (f64), method code (u8), dim (u64), then the
    /// matrix row-major as little-endian f64.
    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        let m = self.dim();
        w.write_all(b"MTRI")?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.a.to_le_bytes())?;
        w.write_all(&[self.construction.code()])?;
        w.write_all(&(m as u64).to_le_bytes())?;
        let mut row = Vec::with_capacity(8 * m);
        for i in 0..m {
            row.clear();
            for j in 0..m {
                row.extend_from_slice(&self.matrix[(i, j)].to_le_bytes());
            }
            w.write_all(&row)?;
        }
        Ok(())
    }
}

fn check_power(a: f64, op: &'static str) -> Result<()> {
    if a > 0.0 && a < 2.0 {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, op, format!("a = {a} outside (0, 2)")))
    }
}

/// Number of steps h in `len`, or an error if `len` is not on the grid.
fn grid_steps(len: f64, h: f64, op: &'static str) -> Result<usize> {
    let k = (len / h).round();
    if k < 1.0 || (k * h - len).abs() > 1e-9 * len.max(1.0) {
        return Err(Error::invalid(MODULE, op, format!("length {len} is not a multiple of h = {h}")));
    }
    Ok(k as usize)
}

fn check_grid(n: usize, op: &'static str) -> Result<f64> {
    if n < MIN_N || n % 2 != 0 {
        return Err(Error::invalid(MODULE, op, format!("N = {n} must be even and at least {MIN_N}")));
    }
    Ok(2.0 / n as f64)
}

pub fn interval_nodes(n: usize) -> Vec<f64> {
    let h = 2.0 / n as f64;
    (1..n).map(|j| -1.0 + j as f64 * h).collect()
}

/// (1/n) Σ_k s_k e^{2πijk/n}, real part, for j = 0..n.
fn cosine_sums(mut spec: Vec<C64>) -> Vec<f64> {
    let n = spec.len() as f64;
    fft::raw(&mut spec, false);
    spec.iter().map(|v| v.re / n).collect()
}

pub fn assemble_fraclap(a: f64, n: usize, method: Method) -> Result<IntervalOperator> {
    assemble_fraclap_with(a, n, method, DEFAULT_L_BOX)
}

pub fn assemble_fraclap_with(a: f64, n: usize, method: Method, l_box: f64) -> Result<IntervalOperator> {
    const OP: &str = "assemble_fraclap";
    check_power(a, OP)?;
    let h = check_grid(n, OP)?;
    if l_box < 1.0 + h {
        return Err(Error::invalid(MODULE, OP, format!("L_box = {l_box} does not contain the interval")));
    }
    let steps = grid_steps(2.0 * l_box, h, OP)?;
    let m = n - 1;
    let (matrix, construction) = match method {
        Method::BoxFft => {
            let spec = (0..steps)
                .map(|k| {
                    let kk = if k <= steps / 2 { k as f64 } else { k as f64 - steps as f64 };
                    C64::new((2.0 * PI * kk / (steps as f64 * h)).abs().powf(2.0 * a), 0.0)
                })
                .collect();
            let c = cosine_sums(spec);
            (Mat::from_fn(m, m, |i, j| c[i.abs_diff(j)]), Construction::BoxFft { l_box })
        }
        Method::EigenPower => {
            // box Dirichlet nodes −L + ih, i = 1..P−1; sine-transform closed form of A^a
            let p = steps;
            let two_p = 2 * p;
            let spec = (0..two_p)
                .map(|k| {
                    let s = (PI * k as f64 / two_p as f64).sin();
                    C64::new((4.0 / (h * h) * s * s).powf(a), 0.0)
                })
                .collect();
            let r = cosine_sums(spec);
            let i0 = grid_steps(l_box - 1.0, h, OP)?;
            let mat = Mat::from_fn(m, m, |i, j| {
                let s = (2 * i0 + i + j + 2) % two_p;
                r[i.abs_diff(j)] - r[s]
            });
            (mat, Construction::EigenPower { l_box })
        }
    };
    Ok(IntervalOperator { a, n, h, nodes: interval_nodes(n), matrix, construction })
}

/// r⁺A^a e⁺ for A = −∂² + c(x) discretized by second differences on (−L_box, L_box).
pub fn fracpow_variable(c: impl Fn(f64) -> f64, a: f64, n: usize) -> Result<IntervalOperator> {
    fracpow_variable_with(c, a, n, VARIABLE_L_BOX)
}

pub fn fracpow_variable_with(c: impl Fn(f64) -> f64, a: f64, n: usize, l_box: f64) -> Result<IntervalOperator> {
    const OP: &str = "fracpow_variable";
    check_power(a, OP)?;
    let h = check_grid(n, OP)?;
    if l_box < 1.0 + h {
        return Err(Error::invalid(MODULE, OP, format!("L_box = {l_box} does not contain the interval")));
    }
    let p = grid_steps(2.0 * l_box, h, OP)?;
    let i0 = grid_steps(l_box - 1.0, h, OP)?;
    let mb = p - 1;
    let inv_h2 = 1.0 / (h * h);
    let mut cvals = Vec::with_capacity(mb);
    for i in 0..mb {
        let x = -l_box + (i + 1) as f64 * h;
        let v = c(x);
        if !v.is_finite() {
            return Err(Error::invalid(MODULE, OP, format!("c({x}) is not finite")));
        }
        cvals.push(v);
    }
    let ab = Mat::from_fn(mb, mb, |i, j| {
        if i == j {
            2.0 * inv_h2 + cvals[i]
        } else if i.abs_diff(j) == 1 {
            -inv_h2
        } else {
            0.0
        }
    });
    let eig = ab
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::new(MODULE, OP, ErrorKind::Convergence, format!("eigendecomposition failed: {e:?}")))?;
    let w: Vec<f64> = (0..mb).map(|k| eig.S().column_vector()[k]).collect();
    let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
    if wmin <= 0.0 {
        return Err(Error::new(
            MODULE,
            OP,
            ErrorKind::Singular,
            format!("discretization is not positive definite (smallest eigenvalue {wmin:.3e})"),
        ));
    }
    let v = eig.U();
    let m = n - 1;
    let rows = Mat::from_fn(m, mb, |i, k| v[(i0 + i, k)]);
    let scaled = Mat::from_fn(m, mb, |i, k| rows[(i, k)] * w[k].powf(a));
    let prod = &scaled * rows.transpose();
    // symmetrize away the roundoff of the product
    let matrix = Mat::from_fn(m, m, |i, j| 0.5 * (prod[(i, j)] + prod[(j, i)]));
    Ok(IntervalOperator { a, n, h, nodes: interval_nodes(n), matrix, construction: Construction::Variable { l_box } })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Left,
    Right,
    Both,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExponentFit {
    pub alpha_hat: f64,
    pub window: (f64, f64),
    /// Max deviation of the fitted log|u| from the data.
    pub fit_residual: f64,
    pub side: Endpoint,
}

pub fn default_window(h: f64) -> (f64, f64) {
    (20.0 * h, 0.1)
}

/// Slope α of log|u| ≈ α log d + c + βd over the window, d the distance to the endpoint.
/// The linear term absorbs the first smooth correction factor (1 + O(d)).
pub fn fit_boundary_exponent(
    nodes: &[f64],
    u: &[f64],
    side: Endpoint,
    window: Option<(f64, f64)>,
) -> Result<ExponentFit> {
    const OP: &str = "fit_boundary_exponent";
    if nodes.len() != u.len() || nodes.len() < 3 {
        return Err(Error::invalid(MODULE, OP, "nodes and values must have equal length"));
    }
    let h = nodes[1] - nodes[0];
    let (lo, hi) = window.unwrap_or_else(|| default_window(h));
    if !(lo > 0.0 && hi > lo && hi < 0.25) {
        return Err(Error::invalid(MODULE, OP, format!("window [{lo}, {hi}] not strictly inside (0, 0.25)")));
    }
    let mut samples = Vec::new();
    let sides: &[Endpoint] = match side {
        Endpoint::Both => &[Endpoint::Left, Endpoint::Right],
        Endpoint::Left => &[Endpoint::Left],
        Endpoint::Right => &[Endpoint::Right],
    };
    for s in sides {
        let mut sign = 0.0;
        for (&x, &v) in nodes.iter().zip(u) {
            let d = if *s == Endpoint::Left { x + 1.0 } else { 1.0 - x };
            if d < lo - 1e-12 || d > hi + 1e-12 {
                continue;
            }
            if v == 0.0 || (sign != 0.0 && v.signum() != sign) {
                return Err(Error::invalid(MODULE, OP, "exponent fit invalid across zeros"));
            }
            sign = v.signum();
            samples.push((d, v.abs()));
        }
    }
    if samples.len() < 4 {
        return Err(Error::invalid(MODULE, OP, format!("only {} samples in the window", samples.len())));
    }
    let design: Vec<Vec<f64>> = samples.iter().map(|&(d, _)| vec![d.ln(), 1.0, d]).collect();
    let y: Vec<C64> = samples.iter().map(|&(_, v)| C64::new(v.ln(), 0.0)).collect();
    let (coef, res) = lstsq(&design, &y);
    Ok(ExponentFit { alpha_hat: coef[0].re, window: (lo, hi), fit_residual: res, side })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryTraces {
    pub target: (f64, f64),
    /// Γ(a)·lim d^{1−a}u read off the solution built with layer coefficients φ/Γ(a).
    pub uncalibrated: (f64, f64),
    /// Same functional on the returned solution.
    pub recovered: (f64, f64),
    pub layer_coefficients: (f64, f64),
}

#[derive(Clone, Debug, Serialize)]
pub struct IntervalSolveReport {
    pub nodes: Vec<f64>,
    pub u: Vec<f64>,
    /// max |Mu − f| / max(‖f‖∞, tiny) over all nodes, for the dense solve.
    pub residual: f64,
    /// max |Mu − f| on |x| ≤ 1/2 with the sampled solution, nonhomogeneous case only.
    pub interior_residual: Option<f64>,
    pub left: Option<ExponentFit>,
    pub right: Option<ExponentFit>,
    pub traces: Option<BoundaryTraces>,
    pub warnings: Vec<String>,
}

struct Factored {
    llt: faer::linalg::solvers::Llt<f64>,
}

impl Factored {
    fn new(op: &IntervalOperator, name: &'static str) -> Result<Self> {
        let llt = op.matrix.llt(Side::Lower).map_err(|_| {
            Error::new(MODULE, name, ErrorKind::Singular, "matrix not positive definite; the operator may have a kernel")
        })?;
        Ok(Factored { llt })
    }

    fn solve(&self, f: &[f64]) -> Vec<f64> {
        let b = Mat::from_fn(f.len(), 1, |i, _| f[i]);
        let x = self.llt.solve(&b);
        (0..f.len()).map(|i| x[(i, 0)]).collect()
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn fits(op: &IntervalOperator, u: &[f64], warnings: &mut Vec<String>) -> (Option<ExponentFit>, Option<ExponentFit>) {
    let mut one = |side| match fit_boundary_exponent(&op.nodes, u, side, None) {
        Ok(f) => Some(f),
        Err(e) => {
            warnings.push(format!("{side:?} exponent fit: {}", e.message));
            None
        }
    };
    let l = one(Endpoint::Left);
    let r = one(Endpoint::Right);
    (l, r)
}

fn check_rhs(op: &IntervalOperator, f: &[f64], name: &'static str) -> Result<()> {
    if f.len() != op.dim() {
        return Err(Error::invalid(MODULE, name, format!("f has {} values, expected {}", f.len(), op.dim())));
    }
    Ok(())
}

pub fn solve_dirichlet_homogeneous(op: &IntervalOperator, f: &[f64]) -> Result<IntervalSolveReport> {
    const OP: &str = "solve_dirichlet_homogeneous";
    check_rhs(op, f, OP)?;
    let fac = Factored::new(op, OP)?;
    let u = fac.solve(f);
    let au = op.apply(&u);
    let err = au.iter().zip(f).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let residual = err / max_abs(f).max(f64::MIN_POSITIVE);
    let mut warnings = Vec::new();
    let (left, right) = fits(op, &u, &mut warnings);
    Ok(IntervalSolveReport {
        nodes: op.nodes.clone(),
        u,
        residual,
        interior_residual: None,
        left,
        right,
        traces: None,
        warnings,
    })
}

/// Cutoff equal to 1 for d ≤ 1/4 and 0 for d ≥ 1/2.
pub fn cutoff(d: f64) -> f64 {
    let t = ((d - 0.25) / 0.25).clamp(0.0, 1.0);
    let s = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let (p, q) = (s(1.0 - t), s(t));
    p / (p + q)
}

/// ζ(d)·d^{a−1} at distance d from the left endpoint, 0 for d ≤ 0.
pub fn boundary_layer(d: f64, a: f64) -> f64 {
    if d <= 0.0 || d >= 0.5 {
        0.0
    } else {
        cutoff(d) * d.powf(a - 1.0)
    }
}

/// K_a = ∫₀^∞ 16 sin⁴(s/2) s^{−1−2a} ds, the normalization of the fourth-difference form of (−Δ)^a.
pub fn fourth_difference_constant(a: f64) -> f64 {
    if (a - 1.0).abs() < 1e-9 {
        return 2.0 * 4f64.ln();
    }
    PI * (4.0 - 4f64.powf(a)) / ((PI * a).sin() * gamma(1.0 + 2.0 * a))
}

/// (−Δ)^a of the left boundary layer at x, from
/// (1/K_a) ∫₀^∞ [v(x+2t) − 4v(x+t) + 6v(x) − 4v(x−t) + v(x−2t)] t^{−1−2a} dt.
pub fn layer_action(x: f64, a: f64) -> f64 {
    let d = x + 1.0;
    let v = |y: f64| boundary_layer(y + 1.0, a);
    let vx = v(x);
    let t_end = 3.0;
    let mut cuts = vec![d / 2.0, d];
    for e in [0.25, 0.5] {
        cuts.extend([e - d, (e - d) / 2.0, d - e, (d - e) / 2.0]);
    }
    let t0 = 1e-3 * d.min(0.5) / 2.0;
    cuts.retain(|&t| t > t0 && t < t_end);
    cuts.push(t0);
    cuts.push(t_end);
    cuts.sort_by(|p, q| p.partial_cmp(q).unwrap());
    cuts.dedup_by(|p, q| (*p - *q).abs() < 1e-14);
    let integrand = |t: f64, _: f64, _: f64| {
        let d4 = v(x + 2.0 * t) - 4.0 * v(x + t) + 6.0 * vx - 4.0 * v(x - t) + v(x - 2.0 * t);
        d4 * t.powf(-1.0 - 2.0 * a)
    };
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += tanh_sinh(integrand, w[0], w[1], 7);
    }
    // beyond t_end only the 6v(x) term survives
    total += 6.0 * vx * t_end.powf(-2.0 * a) / (2.0 * a);
    total / fourth_difference_constant(a)
}

/// Γ(a)·c₀ where u·d^{1−a} ≈ c₀ + c₁d + c₂d² on the default window.
fn weighted_trace(op: &IntervalOperator, u: &[f64], side: Endpoint) -> f64 {
    let (lo, hi) = default_window(op.h);
    let mut design = Vec::new();
    let mut y = Vec::new();
    for (&x, &v) in op.nodes.iter().zip(u) {
        let d = if side == Endpoint::Left { x + 1.0 } else { 1.0 - x };
        if d >= lo - 1e-12 && d <= hi + 1e-12 {
            design.push(vec![1.0, d, d * d]);
            y.push(C64::new(v * d.powf(1.0 - op.a), 0.0));
        }
    }
    let (c, _) = lstsq(&design, &y);
    gamma(op.a) * c[0].re
}

/// u = u₀ + c_L ζ d_L^{a−1} + c_R ζ d_R^{a−1} with r⁺(−Δ)^a u = f; the layer actions are
/// evaluated by quadrature and c is calibrated so that the recovered weighted traces equal φ.
pub fn solve_dirichlet_nonhomogeneous(
    op: &IntervalOperator,
    f: &[f64],
    phi_left: f64,
    phi_right: f64,
) -> Result<IntervalSolveReport> {
    const OP: &str = "solve_dirichlet_nonhomogeneous";
    check_power(op.a, OP)?;
    check_rhs(op, f, OP)?;
    if let Construction::Variable { .. } = op.construction {
        return Err(Error::invalid(MODULE, OP, "layer actions are only available for the fractional Laplacian"));
    }
    if phi_left == 0.0 && phi_right == 0.0 {
        return solve_dirichlet_homogeneous(op, f);
    }
    let a = op.a;
    let m = op.dim();
    let fac = Factored::new(op, OP)?;
    let g_left: Vec<f64> = op.nodes.iter().map(|&x| layer_action(x, a)).collect();
    let lay_left: Vec<f64> = op.nodes.iter().map(|&x| boundary_layer(x + 1.0, a)).collect();
    let u_f = fac.solve(f);
    let corr = fac.solve(&g_left);
    let unit_left: Vec<f64> = (0..m).map(|i| lay_left[i] - corr[i]).collect();
    let unit_right: Vec<f64> = unit_left.iter().rev().cloned().collect();
    let combine = |cl: f64, cr: f64| -> Vec<f64> {
        (0..m).map(|i| u_f[i] + cl * unit_left[i] + cr * unit_right[i]).collect()
    };
    let trace_pair = |u: &[f64]| (weighted_trace(op, u, Endpoint::Left), weighted_trace(op, u, Endpoint::Right));

    let ga = gamma(a);
    let uncalibrated = trace_pair(&combine(phi_left / ga, phi_right / ga));
    let base = trace_pair(&u_f);
    let (ll, rl) = trace_pair(&unit_left);
    let (lr, rr) = trace_pair(&unit_right);
    let det = ll * rr - lr * rl;
    if !det.is_finite() || det.abs() < 1e-8 * (ll * rr).abs().max(1e-300) {
        return Err(Error::new(MODULE, OP, ErrorKind::Singular, "calibration failure: layer traces are degenerate"));
    }
    let (bl, br) = (phi_left - base.0, phi_right - base.1);
    let cl = (bl * rr - lr * br) / det;
    let cr = (ll * br - rl * bl) / det;
    let u = combine(cl, cr);
    let recovered = trace_pair(&u);

    let au = op.apply(&u);
    let mut residual: f64 = 0.0;
    for i in 0..m {
        // exact continuous action of the layers stands in for the sampled one
        let layer_part: f64 = (0..m).map(|j| op.matrix[(i, j)] * (cl * lay_left[j] + cr * lay_left[m - 1 - j])).sum();
        let cont = au[i] - layer_part + cl * g_left[i] + cr * g_left[m - 1 - i];
        residual = residual.max((cont - f[i]).abs());
    }
    let scale = max_abs(f).max(cl.abs().max(cr.abs()) * max_abs(&g_left)).max(f64::MIN_POSITIVE);
    let interior = (0..m)
        .filter(|&i| op.nodes[i].abs() <= 0.5)
        .map(|i| (au[i] - f[i]).abs())
        .fold(0.0, f64::max);
    let mut warnings = Vec::new();
    let (left, right) = fits(op, &u, &mut warnings);
    Ok(IntervalSolveReport {
        nodes: op.nodes.clone(),
        u,
        residual: residual / scale,
        interior_residual: Some(interior),
        left,
        right,
        traces: Some(BoundaryTraces {
            target: (phi_left, phi_right),
            uncalibrated,
            recovered,
            layer_coefficients: (cl, cr),
        }),
        warnings,
    })
}

/// Chebyshev coefficients of a least-squares fit of u on [−1/2, 1/2].
pub fn interior_chebyshev(nodes: &[f64], u: &[f64], degree: usize) -> Vec<f64> {
    let mut design = Vec::new();
    let mut y = Vec::new();
    for (&x, &v) in nodes.iter().zip(u) {
        if x.abs() <= 0.5 {
            let t = 2.0 * x;
            let mut row = vec![1.0, t];
            for k in 2..=degree {
                row.push(2.0 * t * row[k - 1] - row[k - 2]);
            }
            row.truncate(degree + 1);
            design.push(row);
            y.push(C64::new(v, 0.0));
        }
    }
    lstsq(&design, &y).0.iter().map(|c| c.re).collect()
}

/// C(a) = 2^{2a}Γ(a+½)Γ(a+1)/Γ(½), the value of (−Δ)^a(1−x²)₊^a on (−1, 1).
pub fn getoor_constant(a: f64) -> f64 {
    4f64.powf(a) * gamma(a + 0.5) * gamma(a + 1.0) / PI.sqrt()
}
