//! Multiplicative Wiener–Hopf factorization q = q⁻q⁺ of order-zero symbols and the
//! inverse of the truncated operator r⁺OP(q)e⁺.
//!
//! Frequencies are compactified by the Cayley map ξ = ic(1+z)/(1−z), so that
//! z = (ξ − ic)/(ξ + ic) runs over the unit circle and ξ = ∞ sits at z = 1. A symbol
//! analytic and bounded in Im ξ < 0 becomes analytic in |z| > 1, i.e. a series in
//! nonpositive powers of z; minus symbols use the nonnegative powers.

use crate::error::{Error, ErrorKind, Result};
use crate::fourierops::{apply_multiplier, fft, truncate_restrict, GridFunction, MultiplierSpec, Side, SupportSide};
use crate::symcore::BoundarySymbol;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

const MODULE: &str = "wienerhopf";
const MIN_MODES: usize = 1024;
const MAX_MODES: usize = 1 << 16;
pub const TAIL_TOL: f64 = 1e-8;

/// n points z_k = e^{iθ_k}, θ_k = 2π(k + ½)/n, on the unit circle paired with ξ_k = −c·cot(θ_k/2).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CompactifiedGrid {
    pub n_modes: usize,
    pub scale: f64,
}

impl CompactifiedGrid {
    pub fn new(n_modes: usize, scale: f64) -> Result<Self> {
        if n_modes < 8 || !n_modes.is_power_of_two() {
            return Err(Error::invalid(MODULE, "grid", format!("n_modes = {n_modes} must be a power of two ≥ 8")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::invalid(MODULE, "grid", format!("scale c = {scale} must be positive")));
        }
        Ok(CompactifiedGrid { n_modes, scale })
    }

    pub fn theta(&self, k: usize) -> f64 {
        2.0 * PI * (k as f64 + 0.5) / self.n_modes as f64
    }

    pub fn xi(&self, k: usize) -> f64 {
        xi_of_theta(self.theta(k), self.scale)
    }

    pub fn z_of(&self, xi: f64) -> C64 {
        C64::new(xi, -self.scale) / C64::new(xi, self.scale)
    }
}

fn xi_of_theta(theta: f64, c: f64) -> f64 {
    -c / (theta / 2.0).tan()
}

/// Order-zero symbol ξ ↦ q(ξ) with a Cayley scale attached.
#[derive(Clone)]
pub struct OrderZeroSymbol {
    eval: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    pub label: String,
    pub scale: f64,
}

impl std::fmt::Debug for OrderZeroSymbol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "OrderZeroSymbol({}, c = {})", self.label, self.scale)
    }
}

impl OrderZeroSymbol {
    pub fn new(label: impl Into<String>, scale: f64, f: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        OrderZeroSymbol { eval: Arc::new(f), label: label.into(), scale }
    }

    pub fn eval(&self, xi: f64) -> C64 {
        (self.eval)(xi)
    }

    pub fn sample(&self, grid: CompactifiedGrid) -> Vec<C64> {
        (0..grid.n_modes).map(|k| self.eval(grid.xi(k))).collect()
    }

    pub fn mul(&self, o: &OrderZeroSymbol) -> OrderZeroSymbol {
        let (a, b) = (self.eval.clone(), o.eval.clone());
        OrderZeroSymbol { eval: Arc::new(move |x| a(x) * b(x)), label: format!("{}*{}", self.label, o.label), scale: self.scale }
    }

    pub fn multiplier(&self) -> MultiplierSpec {
        let f = self.eval.clone();
        MultiplierSpec::new(C64::new(0.0, 0.0), Side::Neutral, self.label.clone(), move |x| f(x))
    }

    /// True when q ≡ 1 on a fine sample (the factorization is then trivial).
    pub fn is_identity(&self) -> bool {
        let g = CompactifiedGrid { n_modes: 256, scale: self.scale };
        self.sample(g).iter().all(|v| (v - C64::new(1.0, 0.0)).norm() < 1e-13)
    }
}

/// q(ξ) = p(σ, ξ)(σ − iξ)^{μ₀−m}(σ + iξ)^{−μ₀}, checked for zero winding.
pub fn normalize_symbol(p: &BoundarySymbol, mu0: C64, sigma: f64) -> Result<OrderZeroSymbol> {
    if !(sigma > 0.0) {
        return Err(Error::invalid(MODULE, "normalize_symbol", format!("sigma = {sigma} must be positive")));
    }
    let pp = p.clone();
    let em = mu0 - p.order_m;
    let q = OrderZeroSymbol::new(format!("normalized({})", p.label), sigma, move |xi| {
        let a = pp.eval(sigma, xi);
        let lm = C64::new(sigma, -xi).ln();
        let lp = C64::new(sigma, xi).ln();
        a * (em * lm - mu0 * lp).exp()
    });
    let w = winding_real(&q)?;
    if (w - w.round()).abs() > 1e-6 || w.round() != 0.0 {
        return Err(Error::new(
            MODULE,
            "normalize_symbol",
            ErrorKind::Winding,
            format!("normalization did not remove winding (winding {w:.6}); check mu0"),
        ));
    }
    Ok(q)
}

fn check_samples(vals: &[C64], grid: CompactifiedGrid, op: &'static str) -> Result<()> {
    for (k, v) in vals.iter().enumerate() {
        if !(v.re.is_finite() && v.im.is_finite()) || v.norm() < 1e-300 {
            return Err(Error::new(
                MODULE,
                op,
                ErrorKind::NotElliptic,
                format!("symbol vanishes or is not finite at xi = {}", grid.xi(k)),
            ));
        }
    }
    Ok(())
}

/// Argument increment of q along the real line in units of 2π, closed through ξ = ∞ when
/// the two limits agree. The grid is doubled until two successive counts agree.
pub fn winding_real(q: &OrderZeroSymbol) -> Result<f64> {
    let r = 1e9 * q.scale;
    let (lo, hi) = (q.eval(-r), q.eval(r));
    let mut n = 256;
    let mut prev: Option<f64> = None;
    loop {
        let g = CompactifiedGrid::new(n, q.scale)?;
        let mut v = Vec::with_capacity(n + 2);
        v.push(lo);
        v.extend(q.sample(g));
        v.push(hi);
        check_samples(&v[1..n + 1], g, "winding")?;
        let w = v.windows(2).map(|p| (p[1] / p[0]).arg()).sum::<f64>() / (2.0 * PI);
        let closed = if (hi - lo).norm() <= 1e-6 * hi.norm().max(lo.norm()) { w.round() } else { w };
        if let Some(p) = prev {
            if (closed - p).abs() < 1e-6 || n >= MAX_MODES {
                return Ok(closed);
            }
        }
        prev = Some(closed);
        n *= 2;
    }
}

/// Integer winding number; a discontinuity at ξ = ±∞ shows up as a non-integer count.
pub fn winding(q: &OrderZeroSymbol) -> Result<i64> {
    let w = winding_real(q)?;
    if (w - w.round()).abs() > 1e-6 {
        return Err(Error::new(
            MODULE,
            "winding",
            ErrorKind::Winding,
            format!("q has different limits at xi = ±inf (argument sum {w:.6})"),
        ));
    }
    Ok(w.round() as i64)
}

/// Circle Fourier coefficients a_n, n ∈ [−N/2, N/2), stored at index n mod N.
fn circle_coeffs(vals: &[C64]) -> Vec<C64> {
    let n = vals.len();
    let mut buf = vals.to_vec();
    fft::raw(&mut buf, true);
    for (j, b) in buf.iter_mut().enumerate() {
        let nn = signed(j, n);
        *b *= C64::from_polar(1.0 / n as f64, -PI * nn as f64 / n as f64);
    }
    buf
}

fn circle_values(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len();
    let mut buf: Vec<C64> = coeffs
        .iter()
        .enumerate()
        .map(|(j, a)| a * C64::from_polar(1.0, PI * signed(j, n) as f64 / n as f64))
        .collect();
    fft::raw(&mut buf, false);
    buf
}

fn signed(j: usize, n: usize) -> i64 {
    if j < n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn tail_mass(coeffs: &[C64]) -> f64 {
    let n = coeffs.len();
    let total: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return 0.0;
    }
    let tail: f64 = coeffs
        .iter()
        .enumerate()
        .filter(|(j, _)| signed(*j, n).unsigned_abs() as usize > n / 4)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    // absolute floor: log q at roundoff level counts as resolved
    (tail / total.max(1.0)).sqrt()
}

/// Additive split h = h₊ + h₋ on the circle; h₊ holds the nonpositive powers of z,
/// h₋ the nonnegative ones, and the z⁰ coefficient is shared evenly.
#[derive(Clone, Debug)]
pub struct CauchySplit {
    pub grid: CompactifiedGrid,
    pub h_plus: Vec<C64>,
    pub h_minus: Vec<C64>,
    pub mean: C64,
    /// Coefficients of h₊ in powers w = 1/z (index m ↔ z^{−m}).
    pub plus_series: Vec<C64>,
    /// Coefficients of h₋ in powers of z.
    pub minus_series: Vec<C64>,
    pub tail_mass: f64,
    pub warning: Option<String>,
}

pub fn cauchy_split(grid: CompactifiedGrid, h: &[C64]) -> Result<CauchySplit> {
    if h.len() != grid.n_modes {
        return Err(Error::invalid(MODULE, "cauchy_split", "sample count differs from n_modes"));
    }
    let a = circle_coeffs(h);
    let n = grid.n_modes;
    let tail = tail_mass(&a);
    let mut plus = vec![C64::new(0.0, 0.0); n];
    let mut minus = vec![C64::new(0.0, 0.0); n];
    for (j, c) in a.iter().enumerate() {
        match signed(j, n) {
            0 => {
                plus[j] = 0.5 * c;
                minus[j] = 0.5 * c;
            }
            s if s < 0 => plus[j] = *c,
            _ => minus[j] = *c,
        }
    }
    let plus_series = (0..n / 2).map(|m| plus[(n - m) % n]).collect();
    let minus_series = (0..n / 2).map(|m| minus[m]).collect();
    Ok(CauchySplit {
        grid,
        h_plus: circle_values(&plus),
        h_minus: circle_values(&minus),
        mean: a[0],
        plus_series,
        minus_series,
        tail_mass: tail,
        warning: (tail > TAIL_TOL).then(|| format!("h insufficiently smooth on compactification (tail mass {tail:.2e})")),
    })
}

/// Horner evaluation of Σ c_m w^m.
fn horner(c: &[C64], w: C64) -> C64 {
    c.iter().rev().fold(C64::new(0.0, 0.0), |acc, x| acc * w + x)
}

fn trim(mut c: Vec<C64>) -> Vec<C64> {
    let max = c.iter().map(|x| x.norm()).fold(0.0, f64::max);
    while c.len() > 1 && c.last().map_or(false, |x| x.norm() <= (1e-18 * max).max(1e-17)) {
        c.pop();
    }
    c
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct WienerHopfFactors {
    pub grid: CompactifiedGrid,
    #[serde(skip)]
    pub q_plus: Vec<C64>,
    #[serde(skip)]
    pub q_minus: Vec<C64>,
    pub winding: i64,
    /// sup |q − q⁻q⁺| on the interlaced points θ = 2πk/n.
    pub recon_residual: f64,
    /// Relative circle-coefficient mass of log q⁺ (log q⁻) on the wrong side.
    pub support_leakage: f64,
    pub tail_mass: f64,
    #[serde(skip)]
    log_plus: Arc<Vec<C64>>,
    #[serde(skip)]
    log_minus: Arc<Vec<C64>>,
    pub warnings: Vec<String>,
}

impl WienerHopfFactors {
    pub fn eval_plus(&self, xi: f64) -> C64 {
        horner(&self.log_plus, self.grid.z_of(xi).conj()).exp()
    }

    pub fn eval_minus(&self, xi: f64) -> C64 {
        horner(&self.log_minus, self.grid.z_of(xi)).exp()
    }

    /// q⁺ (power = 1) or 1/q⁺ (power = −1) as a plus multiplier.
    pub fn plus_multiplier(&self, power: f64) -> MultiplierSpec {
        let (c, g) = (self.log_plus.clone(), self.grid);
        MultiplierSpec::new(C64::new(0.0, 0.0), Side::Plus, "q+", move |xi| (power * horner(&c, g.z_of(xi).conj())).exp())
    }

    pub fn minus_multiplier(&self, power: f64) -> MultiplierSpec {
        let (c, g) = (self.log_minus.clone(), self.grid);
        MultiplierSpec::new(C64::new(0.0, 0.0), Side::Minus, "q-", move |xi| (power * horner(&c, g.z_of(xi))).exp())
    }

    pub fn is_identity(&self) -> bool {
        self.log_plus.iter().chain(self.log_minus.iter()).all(|c| c.norm() < 1e-14)
    }

    /// CSV with columns xi, re q+, im q+, re q-, im q-.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "xi,re_qplus,im_qplus,re_qminus,im_qminus")?;
        for k in 0..self.grid.n_modes {
            let (a, b) = (self.q_plus[k], self.q_minus[k]);
            writeln!(w, "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}", self.grid.xi(k), a.re, a.im, b.re, b.im)?;
        }
        Ok(())
    }
}

fn unwrapped_log(vals: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(vals.len());
    let mut prev_im = 0.0;
    for (k, v) in vals.iter().enumerate() {
        let mut l = v.ln();
        if k > 0 {
            l.im += 2.0 * PI * ((prev_im - l.im) / (2.0 * PI)).round();
        }
        prev_im = l.im;
        out.push(l);
    }
    out
}

/// q = q⁻q⁺ with q⁺(∞) = 1. The circle resolution is doubled until the coefficient tail of
/// log q falls below 1e−8 or 2^16 modes are reached.
pub fn factorize(q: &OrderZeroSymbol) -> Result<WienerHopfFactors> {
    let w = winding_real(q)?;
    if (w - w.round()).abs() > 1e-6 || w.round() != 0.0 {
        return Err(Error::new(
            MODULE,
            "factorize",
            ErrorKind::Winding,
            format!("q has winding {w:.6}; renormalize with normalize_symbol"),
        ));
    }
    let mut n = MIN_MODES;
    let (grid, coeffs, tail) = loop {
        let grid = CompactifiedGrid::new(n, q.scale)?;
        let vals = q.sample(grid);
        check_samples(&vals, grid, "factorize")?;
        let a = circle_coeffs(&unwrapped_log(&vals));
        let t = tail_mass(&a);
        if t <= TAIL_TOL || n >= MAX_MODES {
            break (grid, a, t);
        }
        n *= 2;
    };
    let mut warnings = Vec::new();
    if tail > TAIL_TOL {
        warnings.push(format!("log q insufficiently smooth on compactification (tail mass {tail:.2e})"));
    }
    let mut lp: Vec<C64> = (0..n / 2).map(|m| coeffs[(n - m) % n]).collect();
    let mut lm: Vec<C64> = (0..n / 2).map(|m| coeffs[m]).collect();
    lp[0] = 0.5 * coeffs[0];
    lm[0] = 0.5 * coeffs[0];
    // q⁺(∞) = 1: ξ = ∞ is z = 1
    let at_inf: C64 = lp.iter().sum();
    lp[0] -= at_inf;
    lm[0] += at_inf;
    let mut full_p = vec![C64::new(0.0, 0.0); n];
    let mut full_m = vec![C64::new(0.0, 0.0); n];
    for m in 0..n / 2 {
        full_p[(n - m) % n] = lp[m];
        full_m[m] = lm[m];
    }
    let q_plus: Vec<C64> = circle_values(&full_p).iter().map(|v| v.exp()).collect();
    let q_minus: Vec<C64> = circle_values(&full_m).iter().map(|v| v.exp()).collect();
    let log_plus = Arc::new(trim(lp));
    let log_minus = Arc::new(trim(lm));

    let leak = |vals: &[C64], wrong_positive: bool| -> f64 {
        let a = circle_coeffs(&unwrapped_log(vals));
        let total: f64 = a.iter().map(|c| c.norm_sqr()).sum();
        let bad: f64 = a
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let s = signed(*j, n);
                if wrong_positive {
                    s > 0
                } else {
                    s < 0
                }
            })
            .map(|(_, c)| c.norm_sqr())
            .sum();
        // same absolute floor as the tail mass
        (bad / total.max(1.0)).sqrt()
    };
    let support_leakage = leak(&q_plus, true).max(leak(&q_minus, false));

    let mut f = WienerHopfFactors {
        grid,
        q_plus,
        q_minus,
        winding: 0,
        recon_residual: 0.0,
        support_leakage,
        tail_mass: tail,
        log_plus,
        log_minus,
        warnings,
    };
    let mut res: f64 = 0.0;
    for k in 1..n {
        let xi = xi_of_theta(2.0 * PI * k as f64 / n as f64, q.scale);
        res = res.max((q.eval(xi) - f.eval_plus(xi) * f.eval_minus(xi)).norm());
    }
    f.recon_residual = res;
    Ok(f)
}

fn half_line_input(g: &GridFunction, op: &'static str) -> Result<GridFunction> {
    if g.support_side == SupportSide::Nonpos {
        return Err(Error::invalid(MODULE, op, "input must be supported on x >= 0"));
    }
    Ok(truncate_restrict(g))
}

/// r⁺OP(q)e⁺g.
pub fn apply_truncated(q: &OrderZeroSymbol, g: &GridFunction) -> Result<GridFunction> {
    let e = half_line_input(g, "apply_truncated")?;
    Ok(truncate_restrict(&apply_multiplier(&q.multiplier(), &e)?))
}

/// ṽ = r⁺OP(1/q⁺)e⁺ r⁺OP(1/q⁻)e⁺ g, the inverse of the truncated operator r⁺OP(q)e⁺.
pub fn invert_truncated(factors: &WienerHopfFactors, g: &GridFunction) -> Result<GridFunction> {
    let e = half_line_input(g, "invert_truncated")?;
    if factors.is_identity() {
        return Ok(e);
    }
    let w = truncate_restrict(&apply_multiplier(&factors.minus_multiplier(-1.0), &e)?);
    let v = apply_multiplier(&factors.plus_multiplier(-1.0), &w)?;
    Ok(truncate_restrict(&v))
}
