use super::fft;
use super::grid::{Grid, GridFunction, SupportSide};
use crate::error::{Error, ErrorKind, Result};
use crate::special::{binom, hurwitz_taylor};
use crate::symcore::BoundarySymbol;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };
const ASYMPTOTIC_TERMS: usize = 12;

/// Analyticity class of a multiplier: plus symbols extend to Im ξ < 0 and preserve
/// support in x ≥ 0, minus symbols extend to Im ξ > 0 and preserve support in x ≤ 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
    Neutral,
}

/// How the symbol is sampled on the discrete frequency band.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Discretization {
    /// m(ξ_j) on the band; spectrally accurate for smooth decaying data.
    Truncated,
    /// Σ_p m(ξ_j + pW) over all aliases W = 2π/h, tails summed with Hurwitz zeta.
    /// Exact nodal values of the continuum kernel when applied to the discrete impulse.
    Periodized,
}

/// Expansions m(ξ) ~ Σ_k plus[k] ξ^{γ−k} as ξ → +∞ and Σ_k minus[k] |ξ|^{γ−k} as ξ → −∞.
#[derive(Clone, Debug, PartialEq)]
pub struct Asymptotics {
    pub exponent: C64,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

impl Asymptotics {
    pub fn product(&self, o: &Asymptotics) -> Asymptotics {
        let cauchy = |a: &[C64], b: &[C64]| -> Vec<C64> {
            let n = a.len().min(b.len());
            (0..n).map(|k| (0..=k).map(|i| a[i] * b[k - i]).sum()).collect()
        };
        Asymptotics {
            exponent: self.exponent + o.exponent,
            plus: cauchy(&self.plus, &o.plus),
            minus: cauchy(&self.minus, &o.minus),
        }
    }
}

/// Fourier multiplier ξ ↦ m(ξ) at a fixed tangential mode.
#[derive(Clone)]
pub struct MultiplierSpec {
    eval: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
    pub order: C64,
    pub side: Side,
    pub asymptotics: Option<Asymptotics>,
    pub label: String,
}

impl fmt::Debug for MultiplierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiplierSpec({}, order {}, {:?})", self.label, self.order, self.side)
    }
}

fn cpow(base: C64, e: C64) -> C64 {
    (e * base.ln()).exp()
}

impl MultiplierSpec {
    pub fn new(order: C64, side: Side, label: impl Into<String>, eval: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        MultiplierSpec { eval: Arc::new(eval), order, side, asymptotics: None, label: label.into() }
    }

    pub fn with_asymptotics(mut self, a: Asymptotics) -> Self {
        self.asymptotics = Some(a);
        self
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let mut plus = vec![C64::new(0.0, 0.0); ASYMPTOTIC_TERMS];
        plus[0] = one;
        Self::new(C64::new(0.0, 0.0), Side::Neutral, "1", move |_| one).with_asymptotics(Asymptotics {
            exponent: C64::new(0.0, 0.0),
            plus: plus.clone(),
            minus: plus,
        })
    }

    /// (σ + iξ)^μ, principal branch.
    pub fn chi_plus(mu: C64, sigma: f64) -> Self {
        let e_p = (I * PI * mu / 2.0).exp();
        let e_m = (-I * PI * mu / 2.0).exp();
        let plus = (0..ASYMPTOTIC_TERMS).map(|k| e_p * binom(mu, k) * (-I * sigma).powi(k as i32)).collect();
        let minus = (0..ASYMPTOTIC_TERMS).map(|k| e_m * binom(mu, k) * (I * sigma).powi(k as i32)).collect();
        Self::new(mu, Side::Plus, format!("(sigma+i xi)^{mu}"), move |xi| cpow(C64::new(sigma, xi), mu))
            .with_asymptotics(Asymptotics { exponent: mu, plus, minus })
    }

    /// (σ − iξ)^μ, principal branch.
    pub fn chi_minus(mu: C64, sigma: f64) -> Self {
        let e_p = (I * PI * mu / 2.0).exp();
        let e_m = (-I * PI * mu / 2.0).exp();
        let plus = (0..ASYMPTOTIC_TERMS).map(|k| e_m * binom(mu, k) * (I * sigma).powi(k as i32)).collect();
        let minus = (0..ASYMPTOTIC_TERMS).map(|k| e_p * binom(mu, k) * (-I * sigma).powi(k as i32)).collect();
        Self::new(mu, Side::Minus, format!("(sigma-i xi)^{mu}"), move |xi| cpow(C64::new(sigma, -xi), mu))
            .with_asymptotics(Asymptotics { exponent: mu, plus, minus })
    }

    /// ξ ↦ p(σ, ξ); the expansions at ±∞ come from the σ-Taylor coefficients of p at ξ = ±1.
    pub fn from_symbol(p: &BoundarySymbol, sigma: f64) -> Self {
        let q = p.clone();
        let mut spec = Self::new(p.order_m, Side::Neutral, p.label.clone(), move |xi| q.eval(sigma, xi));
        if let (Some(tp), Some(tm)) = (p.sigma_taylor(1.0, ASYMPTOTIC_TERMS - 1), p.sigma_taylor(-1.0, ASYMPTOTIC_TERMS - 1)) {
            let scale = |t: Vec<C64>| -> Vec<C64> { t.into_iter().enumerate().map(|(k, c)| c * sigma.powi(k as i32)).collect() };
            spec.asymptotics = Some(Asymptotics { exponent: p.order_m, plus: scale(tp), minus: scale(tm) });
        }
        spec
    }

    pub fn eval(&self, xi: f64) -> C64 {
        (self.eval)(xi)
    }

    pub fn product(&self, o: &MultiplierSpec) -> MultiplierSpec {
        let (a, b) = (self.eval.clone(), o.eval.clone());
        let side = if self.side == o.side { self.side } else { Side::Neutral };
        MultiplierSpec {
            eval: Arc::new(move |xi| a(xi) * b(xi)),
            order: self.order + o.order,
            side,
            asymptotics: match (&self.asymptotics, &o.asymptotics) {
                (Some(x), Some(y)) => Some(x.product(y)),
                _ => None,
            },
            label: format!("{}*{}", self.label, o.label),
        }
    }
}

fn check_finite(v: C64, xi: f64, label: &str) -> Result<C64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::new(
            "fourierops",
            "apply_multiplier",
            ErrorKind::Evaluation,
            format!("multiplier {label} is not finite at xi_j = {xi}"),
        ))
    }
}

/// Symbol samples on the band in FFT order.
pub fn sampled_symbol(spec: &MultiplierSpec, grid: Grid, disc: Discretization) -> Result<Vec<C64>> {
    match disc {
        Discretization::Truncated => (0..grid.n)
            .map(|j| {
                let xi = grid.freq(j);
                check_finite(spec.eval(xi), xi, &spec.label)
            })
            .collect(),
        Discretization::Periodized => periodized_symbol(spec, grid),
    }
}

/// Alias-summed symbol Σ_p m(ξ_j + pW): |p| ≤ 2 explicitly, the rest from the
/// expansions at ±∞ summed in closed form through ζ(k − γ, 3 ± ξ/W).
pub fn periodized_symbol(spec: &MultiplierSpec, grid: Grid) -> Result<Vec<C64>> {
    let asym = spec.asymptotics.as_ref().ok_or_else(|| {
        Error::invalid("fourierops", "periodized_symbol", format!("multiplier {} has no expansion at infinity", spec.label))
    })?;
    const P: i32 = 2;
    const NT: usize = 30;
    let w = grid.band();
    let a0 = (P + 1) as f64;
    let mut tail_p = vec![C64::new(0.0, 0.0); NT + 1];
    let mut tail_m = vec![C64::new(0.0, 0.0); NT + 1];
    for (k, (cp, cm)) in asym.plus.iter().zip(&asym.minus).enumerate() {
        let e = asym.exponent - k as f64;
        let wk = cpow(C64::new(w, 0.0), e);
        let tc = hurwitz_taylor(-e, a0, NT);
        for n in 0..=NT {
            tail_p[n] += cp * wk * tc[n];
            // ζ(s, 3 − t): odd powers flip sign
            let sgn = if n % 2 == 0 { 1.0 } else { -1.0 };
            tail_m[n] += cm * wk * tc[n] * sgn;
        }
    }
    let tail: Vec<C64> = tail_p.iter().zip(&tail_m).map(|(a, b)| a + b).collect();
    (0..grid.n)
        .map(|j| {
            let xi = grid.freq(j);
            let mut v = check_finite(spec.eval(xi), xi, &spec.label)?;
            for p in 1..=P {
                v += spec.eval(xi + p as f64 * w) + spec.eval(xi - p as f64 * w);
            }
            let t = xi / w;
            let mut poly = C64::new(0.0, 0.0);
            for c in tail.iter().rev() {
                poly = poly * t + c;
            }
            check_finite(v + poly, xi, &spec.label)
        })
        .collect()
}

fn output_side(spec: &MultiplierSpec, input: SupportSide) -> SupportSide {
    match (spec.side, input) {
        (Side::Plus, SupportSide::Nonneg) => SupportSide::Nonneg,
        (Side::Minus, SupportSide::Nonpos) => SupportSide::Nonpos,
        (Side::Neutral, s) if spec.label == "1" => s,
        _ => SupportSide::Whole,
    }
}

/// F⁻¹(m·F f) with the truncated discretization.
pub fn apply_multiplier(spec: &MultiplierSpec, f: &GridFunction) -> Result<GridFunction> {
    apply_multiplier_with(spec, f, Discretization::Truncated)
}

pub fn apply_multiplier_with(spec: &MultiplierSpec, f: &GridFunction, disc: Discretization) -> Result<GridFunction> {
    let m = sampled_symbol(spec, f.grid, disc)?;
    let mut spec_f = fft::forward(&f.values);
    for (s, mj) in spec_f.iter_mut().zip(&m) {
        *s *= mj;
    }
    let out = fft::inverse(&spec_f);
    Ok(f.with_values(out, output_side(spec, f.support_side)))
}

/// Nodal values of the kernel F⁻¹m, i.e. the periodized multiplier applied to the discrete impulse.
pub fn multiplier_kernel(spec: &MultiplierSpec, grid: Grid) -> Result<GridFunction> {
    apply_multiplier_with(spec, &GridFunction::impulse(grid), Discretization::Periodized)
}
