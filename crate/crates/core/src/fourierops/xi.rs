use super::grid::{Grid, GridFunction, SupportSide};
use super::multiplier::{apply_multiplier, multiplier_kernel, MultiplierSpec, Side};
use super::fft;
use crate::error::{Error, ErrorKind, Result};
use crate::fit::lstsq;
use crate::special::cgamma;
use num_complex::Complex64 as C64;

/// Ξ^μ₊ f = OP((σ + iξ)^μ) f.
pub fn xi_plus_apply(mu: C64, sigma: f64, f: &GridFunction) -> Result<GridFunction> {
    check_sigma(sigma, "xi_plus_apply")?;
    apply_multiplier(&MultiplierSpec::chi_plus(mu, sigma), f)
}

/// Ξ^μ₋ f = OP((σ − iξ)^μ) f.
pub fn xi_minus_apply(mu: C64, sigma: f64, f: &GridFunction) -> Result<GridFunction> {
    check_sigma(sigma, "xi_minus_apply")?;
    apply_multiplier(&MultiplierSpec::chi_minus(mu, sigma), f)
}

fn check_sigma(sigma: f64, op: &'static str) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid("fourierops", op, format!("sigma = {sigma} must be positive")))
    }
}

/// e⁺r⁺: zero on x < 0. The x = 0 node gets half the one-sided limit, extrapolated
/// from the right unless the input already is half-line data.
pub fn truncate_restrict(f: &GridFunction) -> GridFunction {
    let k0 = f.grid.k0();
    let mut v = f.values.clone();
    for x in v[..k0].iter_mut() {
        *x = C64::new(0.0, 0.0);
    }
    if f.support_side != SupportSide::Nonneg {
        const W: [f64; 6] = [6.0, -15.0, 20.0, -15.0, 6.0, -1.0];
        let lim: C64 = W.iter().enumerate().map(|(i, w)| f.values[k0 + 1 + i] * *w).sum();
        v[k0] = 0.5 * lim;
    }
    GridFunction { grid: f.grid, values: v, support_side: SupportSide::Nonneg, leakage: 0.0 }
}

/// Boundary layer Σ_j c_j I^{μ+j}(±x) e^{−σ|x|} on one side of 0, where I^ν(x) = x^ν/Γ(ν+1).
#[derive(Clone, Debug, PartialEq)]
pub struct LayerExpansion {
    pub mu: C64,
    pub sigma: f64,
    pub coeffs: Vec<C64>,
    /// `Plus` for layers on x > 0, `Minus` for the mirror image on x < 0.
    pub side: Side,
}

pub const LAYER_TERMS: usize = 14;
const FIT_NODES: usize = 40;

impl LayerExpansion {
    /// Least-squares fit of f near x = 0⁺ on the first 40 nodes, with the decay rate
    /// tied to the fit window so the layers stay well inside the box.
    pub fn fit(f: &GridFunction, mu: C64, terms: usize) -> Result<Self> {
        Self::fit_side(f, mu, Self::decay(f.grid), terms, Side::Plus)
    }

    pub fn decay(grid: Grid) -> f64 {
        2.0 / (FIT_NODES as f64 * grid.h())
    }

    /// Fit on x > 0 (`Plus`) or on x < 0 in the variable −x (`Minus`).
    pub fn fit_side(f: &GridFunction, mu: C64, sigma: f64, terms: usize, side: Side) -> Result<Self> {
        let k0 = f.grid.k0();
        if terms == 0 || terms + 2 > FIT_NODES || k0 < FIT_NODES + 1 {
            return Err(Error::invalid("fourierops", "layer_fit", format!("{terms} terms on N = {}", f.grid.n)));
        }
        let h = f.grid.h();
        let xmax = FIT_NODES as f64 * h;
        let mut design = Vec::with_capacity(FIT_NODES);
        let mut y = Vec::with_capacity(FIT_NODES);
        for i in 1..=FIT_NODES {
            let k = if side == Side::Minus { k0 - i } else { k0 + i };
            let d = i as f64 * h;
            let t = d / xmax;
            design.push((0..terms).map(|j| t.powi(j as i32)).collect());
            y.push(f.values[k] * (sigma * d).exp() * (-mu * d.ln()).exp());
        }
        let (a, _) = lstsq(&design, &y);
        let coeffs = a
            .iter()
            .enumerate()
            .map(|(j, aj)| aj * cgamma(mu + j as f64 + 1.0) / xmax.powi(j as i32))
            .collect();
        Ok(LayerExpansion { mu, sigma, coeffs, side })
    }

    /// Value at distance d > 0 from the boundary on the layer's side.
    pub fn eval(&self, d: f64) -> C64 {
        let e = (-self.sigma * d).exp();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| {
                let nu = self.mu + j as f64;
                c * (nu * d.ln()).exp() / cgamma(nu + 1.0)
            })
            .sum::<C64>()
            * e
    }

    /// Nodal samples; zero at x = 0 and on the other side.
    pub fn sample(&self, grid: Grid) -> GridFunction {
        let k0 = grid.k0();
        let values = (0..grid.n)
            .map(|k| {
                let x = grid.x(k);
                let d = if self.side == Side::Minus { -x } else { x };
                if k != k0 && d > 0.0 {
                    self.eval(d)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let side = if self.side == Side::Minus { SupportSide::Nonpos } else { SupportSide::Nonneg };
        GridFunction { grid, values, support_side: side, leakage: 0.0 }
    }

    /// Exact nodal values of OP(m) applied to the layer.
    pub fn apply(&self, spec: &MultiplierSpec, grid: Grid) -> Result<GridFunction> {
        let mut acc = vec![C64::new(0.0, 0.0); grid.n];
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.norm() == 0.0 {
                continue;
            }
            let e = -self.mu - j as f64 - 1.0;
            let layer = match self.side {
                Side::Minus => MultiplierSpec::chi_minus(e, self.sigma),
                _ => MultiplierSpec::chi_plus(e, self.sigma),
            };
            let k = multiplier_kernel(&spec.product(&layer), grid)?;
            for (a, v) in acc.iter_mut().zip(&k.values) {
                *a += c * v;
            }
        }
        Ok(GridFunction { grid, values: acc, support_side: SupportSide::Whole, leakage: 0.0 })
    }
}

/// f minus the sampled layers, with the x = 0 node cleared.
pub fn layer_remainder(f: &GridFunction, layers: &[LayerExpansion]) -> GridFunction {
    let mut w = f.values.clone();
    for l in layers {
        let s = l.sample(f.grid);
        for (a, b) in w.iter_mut().zip(&s.values) {
            *a -= b;
        }
    }
    if !layers.is_empty() {
        w[f.grid.k0()] = C64::new(0.0, 0.0);
    }
    GridFunction { grid: f.grid, values: w, support_side: f.support_side, leakage: 0.0 }
}

/// OP(m) f with the boundary layers of f applied through exact kernels and the
/// smooth remainder through the FFT.
pub fn apply_layered(spec: &MultiplierSpec, f: &GridFunction, layers: &[LayerExpansion]) -> Result<GridFunction> {
    let w = layer_remainder(f, layers);
    let mut out = apply_multiplier(spec, &w)?;
    for l in layers {
        let part = l.apply(spec, f.grid)?;
        for (a, b) in out.values.iter_mut().zip(&part.values) {
            *a += b;
        }
    }
    let side = match (spec.side, f.support_side) {
        (Side::Plus, SupportSide::Nonneg) => SupportSide::Nonneg,
        (Side::Minus, SupportSide::Nonpos) => SupportSide::Nonpos,
        _ => SupportSide::Whole,
    };
    Ok(f.with_values(out.values, side))
}

/// Result of r⁺Ξ^μ₋ℓf with the extension discrepancy.
#[derive(Clone, Debug)]
pub struct MinusTruncated {
    pub result: GridFunction,
    /// Relative L² difference on x > 0 between zero and even extension, when both apply.
    pub discrepancy: Option<f64>,
}

pub const EXTENSION_TOL: f64 = 1e-6;

/// r⁺Ξ^μ₋ℓf for half-line data f, with ℓ the zero extension. The even extension is
/// also computed when Re μ < 2 and the two are compared on x > 0.
pub fn minus_truncated_apply(mu: C64, sigma: f64, f: &GridFunction) -> Result<MinusTruncated> {
    check_sigma(sigma, "minus_truncated_apply")?;
    let spec = MultiplierSpec::chi_minus(mu, sigma);
    let zero = C64::new(0.0, 0.0);
    let e0 = truncate_restrict(f);
    let plus = LayerExpansion::fit(&e0, zero, LAYER_TERMS)?;
    let r0 = truncate_restrict(&apply_layered(&spec, &e0, std::slice::from_ref(&plus))?);
    if mu.re >= 2.0 {
        return Ok(MinusTruncated { result: r0, discrepancy: None });
    }
    let k0 = f.grid.k0();
    let n = f.grid.n;
    let mut refl = e0.values.clone();
    for i in 1..k0 {
        refl[k0 - i] = e0.values[k0 + i];
    }
    refl[0] = e0.values[n - 1];
    refl[k0] = 2.0 * e0.values[k0];
    let ef = GridFunction { grid: f.grid, values: refl, support_side: SupportSide::Whole, leakage: 0.0 };
    let minus = LayerExpansion { side: Side::Minus, ..plus.clone() };
    let r1 = truncate_restrict(&apply_layered(&spec, &ef, &[plus, minus])?);
    let d = r0.sub(&r1).l2_norm_on(0.0, f64::INFINITY);
    let scale = r0.l2_norm_on(0.0, f64::INFINITY).max(f64::MIN_POSITIVE);
    let rel = d / scale;
    if rel > EXTENSION_TOL {
        return Err(Error::new(
            "fourierops",
            "minus_truncated_apply",
            ErrorKind::Convergence,
            format!("extension dependence detected ({rel:.3e}), check mu and smoothness"),
        ));
    }
    Ok(MinusTruncated { result: r0, discrepancy: Some(rel) })
}

/// Discrete H^s norm (1/(2L)) Σ ⟨ξ_j⟩^{2s} |h·F f(ξ_j)|², square-rooted.
pub fn sobolev_norm(f: &GridFunction, s: f64) -> f64 {
    let g = f.grid;
    let h = g.h();
    let spec = fft::forward(&f.values);
    let sum: f64 = spec
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let xi = g.freq(j);
            (1.0 + xi * xi).powf(s) * (h * v).norm_sqr()
        })
        .sum();
    (sum / (2.0 * g.half_length)).sqrt()
}
