//! μ-transmission spaces at one tangential mode σ: the norm ‖r⁺Ξ^μ₊u‖ in H^{s−Re μ},
//! boundary traces γ_{μ,j}, the transition matrix Φ and the Poisson operators K_{μ,j}.
//!
//! Traces use the I^{μ+j} convention: if u ~ Σ_j γ_{μ,j} x^{μ+j}/Γ(μ+j+1) near x = 0⁺ then
//! γ_{μ,j}u is the j-th coefficient. The binomial convention ∂ʲw(0)/binom(μ, j) differs by
//! the factor Γ(μ+1)·j!·binom(μ, j)/Γ(μ+j+1).

use crate::error::{Error, ErrorKind, Result};
use crate::fit::lstsq;
use crate::fourierops::{
    apply_layered, fft, truncate_restrict, Grid, GridFunction, LayerExpansion, MultiplierSpec, SupportSide, LAYER_TERMS,
};
use crate::special::{binom, cgamma, factorial, gamma, rgamma};
use num_complex::Complex64 as C64;
use serde::Serialize;

const MODULE: &str = "muspace";
const I: C64 = C64 { re: 0.0, im: 1.0 };

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_mu(mu: C64, op: &'static str) -> Result<()> {
    if mu.re > -1.0 {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, op, format!("traces need Re mu > -1 (got {mu})")))
    }
}

fn check_sigma(sigma: f64, op: &'static str) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(MODULE, op, format!("sigma = {sigma} must be positive")))
    }
}

/// r⁺Ξ^μ₊u computed with the x^μ boundary layers of u handled by exact kernels.
pub fn xi_plus_restricted(u: &GridFunction, mu: C64, sigma: f64) -> Result<GridFunction> {
    let layers = LayerExpansion::fit(u, mu, LAYER_TERMS)?;
    let v = apply_layered(&MultiplierSpec::chi_plus(mu, sigma), u, &[layers])?;
    Ok(truncate_restrict(&v))
}

fn right_limit(v: &GridFunction) -> C64 {
    const W: [f64; 6] = [6.0, -15.0, 20.0, -15.0, 6.0, -1.0];
    let k0 = v.grid.k0();
    W.iter().enumerate().map(|(i, w)| v.values[k0 + 1 + i] * *w).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct MuNorm {
    pub mu: C64,
    pub s: f64,
    pub sigma: f64,
    /// ‖e⁺r⁺Ξ^μ₊u‖ in H^{s−Re μ}; infinite when s − Re μ ≥ ½ and the boundary value is nonzero.
    pub value: f64,
    /// Norm of the x > 0 part, the only part the definition sees.
    pub plus_part_norm: f64,
    /// Boundary value (r⁺Ξ^μ₊u)(0⁺) = γ_{μ,0}u.
    pub jump: C64,
    pub finite: bool,
}

/// (1/2π)∫(1+ξ²)^a dξ for a < −½.
fn weight_integral(a: f64) -> f64 {
    std::f64::consts::PI.sqrt() * gamma(-0.5 - a) / gamma(-a) / (2.0 * std::f64::consts::PI)
}

/// Hörmander norm ‖u‖_{μ(s)} = ‖r⁺Ξ^μ₊u‖ with the restricted norm replaced by the
/// zero-extension norm. The boundary value J and slope of r⁺Ξ^μ₊u are carried by
/// J·e^{−x} + c·x e^{−x}, whose H^t Gram matrix is known in closed form; the C¹ remainder
/// goes through the discrete transform.
pub fn mu_norm(u: &GridFunction, mu: C64, s: f64, sigma: f64) -> Result<MuNorm> {
    check_sigma(sigma, "mu_norm")?;
    let t = s - mu.re;
    if t <= -0.5 {
        return Err(Error::invalid(
            MODULE,
            "mu_norm",
            format!("s = {s} must exceed Re mu - 1/2 = {}", mu.re - 0.5),
        ));
    }
    if u.values.iter().all(|v| v.norm() == 0.0) {
        return Ok(MuNorm { mu, s, sigma, value: 0.0, plus_part_norm: 0.0, jump: zero(), finite: true });
    }
    let v = xi_plus_restricted(u, mu, sigma)?;
    let jump = match limit_traces(u, mu, 1) {
        Ok((tr, res)) if res <= TRACE_FIT_TOL => tr[0],
        _ => right_limit(&v),
    };
    let slope = derivative_at_zero(&v, 1) + jump;
    let scale = v.values.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let infinite = (t >= 0.5 && jump.norm() > 1e-8 * scale) || (t >= 1.5 && slope.norm() > 1e-8 * scale);
    if infinite {
        return Ok(MuNorm { mu, s, sigma, value: f64::INFINITY, plus_part_norm: f64::INFINITY, jump, finite: false });
    }
    let g = v.grid;
    let h = g.h();
    let k0 = g.k0();
    let mut vs = v.values.clone();
    for (k, x) in vs.iter_mut().enumerate() {
        if k > k0 {
            let y = g.x(k);
            *x -= (jump + slope * y) * (-y).exp();
        } else {
            *x = zero();
        }
    }
    let spec = fft::forward(&vs);
    let (mut c0, mut c1, mut rest) = (zero(), zero(), 0.0);
    for (j, fj) in spec.iter().enumerate() {
        let xi = g.freq(j);
        let w = (1.0 + xi * xi).powf(t);
        let fv = h * fj;
        let e0 = 1.0 / C64::new(1.0, xi);
        rest += w * fv.norm_sqr();
        c0 += w * e0.conj() * fv;
        c1 += w * (e0 * e0).conj() * fv;
    }
    let l = 2.0 * g.half_length;
    let (g00, g11) = (weight_integral(t - 1.0), weight_integral(t - 2.0));
    let layer = jump.norm_sqr() * g00 + slope.norm_sqr() * g11 + 2.0 * (jump.conj() * slope).re * g11;
    let sq = layer + 2.0 * (jump.conj() * c0 + slope.conj() * c1).re / l + rest / l;
    let value = sq.max(0.0).sqrt();
    Ok(MuNorm { mu, s, sigma, value, plus_part_norm: value, jump, finite: true })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceMethod {
    /// Coefficients of x^{μ+j} from a least-squares fit on [4h, 40h].
    Limit,
    /// γ₀∂ʲ of r⁺Ξ^μ₊u by a local polynomial fit, mapped back through Φ⁻¹.
    Xi,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceVector {
    pub mu: C64,
    pub m: usize,
    pub values: Vec<C64>,
    pub method: TraceMethod,
    pub fit_residual: f64,
}

const WINDOW: (usize, usize) = (4, 40);
const FIT_DEGREE: usize = 12;
pub const TRACE_FIT_TOL: f64 = 1e-7;

fn limit_traces(u: &GridFunction, mu: C64, m: usize) -> Result<(Vec<C64>, f64)> {
    let g = u.grid;
    let (h, k0) = (g.h(), g.k0());
    let terms = FIT_DEGREE.max(m + 3);
    let xmax = WINDOW.1 as f64 * h;
    let mut design = Vec::new();
    let mut y = Vec::new();
    for i in WINDOW.0..=WINDOW.1 {
        let x = i as f64 * h;
        design.push((0..terms).map(|j| (x / xmax).powi(j as i32)).collect());
        y.push(u.values[k0 + i] * (-mu * x.ln()).exp());
    }
    let (a, res) = lstsq(&design, &y);
    let scale = y.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let vals = (0..m).map(|j| a[j] / xmax.powi(j as i32) * cgamma(mu + j as f64 + 1.0)).collect();
    Ok((vals, res / scale))
}

const DERIV_WINDOW: (usize, usize) = (4, 60);
const DERIV_TERMS: usize = 12;

/// f^{(d)}(0⁺) from a polynomial fit on the first nodes right of 0.
fn derivative_at_zero(v: &GridFunction, d: usize) -> C64 {
    let (h, k0) = (v.grid.h(), v.grid.k0());
    let xmax = DERIV_WINDOW.1 as f64 * h;
    let nodes = DERIV_WINDOW.0..=DERIV_WINDOW.1;
    let design: Vec<Vec<f64>> =
        nodes.clone().map(|i| (0..DERIV_TERMS).map(|j| (i as f64 * h / xmax).powi(j as i32)).collect()).collect();
    let y: Vec<C64> = nodes.map(|i| v.values[k0 + i]).collect();
    let (a, _) = lstsq(&design, &y);
    a[d] * factorial(d) / xmax.powi(d as i32)
}

/// γ₀∂ʲ(r⁺Ξ^μ₊u) for j < m.
pub fn xi_boundary_values(u: &GridFunction, mu: C64, m: usize, sigma: f64) -> Result<Vec<C64>> {
    let v = xi_plus_restricted(u, mu, sigma)?;
    Ok((0..m).map(|j| derivative_at_zero(&v, j)).collect())
}

fn lower_solve(a: &[Vec<C64>], b: &[C64]) -> Vec<C64> {
    let n = b.len();
    let mut x = vec![zero(); n];
    for i in 0..n {
        let s: C64 = (0..i).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

/// (γ_{μ,0}u, …, γ_{μ,m−1}u).
pub fn traces(u: &GridFunction, mu: C64, m: usize, sigma: f64, method: TraceMethod) -> Result<TraceVector> {
    check_mu(mu, "trace_gamma")?;
    check_sigma(sigma, "trace_gamma")?;
    if m == 0 {
        return Err(Error::invalid(MODULE, "trace_gamma", "M must be at least 1"));
    }
    if u.grid.k0() < DERIV_WINDOW.1 + 1 {
        return Err(Error::invalid(MODULE, "trace_gamma", "grid too coarse for the trace window"));
    }
    let (lim, res) = limit_traces(u, mu, m)?;
    if res > TRACE_FIT_TOL {
        return Err(Error::new(
            MODULE,
            "trace_gamma",
            ErrorKind::Convergence,
            format!("trace ill-defined at this resolution (window fit residual {res:.2e})"),
        ));
    }
    let values = match method {
        TraceMethod::Limit => lim,
        TraceMethod::Xi => {
            let psi = xi_boundary_values(u, mu, m, sigma)?;
            lower_solve(&transition_matrix(mu, m, sigma).rows, &psi)
        }
    };
    Ok(TraceVector { mu, m, values, method, fit_residual: res })
}

pub fn trace_gamma(u: &GridFunction, mu: C64, j: usize, sigma: f64, method: TraceMethod) -> Result<C64> {
    Ok(traces(u, mu, j + 1, sigma, method)?.values[j])
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitionMatrix {
    pub mu: C64,
    pub sigma: f64,
    pub rows: Vec<Vec<C64>>,
}

/// Φ with (γ_j Ξ^μ₊u)_j = Φ (γ_{μ,j}u)_j; Φ_{jk} = binom(μ, j−k)σ^{j−k} for j ≥ k.
///
/// The entries come from the product of e^{−σx} with the I^{μ+k} layers: writing D for the
/// Taylor matrix of the layers I^k e^{−σx} and T for their traces, Φ = D·T⁻¹.
pub fn transition_matrix(mu: C64, m: usize, sigma: f64) -> TransitionMatrix {
    let rows = (0..m)
        .map(|j| (0..m).map(|k| if k <= j { binom(mu, j - k) * sigma.powi((j - k) as i32) } else { zero() }).collect())
        .collect();
    TransitionMatrix { mu, sigma, rows }
}

/// c_{μ,j} = iʲ/Γ(μ+j+1).
pub fn poisson_constant(mu: C64, j: usize) -> C64 {
    I.powi(j as i32) * rgamma(mu + j as f64 + 1.0)
}

/// K_{μ,j}φ = c_{μ,j}·x^{μ+j}e^{−σx}·φ on x > 0, zero on x < 0. The x = 0 node carries the
/// value of the lattice-summed kernel so that the field agrees with F⁻¹(σ+iξ)^{−μ−j−1}.
pub fn poisson_apply(phi: C64, mu: C64, j: usize, sigma: f64, grid: Grid) -> Result<GridFunction> {
    check_mu(mu, "poisson_apply")?;
    check_sigma(sigma, "poisson_apply")?;
    let nu = mu + j as f64;
    let c = poisson_constant(mu, j) * phi;
    let k0 = grid.k0();
    let node0 = if nu.re > 0.0 {
        zero()
    } else {
        let kern = crate::fourierops::multiplier_kernel(&MultiplierSpec::chi_plus(-nu - 1.0, sigma), grid)?;
        kern.values[k0] * I.powi(j as i32) * phi
    };
    let values = (0..grid.n)
        .map(|k| {
            let x = grid.x(k);
            if k == k0 {
                node0
            } else if x > 0.0 {
                c * (nu * x.ln() - sigma * x).exp()
            } else {
                zero()
            }
        })
        .collect();
    Ok(GridFunction { grid, values, support_side: SupportSide::Nonneg, leakage: 0.0 })
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Σ_k K_{μ,k}φ_k matching the first M traces of u.
    pub v: GridFunction,
    pub w: GridFunction,
    pub phi: Vec<C64>,
    pub traces: TraceVector,
    /// γ_{μ,j}w, j < M.
    pub remainder_traces: Vec<C64>,
}

/// u = v + w with v a sum of Poisson fields and γ_{μ,j}w = 0 for j < M.
///
/// K_{μ,k}φ contributes to every γ_{μ,j}, j ≥ k, through the Taylor series of e^{−σx}:
/// γ_{μ,j}K_{μ,k}φ = iᵏ T_{jk} φ with T_{jk} = (−σ)^{j−k}Γ(μ+j+1)/(Γ(μ+k+1)(j−k)!),
/// so φ = diag(i^{−k})·T⁻¹·(γ_{μ,j}u).
pub fn decompose(u: &GridFunction, mu: C64, m: usize, sigma: f64) -> Result<Decomposition> {
    let tr = traces(u, mu, m, sigma, TraceMethod::Limit)?;
    let t: Vec<Vec<C64>> = (0..m)
        .map(|j| {
            (0..m)
                .map(|k| {
                    if k <= j {
                        (-sigma).powi((j - k) as i32) * cgamma(mu + j as f64 + 1.0) * rgamma(mu + k as f64 + 1.0)
                            / factorial(j - k)
                    } else {
                        zero()
                    }
                })
                .collect()
        })
        .collect();
    let beta = lower_solve(&t, &tr.values);
    let phi: Vec<C64> = beta.iter().enumerate().map(|(k, b)| b * I.powi(-(k as i32))).collect();
    let mut v = GridFunction::zeros(u.grid, SupportSide::Nonneg);
    for (k, p) in phi.iter().enumerate() {
        let f = poisson_apply(*p, mu, k, sigma, u.grid)?;
        for (a, b) in v.values.iter_mut().zip(&f.values) {
            *a += b;
        }
    }
    let w = u.sub(&v);
    let remainder_traces = limit_traces(&w, mu, m)?.0;
    Ok(Decomposition { v, w, phi, traces: tr, remainder_traces })
}

/// Constant C in ‖u‖_{(μ−1)(s)} ≤ C‖u‖_{μ(s)}: sup_ξ ⟨ξ⟩/|σ + iξ| = max(1, 1/σ).
pub fn embedding_constant(sigma: f64) -> f64 {
    1f64.max(1.0 / sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn grid() -> Grid {
        Grid::new(8192, 40.0).unwrap()
    }

    fn layer(mu: f64, sigma: f64, g: Grid) -> GridFunction {
        GridFunction::half_line(g, move |x| if x > 0.0 { c(x.powf(mu) * (-sigma * x).exp() / statrs::function::gamma::gamma(mu + 1.0)) } else { c(0.0) })
    }

    #[test]
    fn norm_of_layer_matches_beta_integral() {
        // r⁺Ξ^μ₊(I^μ e^{−x}) = e^{−x}; ‖e^{−x}H‖²_t = B(½, ½−t)/2π
        let g = grid();
        for &mu in &[0.0, 0.5, 1.2, -0.3] {
            let u = layer(mu, 1.0, g);
            for &t in &[-0.3, 0.0, 0.2, 0.4] {
                let n = mu_norm(&u, c(mu), t + mu, 1.0).unwrap();
                let exact = (statrs::function::beta::beta(0.5, 0.5 - t) / (2.0 * std::f64::consts::PI)).sqrt();
                assert!((n.value - exact).abs() < 1e-6 * exact, "mu {mu} t {t}: {} vs {exact}", n.value);
                assert!((n.jump - c(1.0)).norm() < 1e-6);
            }
            let n = mu_norm(&u, c(mu), mu + 0.7, 1.0).unwrap();
            assert!(!n.finite);
        }
    }

    #[test]
    fn norm_of_zero_and_range_error() {
        let g = grid();
        let z = GridFunction::zeros(g, SupportSide::Nonneg);
        assert_eq!(mu_norm(&z, c(0.5), 0.5, 1.0).unwrap().value, 0.0);
        let e = mu_norm(&z, c(0.5), -0.2, 1.0).unwrap_err();
        assert!(e.message.contains("Re mu - 1/2"));
    }

    #[test]
    fn norm_of_continuous_image_against_quadrature() {
        // u = I^{μ+1}e^{−x}: r⁺Ξ^μ₊u = x e^{−x}, |F|² = 1/(1+ξ²)²
        let g = grid();
        let u = layer(1.5, 1.0, g);
        for &t in &[0.0, 0.4, 0.9, 1.2] {
            let n = mu_norm(&u, c(0.5), 0.5 + t, 1.0).unwrap();
            let exact = (statrs::function::beta::beta(0.5, 1.5 - t) / (2.0 * std::f64::consts::PI)).sqrt();
            assert!((n.value - exact).abs() < 1e-6 * exact, "t {t}: {} vs {exact}", n.value);
        }
    }

    #[test]
    fn layer_trace_is_one() {
        let g = grid();
        for &mu in &[-0.5, 0.0, 0.3, 1.2] {
            let u = layer(mu, 1.3, g);
            let t = trace_gamma(&u, c(mu), 0, 1.3, TraceMethod::Limit).unwrap();
            assert!((t - c(1.0)).norm() < 1e-8, "mu {mu}: {t}");
        }
    }

    #[test]
    fn trace_of_poisson_field_round_trips() {
        let g = grid();
        for &mu in &[-0.5, 0.3, 1.2] {
            let phi = C64::new(0.7, -1.1);
            let u = poisson_apply(phi, c(mu), 0, 1.0, g).unwrap();
            for method in [TraceMethod::Limit, TraceMethod::Xi] {
                let t = trace_gamma(&u, c(mu), 0, 1.0, method).unwrap();
                assert!((t - phi).norm() <= 1e-6 * phi.norm(), "mu {mu} {method:?}: {t}");
            }
        }
    }

    #[test]
    fn higher_layer_has_zero_trace() {
        let g = grid();
        let mu = 0.4;
        let u = GridFunction::half_line(g, |x| c(x.powf(mu + 1.0) * (-x).exp()));
        assert!(trace_gamma(&u, c(mu), 0, 1.0, TraceMethod::Limit).unwrap().norm() < 1e-9);
    }

    #[test]
    fn poisson_examples() {
        let g = grid();
        let k0 = poisson_apply(c(1.0), c(0.0), 0, 2.0, g).unwrap();
        let e = GridFunction::half_line(g, |x| c((-2.0 * x).exp()));
        assert!(k0.sub(&e).l2_norm() < 1e-12);
        let a = 0.6;
        let k = poisson_apply(c(1.0), c(a - 1.0), 0, 1.0, g).unwrap();
        for i in [1usize, 17, 400] {
            let x = g.x(g.k0() + i);
            let exact = x.powf(a - 1.0) * (-x).exp() / statrs::function::gamma::gamma(a);
            assert!((k.values[g.k0() + i] - c(exact)).norm() < 1e-12 * exact);
        }
    }

    #[test]
    fn poisson_field_is_image_of_k0() {
        // K_{μ,j} = OP((σ+iξ)^{−μ})e⁺K_j with K_j φ = iʲ I^j e^{−σx} φ
        let g = grid();
        for (mu, j) in [(0.3, 0usize), (0.3, 1), (-0.4, 2)] {
            let kj = poisson_apply(c(1.0), c(0.0), j, 1.0, g).unwrap();
            let lhs = poisson_apply(c(1.0), c(mu), j, 1.0, g).unwrap();
            let rhs = crate::fourierops::apply_layered(
                &MultiplierSpec::chi_plus(c(-mu), 1.0),
                &kj,
                &[LayerExpansion::fit(&kj, c(0.0), LAYER_TERMS).unwrap()],
            )
            .unwrap();
            let e = lhs.sub(&rhs).l2_norm_on(0.01, 40.0) / lhs.l2_norm();
            assert!(e < 1e-7, "mu {mu} j {j}: {e}");
        }
    }

    #[test]
    fn transition_matrix_examples() {
        let one = transition_matrix(c(0.7), 1, 2.0);
        assert_eq!(one.rows, vec![vec![c(1.0)]]);
        let mu = C64::new(0.3, 0.2);
        let two = transition_matrix(mu, 2, 1.5);
        assert_eq!(two.rows[0], vec![c(1.0), c(0.0)]);
        assert_eq!(two.rows[1][1], c(1.0));
        assert!((two.rows[1][0] - mu * 1.5).norm() < 1e-15);
    }

    /// Numeric Φ: ψ_j = γ₀∂ʲΞ^μ₊ of the basis I^{μ+k}e^{−σx}, whose traces are known.
    fn numeric_phi(mu: f64, m: usize, sigma: f64) -> Vec<Vec<C64>> {
        let g = grid();
        let mut psi = vec![vec![c(0.0); m]; m];
        let mut tr = vec![vec![c(0.0); m]; m];
        for k in 0..m {
            let u = layer(mu + k as f64, sigma, g);
            let p = xi_boundary_values(&u, c(mu), m, sigma).unwrap();
            for j in 0..m {
                psi[j][k] = p[j];
                if j >= k {
                    tr[j][k] = c((-sigma).powi((j - k) as i32) * statrs::function::gamma::gamma(mu + j as f64 + 1.0)
                        / statrs::function::gamma::gamma(mu + k as f64 + 1.0)
                        / statrs::function::factorial::factorial((j - k) as u64));
                }
            }
        }
        // Φ = Ψ·T⁻¹, T lower triangular
        let mut phi = vec![vec![c(0.0); m]; m];
        for j in 0..m {
            for k in (0..m).rev() {
                let s: C64 = (k + 1..m).map(|l| phi[j][l] * tr[l][k]).sum();
                phi[j][k] = (psi[j][k] - s) / tr[k][k];
            }
        }
        phi
    }

    #[test]
    fn transition_matrix_matches_numeric_traces() {
        for (mu, sigma) in [(0.3, 1.0), (-0.5, 0.7), (1.2, 1.5)] {
            let num = numeric_phi(mu, 3, sigma);
            let sym = transition_matrix(c(mu), 3, sigma);
            for j in 0..3 {
                for k in 0..3 {
                    assert!((num[j][k] - sym.rows[j][k]).norm() < 1e-6, "mu {mu} ({j},{k}): {} vs {}", num[j][k], sym.rows[j][k]);
                }
            }
        }
    }

    #[test]
    fn decompose_examples() {
        let g = grid();
        let mu = 0.3;
        let p = poisson_apply(C64::new(1.0, 0.5), c(mu), 0, 1.0, g).unwrap();
        let d = decompose(&p, c(mu), 1, 1.0).unwrap();
        assert!(d.w.l2_norm() < 1e-8 * p.l2_norm());
        let u = GridFunction::half_line(g, |x| c(x.powf(mu) * (1.0 + x) * (-x).exp()));
        let d1 = decompose(&u, c(mu), 1, 1.0).unwrap();
        let gm = statrs::function::gamma::gamma(mu + 1.0);
        assert!((d1.phi[0] - c(gm)).norm() < 1e-8);
        assert!(d1.remainder_traces[0].norm() < 1e-5);
        let d2 = decompose(&u, c(mu), 2, 1.0).unwrap();
        assert!(d2.remainder_traces.iter().all(|t| t.norm() < 1e-5));
        // w = O(x^{μ+2}): w/x^{μ+2} stays bounded near 0
        let k0 = g.k0();
        let ratio = |i: usize| {
            let x = g.x(k0 + i);
            d2.w.values[k0 + i].norm() / x.powf(mu + 2.0)
        };
        assert!(ratio(5) < 2.0 * ratio(40).max(1.0));
    }

    #[test]
    fn trace_fit_rejects_wrong_exponent() {
        let g = grid();
        let u = layer(0.5, 1.0, g);
        let e = trace_gamma(&u, c(0.0), 0, 1.0, TraceMethod::Limit).unwrap_err();
        assert!(e.message.contains("ill-defined"));
        assert!(trace_gamma(&u, c(-1.2), 0, 1.0, TraceMethod::Limit).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]

        #[test]
        fn kernel_of_trace(mu in -0.8f64..1.5, a in -2.0f64..2.0, b in -2.0f64..2.0, m in 1usize..4, sigma in 0.5f64..2.0) {
            let g = grid();
            let u = GridFunction::half_line(g, move |x| c(x.powf(mu) * (1.0 + a * x + b * x * x) * (-x).exp()));
            let d = decompose(&u, c(mu), m, sigma).unwrap();
            for t in &d.remainder_traces {
                prop_assert!(t.norm() <= 1e-5, "{}", t);
            }
        }

        #[test]
        fn methods_agree(mu in -0.8f64..1.5, a in -2.0f64..2.0, sigma in 0.5f64..2.0) {
            let g = grid();
            let u = GridFunction::half_line(g, move |x| c(x.powf(mu) * (1.0 + a * x) * (-x).exp()));
            let l = traces(&u, c(mu), 2, sigma, TraceMethod::Limit).unwrap();
            let x = traces(&u, c(mu), 2, sigma, TraceMethod::Xi).unwrap();
            for j in 0..2 {
                let scale = l.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
                prop_assert!((l.values[j] - x.values[j]).norm() <= 1e-3 * scale, "{} vs {}", l.values[j], x.values[j]);
            }
        }

        #[test]
        fn embedding(mu in -0.3f64..1.2, t in -0.2f64..0.4, sigma in 0.3f64..3.0, a in -1.0f64..1.0) {
            let g = grid();
            let u = GridFunction::half_line(g, move |x| c(x.powf(mu) * (1.0 + a * x) * (-x).exp()));
            let s = mu + t;
            let lo = mu_norm(&u, c(mu - 1.0), s, sigma).unwrap();
            let hi = mu_norm(&u, c(mu), s, sigma).unwrap();
            prop_assert!(lo.value <= embedding_constant(sigma) * hi.value * (1.0 + 1e-6), "{} > {}·{}", lo.value, embedding_constant(sigma), hi.value);
        }

        #[test]
        fn monotone_in_s(mu in -0.3f64..1.2, t1 in -0.4f64..0.4, dt in 0.0f64..0.3) {
            let g = grid();
            let u = layer(mu, 1.0, g);
            let a = mu_norm(&u, c(mu), mu + t1, 1.0).unwrap();
            let b = mu_norm(&u, c(mu), mu + (t1 + dt).min(0.45), 1.0).unwrap();
            prop_assert!(a.value <= b.value * (1.0 + 1e-9));
        }

        #[test]
        fn transition_scaling(mu in -0.9f64..2.0, mi in -1.0f64..1.0, sigma in 0.2f64..3.0) {
            let a = transition_matrix(C64::new(mu, mi), 4, sigma);
            let b = transition_matrix(C64::new(mu, mi), 4, 2.0 * sigma);
            for j in 0..4 {
                prop_assert_eq!(a.rows[j][j], c(1.0));
                for k in 0..4 {
                    if k > j {
                        prop_assert_eq!(a.rows[j][k], c(0.0));
                    } else {
                        let r = a.rows[j][k] * 2f64.powi((j - k) as i32);
                        prop_assert!((r - b.rows[j][k]).norm() <= 1e-12 * r.norm().max(1.0));
                    }
                }
            }
        }
    }
}
