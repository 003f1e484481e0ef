use super::symbol::BoundarySymbol;
use crate::error::{Error, ErrorKind, Result};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// t^m for t > 0 and complex m.
fn tpow(t: f64, m: C64) -> C64 {
    (m * t.ln()).exp()
}

/// Max relative homogeneity defect over half-circle samples and dilations t ∈ {½, 2, 5}.
pub fn check_homogeneity(p: &BoundarySymbol, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..samples.max(1) {
        let th = -PI / 2.0 + PI * (k as f64 + 0.5) / samples.max(1) as f64;
        let (s, x) = (th.cos(), th.sin());
        let base = p.try_eval(s, x)?;
        for &t in &[0.5, 2.0, 5.0] {
            let scaled = p.try_eval(t * s, t * x)?;
            let expect = tpow(t, p.order_m) * base;
            let r = (scaled - expect).norm() / expect.norm();
            if !r.is_finite() {
                return Err(Error::new(
                    "symcore",
                    "check_homogeneity",
                    ErrorKind::Evaluation,
                    format!("degenerate value at (sigma, xi) = ({s}, {x})"),
                ));
            }
            worst = worst.max(r);
        }
    }
    Ok(worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeSource {
    ClosedForm,
    FiniteDifference,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransmissionSample {
    pub sigma: f64,
    pub k: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TransmissionReport {
    pub mu: C64,
    pub max_residual: f64,
    pub per_sample: Vec<TransmissionSample>,
    pub passed: bool,
    pub tolerance: f64,
    pub derivative_source: DerivativeSource,
    /// Present when σ = 0 had to be reached by extrapolation.
    pub extrapolation_residual: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct TransmissionOptions {
    pub tol_closed_form: f64,
    pub tol_finite_difference: f64,
}

impl Default for TransmissionOptions {
    fn default() -> Self {
        TransmissionOptions { tol_closed_form: 1e-8, tol_finite_difference: 1e-4 }
    }
}

fn finite_diff(p: &BoundarySymbol, k: usize, sigma: f64, xi: f64) -> C64 {
    // larger steps for higher derivatives keep roundoff below the truncation error
    let h0 = match k {
        0 | 1 => 1e-4,
        2 => 1e-3,
        _ => 1e-2,
    };
    let central = |h: f64| -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..=k {
            let w = crate::special::binom(C64::new(k as f64, 0.0), j).re * if j % 2 == 0 { 1.0 } else { -1.0 };
            acc += w * p.eval(sigma, xi + (k as f64 / 2.0 - j as f64) * h);
        }
        acc / h.powi(k as i32)
    };
    if k == 0 {
        return p.eval(sigma, xi);
    }
    (4.0 * central(h0 / 2.0) - central(h0)) / 3.0
}

fn derivative(p: &BoundarySymbol, k: usize, sigma: f64, xi: f64) -> C64 {
    p.deriv_xi(k, sigma, xi).unwrap_or_else(|| finite_diff(p, k, sigma, xi))
}

/// Derivatives ∂^k_ξ p at (0, ξ) for k = 0..=kmax; σ = 0 is reached by extrapolation
/// from σ ∈ {1e-3, 5e-4, 2.5e-4} when the symbol is singular there.
fn boundary_jet(p: &BoundarySymbol, xi: f64, kmax: usize) -> (Vec<C64>, Option<f64>) {
    let direct: Vec<C64> = (0..=kmax).map(|k| derivative(p, k, 0.0, xi)).collect();
    if direct.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
        return (direct, None);
    }
    let hs = [1e-3, 5e-4, 2.5e-4];
    let mut out = Vec::with_capacity(kmax + 1);
    let mut resid: f64 = 0.0;
    for k in 0..=kmax {
        let v: Vec<C64> = hs.iter().map(|&s| derivative(p, k, s, xi)).collect();
        // linear and quadratic extrapolation in σ to 0
        let lin = 2.0 * v[1] - v[0];
        let lin2 = 2.0 * v[2] - v[1];
        let quad = (4.0 * lin2 - lin) / 3.0;
        resid = resid.max((quad - lin2).norm());
        out.push(quad);
    }
    (out, Some(resid))
}

/// Normal-derivative subset of the μ-transmission condition at the boundary point.
pub fn check_mu_transmission(
    p: &BoundarySymbol,
    mu: C64,
    max_deriv: usize,
    opts: TransmissionOptions,
) -> Result<TransmissionReport> {
    let (jm, ex_m) = boundary_jet(p, -1.0, max_deriv);
    let (jp, ex_p) = boundary_jet(p, 1.0, max_deriv);
    let scale0 = jm[0].norm().max(jp[0].norm());
    if !(jm[0].norm() > 1e-14 * scale0.max(1e-300) && jp[0].norm() > 1e-14 * scale0.max(1e-300)) {
        return Err(Error::new(
            "symcore",
            "check_mu_transmission",
            ErrorKind::NotElliptic,
            "transmission check undefined at characteristic boundary point",
        ));
    }
    let source = if p.has_closed_form_derivatives() {
        DerivativeSource::ClosedForm
    } else {
        DerivativeSource::FiniteDifference
    };
    let tolerance = match source {
        DerivativeSource::ClosedForm => opts.tol_closed_form,
        DerivativeSource::FiniteDifference => opts.tol_finite_difference,
    };
    let mut per_sample = Vec::with_capacity(max_deriv + 1);
    let mut max_residual: f64 = 0.0;
    for k in 0..=max_deriv {
        let phase = (I * PI * (p.order_m - 2.0 * mu - k as f64)).exp();
        let scale = jm[k].norm().max(jp[k].norm());
        let residual = if scale == 0.0 { 0.0 } else { (jm[k] - phase * jp[k]).norm() / scale };
        max_residual = max_residual.max(residual);
        per_sample.push(TransmissionSample { sigma: 0.0, k, residual });
    }
    let extrapolation_residual = match (ex_m, ex_p) {
        (None, None) => None,
        (a, b) => Some(a.unwrap_or(0.0).max(b.unwrap_or(0.0))),
    };
    Ok(TransmissionReport {
        mu,
        max_residual,
        per_sample,
        passed: max_residual <= tolerance,
        tolerance,
        derivative_source: source,
        extrapolation_residual,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IndexReport {
    pub mu0: C64,
    pub winding: f64,
    pub a_plus: C64,
    pub a_minus: C64,
    pub path_radius: f64,
    /// μ₀ minus the nearest integer (by real part): the class of μ₀ mod 1.
    pub congruence_class: C64,
    pub converged: bool,
    pub warnings: Vec<String>,
}

struct PathLogs {
    at_plus: C64,
    at_minus: C64,
    winding: f64,
}

/// Continuous log p(σ, τ) from τ = +T (principal branch) down to τ = −T.
fn track_log(p: &BoundarySymbol, sigma: f64, t: f64) -> Result<PathLogs> {
    let not_elliptic = |tau: f64| {
        Error::new(
            "symcore",
            "factorization_index",
            ErrorKind::NotElliptic,
            format!("symbol not elliptic on factorization path (tau = {tau})"),
        )
    };
    let eval = |phi: f64| -> Result<C64> {
        let tau = sigma * phi.tan();
        let v = p.eval(sigma, tau);
        if !(v.norm() > 0.0) || !v.re.is_finite() || !v.im.is_finite() {
            return Err(not_elliptic(tau));
        }
        Ok(v)
    };
    let phi_t = (t / sigma).atan();
    let start = eval(phi_t)?;
    let mut logv = start.ln();
    let mut prev = start;
    let steps = 2048;
    let dphi = 2.0 * phi_t / steps as f64;
    let mut total_arg = 0.0;
    for s in 0..steps {
        let a = phi_t - s as f64 * dphi;
        // adaptive bisection keeps successive argument increments below π/2
        let mut stack = vec![(a, a - dphi, 0u32)];
        while let Some((lo_phi, hi_phi, depth)) = stack.pop() {
            let v = eval(hi_phi)?;
            let inc = (v / prev).arg();
            if inc.abs() >= PI / 2.0 && depth < 40 {
                let mid = 0.5 * (lo_phi + hi_phi);
                stack.push((mid, hi_phi, depth + 1));
                stack.push((lo_phi, mid, depth + 1));
                continue;
            }
            if inc.abs() >= PI / 2.0 {
                return Err(not_elliptic(sigma * hi_phi.tan()));
            }
            logv += C64::new((v.norm() / prev.norm()).ln(), inc);
            total_arg += inc;
            prev = v;
        }
    }
    Ok(PathLogs { at_plus: start.ln(), at_minus: logv, winding: -total_arg / (2.0 * PI) })
}

/// Factorization index μ₀ = m/2 + (a₊ − a₋)/(2πi) with a_± extrapolated in 1/T.
pub fn factorization_index(p: &BoundarySymbol, sigma: f64, t: f64) -> Result<IndexReport> {
    if !(sigma > 0.0) || !(t > 0.0) {
        return Err(Error::invalid("symcore", "factorization_index", "sigma and T must be positive"));
    }
    let m = p.order_m;
    let limits = |r: f64| -> Result<(C64, C64, f64)> {
        let logs = track_log(p, sigma, r)?;
        let rad = (sigma * sigma + r * r).sqrt().ln();
        Ok((logs.at_plus - m * rad, logs.at_minus - m * rad, logs.winding))
    };
    let (ap1, am1, winding) = limits(t)?;
    let (ap2, am2, _) = limits(2.0 * t)?;
    let (ap4, am4, _) = limits(4.0 * t)?;
    let a_plus = 2.0 * ap2 - ap1;
    let a_minus = 2.0 * am2 - am1;
    let tol = 1e-6;
    let drift = (a_plus - (2.0 * ap4 - ap2)).norm().max((a_minus - (2.0 * am4 - am2)).norm());
    let converged = drift <= tol;
    let mut warnings = Vec::new();
    if !converged {
        warnings.push(format!("a_plus/a_minus limit not converged: extrapolations differ by {drift:.3e}"));
    }
    let mu0 = m / 2.0 + (a_plus - a_minus) / (2.0 * PI * I);
    let congruence_class = mu0 - mu0.re.round();
    Ok(IndexReport { mu0, winding, a_plus, a_minus, path_radius: t, congruence_class, converged, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::Expr;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn homogeneity_examples() {
        assert!(check_homogeneity(&BoundarySymbol::abs2pow(0.3), 32).unwrap() <= 1e-12);
        let lin = BoundarySymbol::from_expr(Expr::Add(Box::new(Expr::Sigma), Box::new(Expr::Mul(Box::new(Expr::Const(C64::new(0.0, 1.0))), Box::new(Expr::Xi)))), None).unwrap();
        assert!(check_homogeneity(&lin, 32).unwrap() <= 1e-12);
        let wrong = BoundarySymbol::from_fn(c(2.0), "sigma+i xi", |s, x| C64::new(s, x));
        assert!(check_homogeneity(&wrong, 32).unwrap() >= 0.5);
    }

    #[test]
    fn transmission_examples() {
        for &a in &[0.25, 0.5, 0.75, 1.3] {
            let r = check_mu_transmission(&BoundarySymbol::abs2pow(a), c(a), 3, Default::default()).unwrap();
            assert!(r.passed && r.max_residual <= 1e-8, "a={a}: {}", r.max_residual);
            let r = check_mu_transmission(&BoundarySymbol::abs2pow(a), c(a + 0.5), 3, Default::default()).unwrap();
            assert!(!r.passed);
            assert!((r.per_sample[0].residual - 2.0).abs() < 1e-12);
        }
        let nu = 0.37;
        let r = check_mu_transmission(&BoundarySymbol::chiplus(c(nu)), c(nu), 3, Default::default()).unwrap();
        assert!(r.passed, "{}", r.max_residual);
        assert_eq!(r.derivative_source, DerivativeSource::ClosedForm);
    }

    #[test]
    fn transmission_with_finite_differences() {
        let a = 0.4;
        let p = BoundarySymbol::from_fn(c(2.0 * a), "closure", move |s, x| c((s * s + x * x).powf(a)));
        let r = check_mu_transmission(&p, c(a), 3, Default::default()).unwrap();
        assert_eq!(r.derivative_source, DerivativeSource::FiniteDifference);
        assert!(r.passed, "{}", r.max_residual);
    }

    #[test]
    fn characteristic_point_is_rejected() {
        let p = BoundarySymbol::from_fn(c(1.0), "sigma", |s, _| c(s));
        assert!(check_mu_transmission(&p, c(0.0), 1, Default::default()).is_err());
    }

    #[test]
    fn index_examples() {
        for &a in &[0.25, 0.5, 0.65, 1.3] {
            let r = factorization_index(&BoundarySymbol::abs2pow(a), 1.0, 1e4).unwrap();
            assert!((r.mu0 - c(a)).norm() < 1e-6, "{a}: {}", r.mu0);
            assert!(r.converged);
        }
        let nu = C64::new(0.7, 0.2);
        let r = factorization_index(&BoundarySymbol::chiplus(nu), 2.0, 2e4).unwrap();
        assert!((r.mu0 - nu).norm() < 1e-6, "{}", r.mu0);
        let r = factorization_index(&BoundarySymbol::chiminus(nu), 1.0, 1e4).unwrap();
        assert!(r.mu0.norm() < 1e-6, "{}", r.mu0);
        // even symbol of order 3: (sigma^2 + 2 xi^2)^{3/2}
        let even = BoundarySymbol::from_fn(c(3.0), "even", |s, x| c((s * s + 2.0 * x * x).powf(1.5)));
        let r = factorization_index(&even, 1.0, 1e4).unwrap();
        assert!((r.mu0 - c(1.5)).norm() < 1e-6);
    }

    #[test]
    fn index_rejects_zero_on_path() {
        let p = BoundarySymbol::from_fn(c(1.0), "xi", |_, x| c(x));
        assert!(factorization_index(&p, 1.0, 1e4).is_err());
    }
}
