//! Reference solutions computed without the solvers they check.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use mutrans_core::quad::{gauss_legendre, tanh_sinh};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// u solving −u″ + σ²u = f on x > 0 with u(0) = 0, from the Green's function
/// G(x, y) = (e^{−σ|x−y|} − e^{−σ(x+y)})/(2σ) and composite Gauss–Legendre in y.
pub fn green_dirichlet(sigma: f64, f: impl Fn(f64) -> f64, xs: &[f64], y_max: f64) -> Vec<f64> {
    let (gx, gw) = gauss_legendre(16);
    let panel = 0.125;
    let integrate = |a: f64, b: f64, g: &dyn Fn(f64) -> f64| -> f64 {
        if b <= a {
            return 0.0;
        }
        let n = ((b - a) / panel).ceil().max(1.0) as usize;
        let w = (b - a) / n as f64;
        let mut s = 0.0;
        for p in 0..n {
            let (lo, hi) = (a + p as f64 * w, a + (p + 1) as f64 * w);
            for (t, wt) in gx.iter().zip(&gw) {
                let y = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
                s += 0.5 * (hi - lo) * wt * g(y);
            }
        }
        s
    };
    xs.iter()
        .map(|&x| {
            let kern = |y: f64| ((-sigma * (x - y).abs()).exp() - (-sigma * (x + y)).exp()) * f(y) / (2.0 * sigma);
            integrate(0.0, x, &kern) + integrate(x, y_max, &kern)
        })
        .collect()
}

/// Galerkin solution of r⁺OP((σ² + ξ²)^{1/2})e⁺u = e^{−x} on (0, X): hat functions of width h
/// enriched by ψ = x^{1/2}e^{−σx}/Γ(3/2), which carries the boundary behaviour.
pub struct SqrtGalerkin {
    pub h: f64,
    pub sigma: f64,
    pub hats: Vec<f64>,
    pub psi: f64,
}

impl SqrtGalerkin {
    pub fn solve(sigma: f64, h: f64, x_max: f64) -> SqrtGalerkin {
        let n = (x_max / h).round() as usize - 1;
        let t = toeplitz_entries(sigma, n, h, 8 * n);
        let dim = n + 1;
        let e2 = |s: f64| (s * h).exp() + (-s * h).exp() - 2.0;
        let node = |k: usize| (k + 1) as f64 * h;
        let m = Mat::from_fn(dim, dim, |i, j| match (i < n, j < n) {
            (true, true) => t[i.abs_diff(j)],
            (true, false) => (2.0 * sigma).sqrt() * (-sigma * node(i)).exp() * e2(sigma) / (sigma * sigma * h),
            (false, true) => (2.0 * sigma).sqrt() * (-sigma * node(j)).exp() * e2(sigma) / (sigma * sigma * h),
            (false, false) => 1.0 / (2.0 * sigma),
        });
        let rhs = Mat::from_fn(dim, 1, |i, _| {
            if i < n {
                (-node(i)).exp() * e2(1.0) / h
            } else {
                (1.0 + sigma).powf(-1.5)
            }
        });
        let llt = m.llt(Side::Lower).expect("Galerkin matrix is positive definite");
        let c = llt.solve(&rhs);
        SqrtGalerkin { h, sigma, hats: (0..n).map(|k| c[(k, 0)]).collect(), psi: c[(n, 0)] }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let s = x / self.h;
        let k = s.floor() as usize;
        let frac = s - k as f64;
        // node j of the hat basis sits at (j+1)h; the ends are pinned to zero
        let at = |j: usize| if j == 0 || j > self.hats.len() { 0.0 } else { self.hats[j - 1] };
        let hat = (1.0 - frac) * at(k) + frac * at(k + 1);
        hat + self.psi * x.sqrt() * (-self.sigma * x).exp() / gamma(1.5)
    }
}

/// (1/π)∫₀^∞ (σ² + ξ²)^{1/2} |φ̂(ξ)|² cos(ξdh) dξ for the hat φ of width h. The |ξ| part is
/// exact; the bounded remainder σ²/(√(σ²+ξ²) + ξ) is summed by a folded trapezoid rule.
fn toeplitz_entries(sigma: f64, n: usize, h: f64, k: usize) -> Vec<f64> {
    let abs_part = |d: i64| -> f64 {
        let w = [0.5, -2.0, 3.0, -2.0, 0.5];
        let mut t = 0.0;
        for (i, wi) in w.iter().enumerate() {
            let m = (d + i as i64 - 2).abs() as f64;
            if m > 0.0 {
                t += wi * m * m * m.ln();
            }
        }
        t / PI
    };
    let dxi = PI / (k as f64 * h);
    let j_max = (400.0 / h / dxi) as usize;
    let two_k = 2 * k;
    let mut fold = vec![0.0; two_k];
    for j in 0..=j_max {
        let xi = dxi * j as f64;
        let r = sigma * sigma / ((sigma * sigma + xi * xi).sqrt() + xi);
        let ph = if j == 0 { h * h } else { 16.0 * (xi * h / 2.0).sin().powi(4) / (xi.powi(4) * h * h) };
        let mut g = r * ph * dxi / PI;
        if j == 0 {
            g *= 0.5;
        }
        fold[j % two_k] += g;
    }
    let cos: Vec<f64> = (0..two_k).map(|m| (PI * m as f64 / k as f64).cos()).collect();
    (0..n)
        .map(|d| {
            let smooth: f64 = fold.iter().enumerate().map(|(m, v)| v * cos[(m * d) % two_k]).sum();
            abs_part(d as i64) + smooth
        })
        .collect()
}

/// (−Δ)^a(1 − x²)₊^a at x = 0 from the hypersingular integral
/// C_{1,a}∫₀^∞ (2w(0) − w(t) − w(−t)) t^{−1−2a} dt, 0 < a < 1.
pub fn getoor_value(a: f64) -> f64 {
    let c1 = 4f64.powf(a) * gamma(0.5 + a) / (PI.sqrt() * gamma(-a).abs());
    let near = tanh_sinh(|t, _, _| -2.0 * (a * (-t * t).ln_1p()).exp_m1() * t.powf(-1.0 - 2.0 * a), 0.0, 1.0, 9);
    c1 * (near + 1.0 / a)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn green_reproduces_closed_form() {
        let xs = [0.1, 1.0, 3.0, 7.5];
        let u = green_dirichlet(2.0, |y| (-y).exp(), &xs, 60.0);
        for (x, v) in xs.iter().zip(&u) {
            let want = ((-x).exp() - (-2.0 * x).exp()) / 3.0;
            assert!((v - want).abs() < 1e-13, "{x}: {v} vs {want}");
        }
    }

    #[test]
    fn galerkin_converges_to_erf_profile() {
        let want = |x: f64| (-x).exp() * statrs::function::erf::erf(x.sqrt()) / 3f64.sqrt();
        let err = |h: f64| {
            let g = SqrtGalerkin::solve(2.0, h, 16.0);
            (1..400).map(|i| i as f64 * 0.025).map(|x| (g.eval(x) - want(x)).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(0.04), err(0.02));
        assert!(e2 < 2e-4 && e2 < e1, "{e1:.3e} {e2:.3e}");
    }

    #[test]
    fn getoor_closed_form() {
        for a in [0.25, 0.5, 0.75] {
            let c = 4f64.powf(a) * gamma(a + 0.5) * gamma(a + 1.0) / PI.sqrt();
            assert!((getoor_value(a) / c - 1.0).abs() < 1e-8);
        }
    }
}
