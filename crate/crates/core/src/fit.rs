//! Small least-squares helpers shared by the trace and exponent fits.

use faer::prelude::*;
use faer::Mat;
use num_complex::Complex64 as C64;

/// Least-squares coefficients of Σ_k c_k φ_k(x_i) ≈ y_i, given the design matrix
/// rows φ(x_i). Returns the coefficients and the max abs residual.
pub fn lstsq(design: &[Vec<f64>], y: &[C64]) -> (Vec<C64>, f64) {
    let m = design.len();
    let n = design[0].len();
    // column scaling keeps QR well conditioned for monomial bases
    let scale: Vec<f64> = (0..n)
        .map(|j| {
            let s = design.iter().map(|r| r[j] * r[j]).sum::<f64>().sqrt();
            if s > 0.0 {
                s
            } else {
                1.0
            }
        })
        .collect();
    let a = Mat::<C64>::from_fn(m, n, |i, j| C64::new(design[i][j] / scale[j], 0.0));
    let b = Mat::<C64>::from_fn(m, 1, |i, _| y[i]);
    let qr = a.qr();
    let x = qr.solve_lstsq(&b);
    let coef: Vec<C64> = (0..n).map(|j| x[(j, 0)] / scale[j]).collect();
    let mut res: f64 = 0.0;
    for i in 0..m {
        let fit: C64 = (0..n).map(|j| coef[j] * design[i][j]).sum();
        res = res.max((fit - y[i]).norm());
    }
    (coef, res)
}

/// Ordinary least-squares line y ≈ intercept + slope·x; returns (slope, intercept, max abs residual).
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let res = x
        .iter()
        .zip(y)
        .map(|(a, b)| (icpt + slope * a - b).abs())
        .fold(0.0, f64::max);
    (slope, icpt, res)
}
