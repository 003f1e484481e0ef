//! Per-thread FFT plan cache and the centred transform pair used by every multiplier.

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<(usize, bool), Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plan(n: usize, forward: bool) -> Arc<dyn Fft<f64>> {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        let (planner, cache) = &mut *p;
        cache
            .entry((n, forward))
            .or_insert_with(|| if forward { planner.plan_fft_forward(n) } else { planner.plan_fft_inverse(n) })
            .clone()
    })
}

/// Σ_k v_k e^{−iξ_j x_k} for nodes x_k = (k − N/2)h, in FFT frequency order (no h factor).
pub fn forward(values: &[C64]) -> Vec<C64> {
    let n = values.len();
    let mut buf: Vec<C64> = (0..n).map(|k| values[(k + n / 2) % n]).collect();
    plan(n, true).process(&mut buf);
    buf
}

/// Inverse of [`forward`].
pub fn inverse(spectrum: &[C64]) -> Vec<C64> {
    let n = spectrum.len();
    let mut buf = spectrum.to_vec();
    plan(n, false).process(&mut buf);
    let scale = 1.0 / n as f64;
    (0..n).map(|k| buf[(k + n - n / 2) % n] * scale).collect()
}

/// Plain complex FFT in place (no centring), forward or inverse without scaling.
pub fn raw(buf: &mut [C64], forward: bool) {
    plan(buf.len(), forward).process(buf);
}
