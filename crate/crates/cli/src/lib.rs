//! Command-line front end: symbol parsing, run configuration, per-command pipelines, the
//! acceptance suite and JSON reports.

pub mod commands;
pub mod config;
pub mod oracles;
pub mod parse;
pub mod report;
pub mod suite;

use std::sync::OnceLock;

static TOL_SCALE: OnceLock<f64> = OnceLock::new();

/// Multiplier on every tolerance, from MUTRANS_TOL_SCALE (default 1).
pub fn tol_scale() -> f64 {
    *TOL_SCALE.get_or_init(|| {
        std::env::var("MUTRANS_TOL_SCALE").ok().and_then(|s| s.trim().parse::<f64>().ok()).filter(|s| *s > 0.0).unwrap_or(1.0)
    })
}

/// Sets the scale for this process when no environment value was read yet.
pub fn set_tol_scale(s: f64) -> bool {
    TOL_SCALE.set(s).is_ok()
}

pub fn tol(t: f64) -> f64 {
    t * tol_scale()
}
