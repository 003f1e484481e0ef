//! The acceptance battery. Each criterion returns its verdicts; runtimes are kept apart so
//! that reports stay deterministic apart from the timing block.

use crate::oracles::{getoor_value, green_dirichlet, SqrtGalerkin};
use crate::parse::parse_symbol;
use crate::report::Verdict;
use crate::tol;
use mutrans_core::fourierops::{
    multiplier_kernel, sobolev_norm, xi_minus_apply, xi_plus_apply, Grid, GridFunction, MultiplierSpec, SupportSide,
};
use mutrans_core::fracdomain::{
    assemble_fraclap, fracpow_variable, solve_dirichlet_homogeneous, solve_dirichlet_nonhomogeneous, Method,
};
use mutrans_core::halfline::{solve_homogeneous, ModelProblem, RESIDUAL_TOL};
use mutrans_core::muspace::{
    decompose, embedding_constant, mu_norm, poisson_apply, traces, transition_matrix, xi_boundary_values, TraceMethod,
};
use mutrans_core::symcore::{check_mu_transmission, factorization_index, BoundarySymbol, DerivativeSource};
use mutrans_core::wienerhopf::{factorize, winding, OrderZeroSymbol};
use mutrans_core::C64;
use serde::Serialize;
use serde_json::{json, Value};
use statrs::function::gamma::gamma;
use std::time::Instant;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub verdicts: Vec<Verdict>,
    pub results: Value,
    #[serde(skip)]
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        !self.verdicts.is_empty() && self.verdicts.iter().all(|v| v.passed)
    }

    /// The first failing verdicts, for one-line summaries.
    pub fn summary(&self) -> String {
        let bad: Vec<String> = self
            .verdicts
            .iter()
            .filter(|v| !v.passed)
            .take(3)
            .map(|v| match (v.measured, v.tolerance) {
                (Some(m), Some(t)) => format!("{} = {m:.3e} > {t:.1e}", v.name),
                _ => v.name.clone(),
            })
            .collect();
        if bad.is_empty() {
            format!("{} checks", self.verdicts.len())
        } else {
            bad.join("; ")
        }
    }
}

pub const CRITERIA: [(u8, &str, f64); 9] = [
    (1, "transmission and factorization index for (sigma^2+xi^2)^a", 1.0),
    (2, "Wiener-Hopf factorization of order-zero symbols", 2.0),
    (3, "transform pair for (sigma+i xi)^(-mu-1)", 2.0),
    (4, "half-line parametrix against oracles", 10.0),
    (5, "trace and Poisson algebra", 60.0),
    (6, "interval fractional Laplacian on (1-x^2)^a and homogeneous exponents", 60.0),
    (7, "nonhomogeneous interval problem, a = 1/2", 60.0),
    (8, "variable-coefficient power, a = 0.7", 120.0),
    (9, "property suites", 300.0),
];

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Collects verdicts; a module error becomes a failed verdict carrying the message.
#[derive(Default)]
struct Sheet {
    verdicts: Vec<Verdict>,
    results: serde_json::Map<String, Value>,
}

impl Sheet {
    fn at_most(&mut self, name: impl Into<String>, measured: f64, tolerance: f64) {
        self.verdicts.push(Verdict::at_most(name, measured, tolerance));
    }

    fn flag(&mut self, name: impl Into<String>, ok: bool) {
        self.verdicts.push(Verdict::flag(name, ok));
    }

    fn record(&mut self, key: impl Into<String>, v: Value) {
        self.results.insert(key.into(), v);
    }

    fn guard<T>(&mut self, what: &str, r: mutrans_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.flag(format!("{what}: {e}"), false);
                None
            }
        }
    }
}

pub fn run_criterion(id: u8) -> CriterionResult {
    let (_, title, budget_s) = CRITERIA[(id - 1) as usize];
    let t0 = Instant::now();
    let mut s = Sheet::default();
    match id {
        1 => transmission_and_index(&mut s),
        2 => wiener_hopf(&mut s),
        3 => transform_pair(&mut s),
        4 => halfline(&mut s),
        5 => trace_algebra(&mut s),
        6 => interval_laplacian(&mut s),
        7 => interval_nonhomogeneous(&mut s),
        8 => variable_power(&mut s),
        _ => properties(&mut s),
    }
    let elapsed_s = t0.elapsed().as_secs_f64();
    s.flag(format!("runtime below {budget_s} s"), elapsed_s < budget_s);
    CriterionResult { id, title, verdicts: s.verdicts, results: Value::Object(s.results), elapsed_s, budget_s }
}

/// Runs the selected criteria on a pool of `jobs` threads; output order follows `ids`.
pub fn run_suite(ids: &[u8], jobs: usize) -> Vec<CriterionResult> {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| ids.par_iter().map(|&id| run_criterion(id)).collect())
}

fn transmission_and_index(s: &mut Sheet) {
    for a in [0.25, 0.5, 0.75, 1.3] {
        let p = match parse_symbol(&format!("abs2pow({a})"), None, true) {
            Ok(p) => p,
            Err(e) => return s.flag(format!("parse abs2pow({a}): {e}"), false),
        };
        if let Some(r) = s.guard("transmission", check_mu_transmission(&p, c(a), 3, Default::default())) {
            s.flag(format!("a={a}: closed-form derivatives"), r.derivative_source == DerivativeSource::ClosedForm);
            s.at_most(format!("a={a}: transmission residual"), r.max_residual, tol(1e-8));
        }
        if let Some(r) = s.guard("index", factorization_index(&p, 1.0, 1e4)) {
            s.at_most(format!("a={a}: |mu0 - a|"), (r.mu0 - c(a)).norm(), tol(1e-6));
            s.record(format!("mu0_{a}"), json!(r.mu0.re));
        }
    }
}

fn bump(x: f64) -> f64 {
    let t = (x - 3.0) / 2.0;
    if t.abs() < 1.0 {
        (-1.0 / (1.0 - t * t)).exp()
    } else {
        0.0
    }
}

fn wiener_hopf(s: &mut Sheet) {
    let rational = OrderZeroSymbol::new("(1+xi^2)/(4+xi^2)", 1.0, |x| c((1.0 + x * x) / (4.0 + x * x)));
    if let Some(f) = s.guard("factorize rational", factorize(&rational)) {
        s.at_most("rational: reconstruction", f.recon_residual, tol(1e-10));
        s.at_most("rational: analyticity leakage", f.support_leakage, tol(1e-10));
        let g = Grid::new(16384, 64.0).unwrap();
        let data = GridFunction::from_fn(g, SupportSide::Nonneg, |x| c(bump(x)));
        if let Some(out) = s.guard("apply q+", mutrans_core::fourierops::apply_multiplier(&f.plus_multiplier(1.0), &data)) {
            s.at_most("OP(q+)e+ support leakage", out.l2_norm_on(-32.0, 0.9) / out.l2_norm(), tol(1e-8));
        }
    }
    let expo = OrderZeroSymbol::new("exp(1/(1+xi^2))", 1.0, |x| c((1.0 / (1.0 + x * x)).exp()));
    if let Some(f) = s.guard("factorize exponential", factorize(&expo)) {
        s.at_most("exponential: reconstruction", f.recon_residual, tol(1e-8));
    }
}

fn rel_l2_where(a: &GridFunction, b: &GridFunction, keep: impl Fn(f64) -> bool) -> f64 {
    let (mut num, mut den) = (0.0, 0.0);
    for k in 0..a.grid.n {
        if keep(a.x(k)) {
            num += (a.values[k] - b.values[k]).norm_sqr();
            den += b.values[k].norm_sqr();
        }
    }
    (num / den).sqrt()
}

fn transform_pair(s: &mut Sheet) {
    let g = Grid::new(1 << 14, 40.0).unwrap();
    let mut worst: f64 = 0.0;
    for mu in [-0.5, 0.0, 0.5, 1.5] {
        for sigma in [0.5, 1.0, 2.0] {
            let Some(k) = s.guard("kernel", multiplier_kernel(&MultiplierSpec::chi_plus(c(-mu - 1.0), sigma), g)) else {
                continue;
            };
            let exact = GridFunction::from_fn(g, SupportSide::Whole, |x| {
                if x > 0.0 {
                    c(x.powf(mu) * (-sigma * x).exp() / gamma(mu + 1.0))
                } else {
                    c(0.0)
                }
            });
            let e = rel_l2_where(&k, &exact, |x| x.abs() > 0.05);
            worst = worst.max(e);
            s.at_most(format!("mu={mu} sigma={sigma}"), e, tol(1e-5));
        }
    }
    s.record("max_rel_l2", json!(worst));
}

fn halfline(s: &mut Sheet) {
    let exp_data = |g: Grid| GridFunction::half_line(g, |x| c((-x).exp()));
    let g = Grid::new(8192, 40.0).unwrap();

    // a = 1: −u″ + 4u = e^{−x}
    let p1 = BoundarySymbol::abs2pow(1.0);
    if let Some(prob) = s.guard("model a=1", ModelProblem::new(p1, 2.0, g)) {
        if let Some(r) = s.guard("solve a=1", solve_homogeneous(&prob, &exp_data(g))) {
            let ks: Vec<usize> = (g.k0() + 1..g.n).filter(|&k| g.x(k) <= 20.0).collect();
            let xs: Vec<f64> = ks.iter().map(|&k| g.x(k)).collect();
            let o = green_dirichlet(2.0, |y| (-y).exp(), &xs, 80.0);
            let (mut num, mut den) = (0.0, 0.0);
            for (i, &k) in ks.iter().enumerate() {
                num += (r.u.values[k].re - o[i]).powi(2) + r.u.values[k].im.powi(2);
                den += o[i] * o[i];
            }
            s.at_most("a=1 vs Green's function oracle", (num / den).sqrt(), tol(1e-6));
        }
    }

    // a = 1/2 against the enriched Galerkin oracle, plus residual refinement
    let oracle = SqrtGalerkin::solve(2.0, 0.01, 16.0);
    let erf_gap = (1..400)
        .map(|i| i as f64 * 0.025)
        .map(|x| (oracle.eval(x) - (-x).exp() * statrs::function::erf::erf(x.sqrt()) / 3f64.sqrt()).abs())
        .fold(0.0, f64::max);
    s.record("galerkin_vs_closed_form_max", json!(erf_gap));
    let mut residuals = Vec::new();
    for n in [4096usize, 8192] {
        let g = Grid::new(n, 40.0).unwrap();
        let Some(prob) = s.guard("model a=1/2", ModelProblem::new(BoundarySymbol::abs2pow(0.5), 2.0, g)) else {
            return;
        };
        let Some(r) = s.guard("solve a=1/2", solve_homogeneous(&prob, &exp_data(g))) else {
            return;
        };
        residuals.push(r.residual);
        if n == 8192 {
            let (mut num, mut den) = (0.0, 0.0);
            for k in g.k0() + 1..g.n {
                let x = g.x(k);
                if x <= 10.0 {
                    let o = oracle.eval(x);
                    num += (r.u.values[k].re - o).powi(2) + r.u.values[k].im.powi(2);
                    den += o * o;
                }
            }
            s.at_most("a=1/2 vs dense truncated-operator oracle", (num / den).sqrt(), tol(1e-3));
            s.at_most("a=1/2 parametrix residual", r.residual, tol(RESIDUAL_TOL));
        }
    }
    s.record("residuals_n4096_n8192", json!(residuals));
    if residuals.len() == 2 {
        s.flag("residual halves under N -> 2N (or is below 1e-8)", residuals[1] <= 0.5 * residuals[0] || residuals[1] <= 1e-8);
    }
}

fn trace_algebra(s: &mut Sheet) {
    let g = Grid::new(8192, 40.0).unwrap();
    let phi = C64::new(1.0, 0.5);
    for mu in [-0.5, 0.3, 1.2] {
        let Some(u) = s.guard("poisson", poisson_apply(phi, c(mu), 0, 1.0, g)) else { continue };
        if let Some(t) = s.guard("trace", traces(&u, c(mu), 1, 1.0, TraceMethod::Limit)) {
            s.at_most(format!("mu={mu}: |gamma K phi - phi|"), (t.values[0] - phi).norm() / phi.norm(), tol(1e-6));
        }
    }
    for (mu, sigma) in [(0.3, 1.0), (-0.5, 0.7), (1.2, 1.5)] {
        let two = transition_matrix(c(mu), 2, sigma);
        let want = [[c(1.0), c(0.0)], [c(mu * sigma), c(1.0)]];
        let exact = (0..2).all(|j| (0..2).all(|k| two.rows[j][k] == want[j][k]));
        s.flag(format!("Phi(M=2) exact for mu={mu} sigma={sigma}"), exact);
        let three = transition_matrix(c(mu), 3, sigma);
        let Some(num) = numeric_phi(s, mu, 3, sigma, g) else { continue };
        let mut worst: f64 = 0.0;
        for j in 0..3 {
            for k in 0..3 {
                worst = worst.max((num[j][k] - three.rows[j][k]).norm());
            }
        }
        s.at_most(format!("Phi(M=3) vs numeric traces, mu={mu} sigma={sigma}"), worst, tol(1e-6));
    }
}

/// Φ from boundary values of Ξ^μ₊ applied to I^{μ+k}e^{−σx}, whose weighted traces are
/// (−σ)^{j−k}Γ(μ+j+1)/(Γ(μ+k+1)(j−k)!).
fn numeric_phi(s: &mut Sheet, mu: f64, m: usize, sigma: f64, g: Grid) -> Option<Vec<Vec<C64>>> {
    let mut psi = vec![vec![c(0.0); m]; m];
    let mut tr = vec![vec![c(0.0); m]; m];
    for k in 0..m {
        let nu = mu + k as f64;
        let u = GridFunction::half_line(g, move |x| if x > 0.0 { c(x.powf(nu) * (-sigma * x).exp() / gamma(nu + 1.0)) } else { c(0.0) });
        let p = s.guard("boundary values", xi_boundary_values(&u, c(mu), m, sigma))?;
        for j in 0..m {
            psi[j][k] = p[j];
            if j >= k {
                let fact: f64 = (1..=(j - k)).map(|i| i as f64).product();
                tr[j][k] = c((-sigma).powi((j - k) as i32) * gamma(mu + j as f64 + 1.0) / gamma(nu + 1.0) / fact);
            }
        }
    }
    // Φ = Ψ T⁻¹ with T lower triangular
    let mut phi = vec![vec![c(0.0); m]; m];
    for row in 0..m {
        for k in (0..m).rev() {
            let mut acc = psi[row][k];
            for l in k + 1..m {
                acc -= phi[row][l] * tr[l][k];
            }
            phi[row][k] = acc / tr[k][k];
        }
    }
    Some(phi)
}

fn interval_laplacian(s: &mut Sheet) {
    for a in [0.25, 0.5, 0.75] {
        let ca = getoor_value(a);
        s.record(format!("C({a})"), json!(ca));
        for method in [Method::EigenPower, Method::BoxFft] {
            let Some(op) = s.guard("assemble", assemble_fraclap(a, 2048, method)) else { continue };
            let u: Vec<f64> = op.nodes.iter().map(|x| (1.0 - x * x).powf(a)).collect();
            let au = op.apply(&u);
            let err = op
                .nodes
                .iter()
                .zip(&au)
                .filter(|(x, _)| x.abs() <= 0.5)
                .map(|(_, v)| (v / ca - 1.0).abs())
                .fold(0.0, f64::max);
            s.at_most(format!("a={a} {method:?}: action on (1-x^2)^a vs C(a)"), err, tol(1e-3));
            if method == Method::EigenPower {
                if let Some(r) = s.guard("solve", solve_dirichlet_homogeneous(&op, &vec![1.0; op.dim()])) {
                    for (side, fit) in [("left", &r.left), ("right", &r.right)] {
                        match fit {
                            Some(f) => s.at_most(format!("a={a}: |alpha - a| {side}"), (f.alpha_hat - a).abs(), tol(0.05)),
                            None => s.flag(format!("a={a}: exponent fit {side}"), false),
                        }
                    }
                }
            }
        }
    }
}

fn interval_nonhomogeneous(s: &mut Sheet) {
    let a = 0.5;
    let Some(op) = s.guard("assemble", assemble_fraclap(a, 4096, Method::EigenPower)) else { return };
    let Some(r) = s.guard("solve", solve_dirichlet_nonhomogeneous(&op, &vec![0.0; op.dim()], 1.0, 1.0)) else {
        return;
    };
    for (side, fit) in [("left", &r.left), ("right", &r.right)] {
        match fit {
            Some(f) => s.at_most(format!("|alpha + 1/2| {side}"), (f.alpha_hat - (a - 1.0)).abs(), tol(0.05)),
            None => s.flag(format!("exponent fit {side}"), false),
        }
    }
    if let Some(t) = &r.traces {
        s.at_most("trace recovery left", (t.uncalibrated.0 - 1.0).abs(), tol(5e-2));
        s.at_most("trace recovery right", (t.uncalibrated.1 - 1.0).abs(), tol(5e-2));
        s.record("uncalibrated_traces", json!([t.uncalibrated.0, t.uncalibrated.1]));
    }
    s.record("interior_residual", json!(r.interior_residual));
}

fn variable_power(s: &mut Sheet) {
    let a = 0.7;
    let Some(op) = s.guard("assemble", fracpow_variable(|x| 1.0 + 0.5 * x * x, a, 1024)) else { return };
    let Some(r) = s.guard("solve", solve_dirichlet_homogeneous(&op, &vec![1.0; op.dim()])) else { return };
    for (side, fit) in [("left", &r.left), ("right", &r.right)] {
        match fit {
            Some(f) => {
                s.at_most(format!("|alpha - 0.7| {side}"), (f.alpha_hat - a).abs(), tol(0.05));
                s.record(format!("alpha_{side}"), json!(f.alpha_hat));
            }
            None => s.flag(format!("exponent fit {side}"), false),
        }
    }
}

fn properties(s: &mut Sheet) {
    // support preservation of plus multipliers
    let g = Grid::new(16384, 64.0).unwrap();
    let data = GridFunction::from_fn(g, SupportSide::Nonneg, |x| c(bump(x)));
    for (mu, sigma) in [(-1.2, 0.5), (-0.5, 2.0), (0.5, 1.0), (1.4, 0.3)] {
        if let Some(out) = s.guard("xi plus", xi_plus_apply(c(mu), sigma, &data)) {
            s.at_most(format!("support preservation mu={mu} sigma={sigma}"), out.l2_norm_on(-32.0, 0.9) / out.l2_norm(), tol(1e-8));
        }
    }

    // composition and adjoint identities
    let g = Grid::new(512, 12.0).unwrap();
    let f = GridFunction::from_fn(g, SupportSide::Whole, |x| c((-x * x).exp()));
    let h = GridFunction::from_fn(g, SupportSide::Whole, |x| C64::new((-(x - 0.7).powi(2)).exp(), x * (-x * x).exp()));
    for (m1, m2, sigma) in [(C64::new(0.4, 0.2), C64::new(-1.1, 0.5), 0.8), (C64::new(-1.4, 0.0), C64::new(0.9, -0.3), 2.5)] {
        let lhs = xi_plus_apply(m1, sigma, &f).and_then(|v| xi_plus_apply(m2, sigma, &v));
        let rhs = xi_plus_apply(m1 + m2, sigma, &f);
        if let (Some(l), Some(r)) = (s.guard("compose", lhs), s.guard("compose", rhs)) {
            s.at_most(format!("composition m1={m1} m2={m2}"), l.sub(&r).l2_norm() / r.l2_norm(), tol(1e-9));
        }
        let a = xi_plus_apply(m1, sigma, &f).map(|v| v.inner(&h));
        let b = xi_minus_apply(m1.conj(), sigma, &h).map(|v| f.inner(&v));
        if let (Some(a), Some(b)) = (s.guard("adjoint", a), s.guard("adjoint", b)) {
            s.at_most(format!("adjoint m={m1}"), (a - b).norm() / a.norm().max(1e-2), tol(1e-9));
        }
        for sob in [-0.5, 1.0] {
            if let Some(v) = s.guard("homeomorphism", xi_plus_apply(C64::new(m1.re, 0.0), sigma, &f)) {
                let ratio = sobolev_norm(&v, sob - m1.re) / sobolev_norm(&f, sob);
                let (lo, hi) = (sigma.powf(m1.re).min(1.0), sigma.powf(m1.re).max(1.0));
                s.flag(format!("Sobolev bound mu={} s={sob}", m1.re), ratio >= lo * (1.0 - 1e-12) && ratio <= hi * (1.0 + 1e-12));
            }
        }
    }

    // weighted spaces: embedding and kernel of the trace
    let g = Grid::new(8192, 40.0).unwrap();
    for (mu, t, sigma, a) in [(0.3, 0.1, 1.0, 0.5), (-0.2, 0.3, 2.5, -0.7), (1.1, -0.1, 0.4, 0.2)] {
        let u = GridFunction::half_line(g, move |x| c(x.powf(mu) * (1.0 + a * x) * (-x).exp()));
        let lo = mu_norm(&u, c(mu - 1.0), mu + t, sigma);
        let hi = mu_norm(&u, c(mu), mu + t, sigma);
        if let (Some(lo), Some(hi)) = (s.guard("mu norm", lo), s.guard("mu norm", hi)) {
            s.flag(
                format!("embedding mu={mu} s={} sigma={sigma}", mu + t),
                lo.value <= embedding_constant(sigma) * hi.value * (1.0 + 1e-6),
            );
        }
        for m in 1..=3 {
            if let Some(d) = s.guard("decompose", decompose(&u, c(mu), m, sigma)) {
                let worst = d.remainder_traces.iter().map(|t| t.norm()).fold(0.0, f64::max);
                s.at_most(format!("kernel of trace mu={mu} M={m}"), worst, tol(1e-5));
            }
        }
    }

    // factorization index is congruent to the type mod 1
    let cases: [(BoundarySymbol, C64); 5] = [
        (BoundarySymbol::abs2pow(0.35), c(0.35)),
        (BoundarySymbol::abs2pow(1.7), c(1.7)),
        (BoundarySymbol::chiplus(c(0.6)), c(0.6)),
        (BoundarySymbol::chiminus(c(0.8)), c(0.0)),
        (BoundarySymbol::abs2pow(0.4).mul(&BoundarySymbol::chiplus(c(0.9))), c(1.3)),
    ];
    for (p, mu) in cases {
        let tr = s.guard("transmission", check_mu_transmission(&p, mu, 3, Default::default()));
        let ix = s.guard("index", factorization_index(&p, 1.0, 1e4));
        if let (Some(tr), Some(ix)) = (tr, ix) {
            let d = ix.mu0 - mu;
            s.flag(format!("{}: type {mu}", p.label), tr.passed);
            s.at_most(format!("{}: mu0 - mu mod 1", p.label), (d.re - d.re.round()).abs().max(d.im.abs()), tol(1e-6));
        }
    }

    // winding additivity and factor reconstruction
    let mobius = |k: i32, a: f64| {
        OrderZeroSymbol::new("mobius", 1.0, move |x| ((c(x) - C64::new(0.0, a)) / (c(x) + C64::new(0.0, a))).powi(k))
    };
    for (k1, k2) in [(1, 2), (-2, 1), (3, -3)] {
        let (p, q) = (mobius(k1, 0.7), mobius(k2, 2.0));
        if let (Some(wp), Some(wpq)) = (s.guard("winding", winding(&p)), s.guard("winding", winding(&p.mul(&q)))) {
            s.flag(format!("winding additive {k1}+{k2}"), wp == k1 as i64 && wpq == (k1 + k2) as i64);
        }
    }
    for (b, d, e) in [(0.3, 2.0, 0.5), (2.5, 0.4, -0.8)] {
        let q = OrderZeroSymbol::new("q", 1.0, move |x| c((b * b + x * x) / (d * d + x * x)) * c(e * x / (1.0 + x * x)).exp());
        if let Some(f) = s.guard("factorize", factorize(&q)) {
            s.at_most(format!("reconstruction b={b} d={d} e={e}"), f.recon_residual, tol(1e-8));
            s.at_most(format!("leakage b={b} d={d} e={e}"), f.support_leakage, tol(1e-10));
        }
    }

    // interval operators are symmetric and positive definite
    for (a, method) in [(0.2, Method::BoxFft), (1.6, Method::EigenPower), (0.9, Method::EigenPower)] {
        if let Some(op) = s.guard("assemble", assemble_fraclap(a, 256, method)) {
            s.at_most(format!("symmetry a={a} {method:?}"), op.symmetry_defect(), 1e-10);
            s.flag(format!("positive definite a={a} {method:?}"), op.matrix.llt(faer::Side::Lower).is_ok());
        }
    }
}
