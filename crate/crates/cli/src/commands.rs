//! One pipeline per command. Each returns a report; usage problems are kept apart from
//! numeric failures so that the binary can map them to exit codes 1 and 2.

use crate::config::{parse_window, RunConfig, UsageError};
use crate::parse::{parse_symbol, SymbolError};
use crate::report::{Report, Verdict, SCHEMA_VERSION};
use crate::suite::{run_suite, CRITERIA};
use crate::tol;
use mutrans_core::fourierops::{Grid, GridFunction, SupportSide};
use mutrans_core::fracdomain::{
    assemble_fraclap_with, fit_boundary_exponent, fracpow_variable_with, getoor_constant, solve_dirichlet_homogeneous,
    solve_dirichlet_nonhomogeneous, Endpoint, ExponentFit, IntervalSolveReport, Method, DEFAULT_L_BOX, VARIABLE_L_BOX,
};
use mutrans_core::halfline::{solve_homogeneous, solve_nonhomogeneous, ModelProblem, RESIDUAL_TOL};
use mutrans_core::muspace::{decompose, mu_norm, poisson_apply, traces, TraceMethod, TRACE_FIT_TOL};
use mutrans_core::symcore::{check_homogeneity, check_mu_transmission, factorization_index, BoundarySymbol, TransmissionOptions};
use mutrans_core::wienerhopf::{factorize, normalize_symbol};
use mutrans_core::{ErrorKind, C64};
use serde_json::{json, Map, Value};
use std::io::Write;
use std::path::Path;
use std::time::Instant;

#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    /// A module error; carries module and operation in its message.
    Numeric(String),
}

impl std::fmt::Display for CommandError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CommandError::Usage(m) => write!(f, "usage error: {m}"),
            CommandError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<UsageError> for CommandError {
    fn from(e: UsageError) -> Self {
        CommandError::Usage(e.0)
    }
}

impl From<mutrans_core::Error> for CommandError {
    fn from(e: mutrans_core::Error) -> Self {
        if e.kind == ErrorKind::InvalidInput {
            CommandError::Usage(e.to_string())
        } else {
            CommandError::Numeric(e.to_string())
        }
    }
}

impl From<SymbolError> for CommandError {
    fn from(e: SymbolError) -> Self {
        match e {
            SymbolError::Core(e) => e.into(),
            other => CommandError::Usage(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CommandError {
    fn from(e: std::io::Error) -> Self {
        CommandError::Usage(e.to_string())
    }
}

type Res<T> = Result<T, CommandError>;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn cplx(z: C64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn need<T: Clone>(v: &Option<T>, name: &str) -> Res<T> {
    v.clone().ok_or_else(|| CommandError::Usage(format!("--{name} is required")))
}

fn positive(v: f64, name: &str) -> Res<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CommandError::Usage(format!("--{name} must be positive")))
    }
}

fn symbol(cfg: &RunConfig) -> Res<BoundarySymbol> {
    let src = match (&cfg.symbol, cfg.a) {
        (Some(s), _) => s.clone(),
        (None, Some(a)) => format!("abs2pow({a})"),
        _ => return Err(CommandError::Usage("--symbol is required".into())),
    };
    Ok(parse_symbol(&src, cfg.order.map(c), false)?)
}

fn create(path: &Path) -> Res<std::io::BufWriter<std::fs::File>> {
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Recorded inputs: the resolved configuration without empty fields.
pub fn inputs_of(cfg: &RunConfig) -> Value {
    let mut m: Map<String, Value> = match serde_json::to_value(cfg) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    };
    m.remove("out");
    Value::Object(m)
}

struct Body {
    results: Map<String, Value>,
    verdicts: Vec<Verdict>,
    timings: Map<String, Value>,
}

impl Body {
    fn new() -> Self {
        Body { results: Map::new(), verdicts: Vec::new(), timings: Map::new() }
    }

    fn put(&mut self, k: &str, v: Value) {
        self.results.insert(k.into(), v);
    }
}

/// Runs a resolved configuration.
pub fn run(cfg: &RunConfig) -> Res<Report> {
    if let Some(s) = cfg.tol_scale {
        positive(s, "tol-scale")?;
        crate::set_tol_scale(s);
    }
    let command = need(&cfg.command, "command")?;
    let t0 = Instant::now();
    let mut b = Body::new();
    match command.as_str() {
        "check" => check(cfg, &mut b)?,
        "index" => index(cfg, &mut b)?,
        "factorize" => factorize_cmd(cfg, &mut b)?,
        "solve-halfline" => solve_halfline(cfg, &mut b)?,
        "solve-interval" => solve_interval(cfg, &mut b)?,
        "trace" => trace(cfg, &mut b)?,
        "fit-exponent" => fit_exponent(cfg, &mut b)?,
        "suite" => suite(cfg, &mut b)?,
        other => return Err(CommandError::Usage(format!("unknown command '{other}'"))),
    }
    b.timings.insert("total_s".into(), json!(t0.elapsed().as_secs_f64()));
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        command,
        inputs: inputs_of(cfg),
        results: Value::Object(b.results),
        verdicts: b.verdicts,
        timings: Value::Object(b.timings),
    })
}

fn check(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let p = symbol(cfg)?;
    let mu = cfg.mu.unwrap_or(0.0);
    let opts = TransmissionOptions { tol_closed_form: tol(1e-8), tol_finite_difference: tol(1e-4) };
    let r = check_mu_transmission(&p, c(mu), cfg.m.unwrap_or(3), opts)?;
    let defect = check_homogeneity(&p, 64)?;
    b.put("symbol", json!(p.label));
    b.put("order", cplx(p.order_m));
    b.put("homogeneity_defect", json!(defect));
    b.put("transmission", serde_json::to_value(&r).unwrap_or(Value::Null));
    b.verdicts.push(Verdict::at_most("transmission residual", r.max_residual, r.tolerance));
    Ok(())
}

fn index(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let p = symbol(cfg)?;
    let sigma = positive(cfg.sigma.unwrap_or(1.0), "sigma")?;
    let r = factorization_index(&p, sigma, cfg.t.unwrap_or(1e4))?;
    b.put("mu0", cplx(r.mu0));
    b.put("index", serde_json::to_value(&r).unwrap_or(Value::Null));
    b.verdicts.push(Verdict::flag("index path converged", r.converged));
    if let Some(mu) = cfg.mu {
        let d = r.mu0 - c(mu);
        let off = (d.re - d.re.round()).abs().max(d.im.abs());
        b.verdicts.push(Verdict::at_most("mu0 congruent to mu mod 1", off, tol(1e-6)));
    }
    Ok(())
}

fn factorize_cmd(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let p = symbol(cfg)?;
    let sigma = positive(cfg.sigma.unwrap_or(1.0), "sigma")?;
    let mu0 = match cfg.mu {
        Some(m) => c(m),
        None => factorization_index(&p, sigma, cfg.t.unwrap_or(1e4))?.mu0,
    };
    let q = normalize_symbol(&p, mu0, sigma)?;
    let f = factorize(&q)?;
    b.put("mu0", cplx(mu0));
    b.put("factors", serde_json::to_value(&f).unwrap_or(Value::Null));
    b.verdicts.push(Verdict::at_most("reconstruction", f.recon_residual, tol(1e-8)));
    b.verdicts.push(Verdict::at_most("analyticity leakage", f.support_leakage, tol(1e-8)));
    if let Some(path) = &cfg.dump_grid {
        f.write_csv(create(path)?)?;
    }
    Ok(())
}

fn line_grid(cfg: &RunConfig, n: usize, l: f64) -> Res<Grid> {
    Ok(Grid::new(cfg.n.unwrap_or(n), positive(cfg.l.unwrap_or(l), "L")?)?)
}

fn solve_halfline(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let p = symbol(cfg)?;
    let sigma = positive(cfg.sigma.unwrap_or(1.0), "sigma")?;
    let g = line_grid(cfg, 8192, 40.0)?;
    let data: fn(f64) -> f64 = match cfg.f.as_deref().unwrap_or("exp") {
        "exp" => |x| (-x).exp(),
        "gauss" => |x| (-(x - 2.0) * (x - 2.0)).exp(),
        "zero" => |_| 0.0,
        other => return Err(CommandError::Usage(format!("unknown half-line data '{other}' (exp, gauss, zero)"))),
    };
    let f = GridFunction::half_line(g, |x| c(data(x)));
    let prob = match cfg.mu {
        Some(mu) => ModelProblem::with_mu0(p, c(mu), sigma, g)?,
        None => ModelProblem::new(p, sigma, g)?,
    };
    let r = match cfg.phi {
        Some(phi) => solve_nonhomogeneous(&prob, &f, c(phi))?,
        None => solve_homogeneous(&prob, &f)?,
    };
    b.put("mu0", cplx(r.mu0));
    b.put("method", json!(r.method));
    b.put("residual", json!(r.residual));
    b.put("traces", r.traces.as_ref().map(|t| t.values.iter().map(|v| cplx(*v)).collect::<Vec<_>>()).into());
    b.put("alpha_hat", r.exponent_fit.as_ref().map(|e| e.alpha_hat).into());
    b.put("warnings", json!(r.warnings));
    b.verdicts.push(Verdict::at_most("parametrix residual", r.residual, tol(RESIDUAL_TOL)));
    if let Some(path) = &cfg.dump_grid {
        r.u.write_csv(create(path)?)?;
    }
    Ok(())
}

fn interval_load(name: &str, a: f64, x: f64) -> Option<f64> {
    match name {
        "const" | "one" => Some(1.0),
        "odd" => Some(x),
        "getoor" => Some(getoor_constant(a)),
        "zero" => Some(0.0),
        _ => None,
    }
}

fn fit_json(f: &Option<ExponentFit>) -> Value {
    match f {
        Some(f) => json!({"alpha_hat": f.alpha_hat, "window": [f.window.0, f.window.1], "fit_residual": f.fit_residual}),
        None => Value::Null,
    }
}

fn solve_interval(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let a = need(&cfg.a, "a")?;
    let n = cfg.n.unwrap_or(2048);
    let load = cfg.f.clone().unwrap_or_else(|| "const".into());
    if interval_load(&load, a, 0.0).is_none() {
        return Err(CommandError::Usage(format!("unknown interval load '{load}' (const, one, odd, getoor, zero)")));
    }
    let t0 = Instant::now();
    let variable = cfg.c0.is_some() || cfg.c2.is_some();
    let op = if variable {
        let (c0, c2) = (cfg.c0.unwrap_or(1.0), cfg.c2.unwrap_or(0.0));
        fracpow_variable_with(move |x| c0 + c2 * x * x, a, n, cfg.l.unwrap_or(VARIABLE_L_BOX))?
    } else {
        let method = match cfg.method.as_deref().unwrap_or("eigen_power") {
            "eigen_power" => Method::EigenPower,
            "box_fft" => Method::BoxFft,
            other => return Err(CommandError::Usage(format!("unknown method '{other}' (eigen_power, box_fft)"))),
        };
        assemble_fraclap_with(a, n, method, cfg.l.unwrap_or(DEFAULT_L_BOX))?
    };
    b.timings.insert("assembly_s".into(), json!(t0.elapsed().as_secs_f64()));
    if let Some(path) = &cfg.dump_matrix {
        op.write_binary(create(path)?)?;
    }
    let f: Vec<f64> = op.nodes.iter().map(|&x| interval_load(&load, a, x).unwrap_or(0.0)).collect();
    let (pl, pr) = (cfg.phi_left.unwrap_or(0.0), cfg.phi_right.unwrap_or(0.0));
    let t1 = Instant::now();
    let mut r: IntervalSolveReport =
        if pl != 0.0 || pr != 0.0 { solve_dirichlet_nonhomogeneous(&op, &f, pl, pr)? } else { solve_dirichlet_homogeneous(&op, &f)? };
    b.timings.insert("solve_s".into(), json!(t1.elapsed().as_secs_f64()));
    if let Some(w) = &cfg.window {
        let w = parse_window(w)?;
        r.left = fit_boundary_exponent(&r.nodes, &r.u, Endpoint::Left, Some(w)).ok();
        r.right = fit_boundary_exponent(&r.nodes, &r.u, Endpoint::Right, Some(w)).ok();
    }
    b.put("dim", json!(op.dim()));
    b.put("h", json!(op.h));
    b.put("construction", serde_json::to_value(&op.construction).unwrap_or(Value::Null));
    b.put("residual", json!(r.residual));
    b.put("interior_residual", r.interior_residual.into());
    b.put("left", fit_json(&r.left));
    b.put("right", fit_json(&r.right));
    b.put("traces", serde_json::to_value(&r.traces).unwrap_or(Value::Null));
    b.put("warnings", json!(r.warnings));
    let endpoint = cfg.endpoint.as_deref().unwrap_or("both");
    let sides: Vec<(&str, &Option<ExponentFit>, f64)> = match endpoint {
        "left" => vec![("left", &r.left, pl)],
        "right" => vec![("right", &r.right, pr)],
        "both" => vec![("left", &r.left, pl), ("right", &r.right, pr)],
        other => return Err(CommandError::Usage(format!("unknown endpoint '{other}'"))),
    };
    for (side, fit, phi) in sides {
        let expected = if phi != 0.0 { a - 1.0 } else { a };
        match fit {
            Some(fit) if load != "zero" || phi != 0.0 => {
                b.verdicts.push(Verdict::at_most(format!("|alpha - {expected}| at {side} end"), (fit.alpha_hat - expected).abs(), tol(0.05)))
            }
            Some(_) => {}
            None => b.verdicts.push(Verdict::flag(format!("exponent fit at {side} end is inconclusive"), false)),
        }
    }
    if load == "getoor" && !variable && pl == 0.0 && pr == 0.0 {
        let err = op.nodes.iter().zip(&r.u).map(|(x, u)| (u - (1.0 - x * x).powf(a)).abs()).fold(0.0, f64::max);
        b.put("max_error_vs_power", json!(err));
        b.verdicts.push(Verdict::at_most("solution vs (1-x^2)^a", err, tol(1e-3)));
    }
    b.verdicts.push(Verdict::at_most("linear residual", r.residual, tol(1e-8)));
    if let Some(path) = &cfg.dump_grid {
        let mut w = create(path)?;
        writeln!(w, "x,u")?;
        for (x, u) in r.nodes.iter().zip(&r.u) {
            writeln!(w, "{x:.17e},{u:.17e}")?;
        }
    }
    Ok(())
}

fn trace(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let mu = cfg.mu.unwrap_or(0.0);
    let sigma = positive(cfg.sigma.unwrap_or(1.0), "sigma")?;
    let m = cfg.m.unwrap_or(2);
    let phi = cfg.phi.unwrap_or(1.0);
    let u = match (&cfg.input, cfg.f.as_deref().unwrap_or("poisson")) {
        (Some(p), _) => GridFunction::read_csv(std::fs::File::open(p)?, SupportSide::Nonneg)?,
        (None, "poisson") => poisson_apply(c(phi), c(mu), 0, sigma, line_grid(cfg, 8192, 40.0)?)?,
        (None, "layer") => GridFunction::half_line(line_grid(cfg, 8192, 40.0)?, move |x| c(phi * x.powf(mu) * (1.0 + x) * (-x).exp())),
        (None, other) => return Err(CommandError::Usage(format!("unknown trace data '{other}' (poisson, layer)"))),
    };
    let lim = traces(&u, c(mu), m, sigma, TraceMethod::Limit)?;
    let xi = traces(&u, c(mu), m, sigma, TraceMethod::Xi)?;
    let d = decompose(&u, c(mu), m, sigma)?;
    let vals = |v: &[C64]| v.iter().map(|z| cplx(*z)).collect::<Vec<_>>();
    b.put("traces_limit", json!(vals(&lim.values)));
    b.put("traces_xi", json!(vals(&xi.values)));
    b.put("fit_residual", json!(lim.fit_residual));
    b.put("poisson_data", json!(vals(&d.phi)));
    b.put("remainder_traces", json!(vals(&d.remainder_traces)));
    if let Some(s) = cfg.s {
        let nrm = mu_norm(&u, c(mu), s, sigma)?;
        b.put("mu_norm", json!({"value": nrm.value, "finite": nrm.finite, "jump": cplx(nrm.jump)}));
    }
    b.verdicts.push(Verdict::at_most("trace window fit residual", lim.fit_residual, tol(TRACE_FIT_TOL)));
    let gap = lim.values.iter().zip(&xi.values).map(|(a, b)| (a - b).norm() / a.norm().max(1.0)).fold(0.0, f64::max);
    b.verdicts.push(Verdict::at_most("limit and Xi traces agree", gap, tol(1e-5)));
    let rem = d.remainder_traces.iter().map(|z| z.norm()).fold(0.0, f64::max);
    b.verdicts.push(Verdict::at_most("remainder has zero traces", rem, tol(1e-5)));
    if cfg.input.is_none() && cfg.f.as_deref().unwrap_or("poisson") == "poisson" {
        b.verdicts.push(Verdict::at_most("trace of Poisson field recovers phi", (lim.values[0] - c(phi)).norm() / phi.abs().max(1e-300), tol(1e-6)));
    }
    Ok(())
}

/// Reads `x,u` rows (header optional).
fn read_xu(path: &Path) -> Res<(Vec<f64>, Vec<f64>)> {
    let text = std::fs::read_to_string(path)?;
    let (mut xs, mut us) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| CommandError::Usage(format!("{}: line {}: not a number", path.display(), i + 1)));
        if cols.len() < 2 {
            return Err(CommandError::Usage(format!("{}: line {}: expected x,u", path.display(), i + 1)));
        }
        xs.push(num(cols[0])?);
        us.push(num(cols[1])?);
    }
    Ok((xs, us))
}

fn fit_exponent(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let (xs, us) = read_xu(&need(&cfg.input, "input")?)?;
    let window = cfg.window.as_deref().map(parse_window).transpose()?;
    let ends: &[Endpoint] = match cfg.endpoint.as_deref().unwrap_or("both") {
        "left" => &[Endpoint::Left],
        "right" => &[Endpoint::Right],
        "both" => &[Endpoint::Left, Endpoint::Right],
        other => return Err(CommandError::Usage(format!("unknown endpoint '{other}'"))),
    };
    for &side in ends {
        let name = if side == Endpoint::Left { "left" } else { "right" };
        match fit_boundary_exponent(&xs, &us, side, window) {
            Ok(f) => {
                b.put(name, fit_json(&Some(f.clone())));
                match cfg.a {
                    Some(a) => b.verdicts.push(Verdict::at_most(format!("|alpha - {a}| at {name} end"), (f.alpha_hat - a).abs(), tol(0.05))),
                    None => b.verdicts.push(Verdict::flag(format!("fit at {name} end"), true)),
                }
            }
            Err(e) if e.kind == ErrorKind::InvalidInput => return Err(e.into()),
            Err(e) => {
                b.put(name, json!({"error": e.to_string()}));
                b.verdicts.push(Verdict::flag(format!("fit at {name} end is inconclusive"), false));
            }
        }
    }
    Ok(())
}

fn suite(cfg: &RunConfig, b: &mut Body) -> Res<()> {
    let ids: Vec<u8> = match &cfg.criteria {
        None => CRITERIA.iter().map(|c| c.0).collect(),
        Some(s) => s
            .split(',')
            .map(|t| t.trim().parse::<u8>().ok().filter(|k| (1..=9).contains(k)))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| CommandError::Usage("criteria must be numbers 1..9 separated by commas".into()))?,
    };
    let jobs = cfg.jobs.unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    for r in run_suite(&ids, jobs) {
        b.timings.insert(format!("criterion_{}_s", r.id), json!(r.elapsed_s));
        for v in &r.verdicts {
            b.verdicts.push(Verdict { name: format!("[{}] {}", r.id, v.name), ..v.clone() });
        }
        b.put(&format!("criterion_{}", r.id), json!({"title": r.title, "passed": r.passed(), "budget_s": r.budget_s, "results": r.results}));
    }
    Ok(())
}
