//! Run configuration from flags, a `key = value` config file, or a previous report.

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::path::{Path, PathBuf};

pub const COMMANDS: [&str; 8] = ["check", "index", "factorize", "solve-halfline", "solve-interval", "trace", "fit-exponent", "suite"];

#[derive(Parser, Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
#[command(name = "mutrans", version, about = "Transmission checks, Wiener-Hopf factorization and boundary solvers")]
#[serde(default)]
pub struct RunConfig {
    /// check | index | factorize | solve-halfline | solve-interval | trace | fit-exponent | suite
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,

    /// Config file with `key = value` lines and `[command]` sections
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Re-run the inputs recorded in a JSON report
    #[arg(long)]
    #[serde(skip)]
    pub replay: Option<PathBuf>,

    /// Symbol expression, e.g. "abs2pow(0.5)" or "chiplus(0.3)*chiminus(0.3)"
    #[arg(long)]
    pub symbol: Option<String>,

    /// Declared order of the symbol when it cannot be read off the expression
    #[arg(long)]
    pub order: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub mu: Option<f64>,

    #[arg(long)]
    pub sigma: Option<f64>,

    /// Power of the operator
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,

    /// Grid size
    #[arg(long = "N", alias = "n")]
    pub n: Option<usize>,

    /// Half length of the line grid, or the box for interval assembly
    #[arg(long = "L", alias = "l")]
    pub l: Option<f64>,

    /// Sobolev order
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<f64>,

    /// Number of traces
    #[arg(long = "M", alias = "m")]
    pub m: Option<usize>,

    /// Path length for the index computation
    #[arg(long = "T", alias = "t")]
    pub t: Option<f64>,

    /// Fit window "lo,hi" in distance to the boundary
    #[arg(long)]
    pub window: Option<String>,

    /// eigen_power | box_fft
    #[arg(long)]
    pub method: Option<String>,

    /// Right-hand side: exp | gauss | zero (half line); const | one | odd | getoor | zero (interval)
    #[arg(long)]
    pub f: Option<String>,

    /// Boundary datum for the half line
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub phi_left: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub phi_right: Option<f64>,

    /// Potential c0 + c2 x^2 for the variable-coefficient interval operator
    #[arg(long, allow_hyphen_values = true)]
    pub c0: Option<f64>,

    #[arg(long, allow_hyphen_values = true)]
    pub c2: Option<f64>,

    /// left | right | both
    #[arg(long)]
    pub endpoint: Option<String>,

    /// Input CSV (x, re, im) or (x, u)
    #[arg(long)]
    pub input: Option<PathBuf>,

    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write solution grids as CSV
    #[arg(long)]
    pub dump_grid: Option<PathBuf>,

    /// Write the assembled interval matrix in binary
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,

    /// Criteria to run in the suite, e.g. "1,2,5"
    #[arg(long)]
    pub criteria: Option<String>,

    /// Worker threads for the suite
    #[arg(long)]
    #[serde(skip)]
    pub jobs: Option<usize>,

    /// Multiplies every tolerance; overrides MUTRANS_TOL_SCALE
    #[arg(long)]
    pub tol_scale: Option<f64>,

    /// Positional form of the command
    #[arg(value_name = "COMMAND")]
    #[serde(skip)]
    pub positional: Option<String>,
}

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// Reads a config file: keys before the first section apply to every command, keys in
/// `[name]` only when `name` is the command being run.
pub fn parse_config_text(text: &str, command: Option<&str>) -> Result<Map<String, Value>, UsageError> {
    let mut out = Map::new();
    let mut section: Option<String> = None;
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = Some(name.trim().to_string());
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| usage(format!("config line {}: expected key = value", no + 1)))?;
        if let Some(sec) = &section {
            if !COMMANDS.contains(&sec.as_str()) {
                return Err(usage(format!("config line {}: unknown section [{sec}]", no + 1)));
            }
            if Some(sec.as_str()) != command {
                continue;
            }
        }
        let key = k.trim().to_lowercase().replace('-', "_");
        let v = v.trim().trim_matches('"');
        let value = match v.parse::<f64>() {
            Ok(x) if !matches!(key.as_str(), "symbol" | "window" | "criteria" | "command") => {
                if x.fract() == 0.0 && matches!(key.as_str(), "n" | "m") {
                    Value::from(x as u64)
                } else {
                    Value::from(x)
                }
            }
            _ => Value::from(v.to_string()),
        };
        out.insert(key, value);
    }
    Ok(out)
}

fn to_map(c: &RunConfig) -> Map<String, Value> {
    match serde_json::to_value(c) {
        Ok(Value::Object(m)) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
        _ => Map::new(),
    }
}

fn from_map(m: Map<String, Value>) -> Result<RunConfig, UsageError> {
    serde_json::from_value(Value::Object(m)).map_err(|e| usage(format!("bad configuration value: {e}")))
}

fn read_report_inputs(path: &Path) -> Result<Map<String, Value>, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: not a report: {e}", path.display())))?;
    match v.get("inputs") {
        Some(Value::Object(m)) => Ok(m.clone()),
        _ => Err(usage(format!("{}: report has no inputs object", path.display()))),
    }
}

/// Resolves flags over the config file (or replayed report) and checks the command name.
pub fn resolve(cli: RunConfig) -> Result<RunConfig, UsageError> {
    if cli.command.is_some() && cli.positional.is_some() && cli.command != cli.positional {
        return Err(usage("command given twice"));
    }
    let mut merged = Map::new();
    if let Some(p) = &cli.replay {
        merged = read_report_inputs(p)?;
    }
    let cmd_hint = cli.positional.clone().or(cli.command.clone()).or_else(|| merged.get("command").and_then(|v| v.as_str()).map(String::from));
    if let Some(p) = &cli.config {
        let text = std::fs::read_to_string(p).map_err(|e| usage(format!("{}: {e}", p.display())))?;
        let file = parse_config_text(&text, cmd_hint.as_deref())?;
        let cmd_from_file = file.get("command").and_then(|v| v.as_str()).map(String::from);
        let file = if cmd_hint.is_none() && cmd_from_file.is_some() {
            // the section for the command named in the file
            parse_config_text(&text, cmd_from_file.as_deref())?
        } else {
            file
        };
        merged.extend(file);
    }
    let mut flags = cli.clone();
    flags.command = cli.positional.clone().or(cli.command.clone());
    merged.extend(to_map(&flags));
    let mut cfg = from_map(merged)?;
    cfg.jobs = cli.jobs;
    cfg.out = cli.out.clone().or(cfg.out);
    let cmd = cfg.command.clone().ok_or_else(|| usage("no command given"))?;
    if !COMMANDS.contains(&cmd.as_str()) {
        return Err(usage(format!("unknown command '{cmd}'; expected one of {}", COMMANDS.join(", "))));
    }
    Ok(cfg)
}

/// Parses "lo,hi".
pub fn parse_window(s: &str) -> Result<(f64, f64), UsageError> {
    let (a, b) = s.split_once(',').ok_or_else(|| usage("window must be lo,hi"))?;
    let lo = a.trim().parse::<f64>().map_err(|_| usage("window lower bound is not a number"))?;
    let hi = b.trim().parse::<f64>().map_err(|_| usage("window upper bound is not a number"))?;
    Ok((lo, hi))
}
