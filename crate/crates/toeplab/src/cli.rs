//! Command-line front end. `run` parses arguments, dispatches to the library
//! and returns the exit code together with the serialized output, so it can
//! be driven from tests without spawning a process.

use std::collections::BTreeMap;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::applications::{boson_density, condensate_fraction, lis_check};
use crate::asympt::{bt_predict, AsymptoticPrediction, PredictionTerm};
use crate::eigen::{bulk_prediction, gap_spectrum_stats, toeplitz_eigenvalues};
use crate::error::{Error, Result};
use crate::exactdet::{toeplitz_det, DetOptions};
use crate::ising::{correlation, magnetization, wu_leading, CorrelationKind, IsingParams, Route};
use crate::scaling::{
    dyson_asymptote, g_minus_p5, p3_scaling_curve, sine_gap, default_gap_nodes, widom_route,
    ScalingSign,
};
use crate::symbols::{builtin, parse_complex, parse_symbol_text, CircleSymbol, Params};
use crate::{LogDet, Precision, C64};

const SUBCOMMANDS: &[&str] =
    &["det", "predict", "compare", "ising", "eigen", "scale", "gap", "boson", "lis"];

const AFTER_HELP: &str = "\
Output is JSON lines by default. Records carry task, params, n, exact {logmod, phase},
predicted [{a, p, c}], abs_err, rel_err and wall_time_ms; absent fields are omitted.
A config file of key=value lines (long flag names without dashes) may be given with
--config; flags on the command line override it.
Exit codes: 0 success, 2 invalid input, 3 numerical failure.";

#[derive(Parser, Debug)]
#[command(name = "toeplab", version, about = "Toeplitz determinants: exact values, asymptotics and applications", after_help = AFTER_HELP)]
#[command(args_override_self = true)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Emit CSV with a header instead of JSON lines.
    #[arg(long, global = true, conflicts_with = "plot_data")]
    csv: bool,
    /// Emit two-column text (abscissa, value) for plotting.
    #[arg(long, global = true)]
    plot_data: bool,
    /// Arithmetic for determinant engines. `extended` (double-double) is
    /// required for the Toeplitz route to the gap constant (`gap --widom-mu`).
    #[arg(long, global = true, value_enum, default_value = "double")]
    precision: PrecisionArg,
    /// Worker threads for sweeps over n; output order is always by n.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// key=value file with default flag values.
    #[arg(long, global = true)]
    config: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PrecisionArg {
    Double,
    Extended,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact determinant D_n of a symbol.
    Det(DetArgs),
    /// Asymptotic prediction for D_n.
    Predict(DetArgs),
    /// Exact determinant against the asymptotic prediction.
    Compare(DetArgs),
    /// Two-dimensional Ising spin-spin correlations.
    Ising(IsingArgs),
    /// Spectrum of the n x n Toeplitz matrix of a real symbol.
    Eigen(EigenArgs),
    /// Painleve scaling functions of the Ising correlation.
    Scale(ScaleArgs),
    /// Sine-kernel gap probability and its large-s constant.
    Gap(GapArgs),
    /// Impenetrable-boson one-body density and condensate fraction.
    Boson(BosonArgs),
    /// Poissonized longest-increasing-subsequence identity.
    Lis(LisArgs),
}

#[derive(Args, Debug, Clone)]
struct SymbolArgs {
    /// Builtin symbol name (identity, monomial, exp_cos, ar1, pure_fh, diag,
    /// onsager, onsager_tilde, char_interval, bt, lenard, sym_jac, gap,
    /// laurent with c.k parameters).
    #[arg(long)]
    symbol: Option<String>,
    /// Symbol description file (key=value lines).
    #[arg(long)]
    symbol_file: Option<String>,
    /// Extra builtin parameter as key=value; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long)]
    k_ons: Option<String>,
    #[arg(long)]
    t: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    m: Option<String>,
    #[arg(long)]
    mu: Option<String>,
    #[arg(long)]
    lambda: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    theta1: Option<String>,
    #[arg(long)]
    theta2: Option<String>,
    #[arg(long)]
    chi1: Option<String>,
    #[arg(long)]
    chi2: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    /// Single matrix size.
    #[arg(long, conflicts_with_all = ["n_from", "n_to"])]
    n: Option<usize>,
    #[arg(long, requires = "n_to")]
    n_from: Option<usize>,
    #[arg(long, requires = "n_from")]
    n_to: Option<usize>,
    /// all, even, odd, or a positive stride.
    #[arg(long, default_value = "all")]
    step: String,
}

#[derive(Args, Debug)]
struct DetArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Row,
    Diag,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RouteArg {
    Toeplitz,
    GammaProduct,
}

#[derive(Args, Debug)]
struct IsingArgs {
    #[arg(long, value_enum, default_value = "diag")]
    kind: KindArg,
    #[arg(long, value_enum, default_value = "toeplitz")]
    route: RouteArg,
    /// Onsager modulus for equal couplings.
    #[arg(long)]
    k_ons: Option<f64>,
    #[arg(long, requires = "chi2")]
    chi1: Option<f64>,
    #[arg(long, requires = "chi1")]
    chi2: Option<f64>,
    /// Equal couplings at the critical point.
    #[arg(long)]
    critical: bool,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Args, Debug)]
struct EigenArgs {
    #[command(flatten)]
    symbol: SymbolArgs,
    #[arg(long)]
    n: usize,
    /// Bulk fraction x in (0, 1) for the location/spacing prediction.
    #[arg(long)]
    bulk_x: Option<f64>,
    /// Gap statistics for the two-level symbol with this gamma (uses
    /// --theta1/--theta2).
    #[arg(long)]
    gap_gamma: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PainleveArg {
    P3,
    P5,
}

#[derive(Args, Debug)]
struct ScaleArgs {
    #[arg(long, value_enum, default_value = "p3")]
    painleve: PainleveArg,
    /// Comma-separated ascending r values.
    #[arg(long, value_delimiter = ',', required = true)]
    r: Vec<f64>,
    #[arg(long, default_value_t = 1.0 / std::f64::consts::PI)]
    lambda: f64,
    #[arg(long, default_value = "minus")]
    sign: String,
}

#[derive(Args, Debug)]
struct GapArgs {
    /// Comma-separated interval half-lengths s.
    #[arg(long, value_delimiter = ',')]
    s: Vec<f64>,
    /// Nystrom nodes (default grows with s).
    #[arg(long)]
    nodes: Option<usize>,
    /// Extrapolate the large-s constant from the --s grid.
    #[arg(long)]
    dyson: bool,
    /// Toeplitz route to the large-s constant at this arc parameter
    /// (requires --precision extended).
    #[arg(long, requires = "size")]
    widom_mu: Option<f64>,
    #[arg(long)]
    size: Option<usize>,
}

#[derive(Args, Debug)]
struct BosonArgs {
    /// Number of particles.
    #[arg(long = "particles", short = 'N')]
    particles: usize,
    /// Comma-separated angles t in [0.05, pi].
    #[arg(long, value_delimiter = ',')]
    t: Vec<f64>,
    /// Also estimate the condensate fraction.
    #[arg(long)]
    condensate: bool,
}

#[derive(Args, Debug)]
struct LisArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    n: Vec<usize>,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 7)]
    n_max: usize,
}

// ---------------------------------------------------------------------------
// Records

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExactPart {
    pub logmod: f64,
    pub phase: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PredictedTerm {
    pub a: Option<C64>,
    pub p: C64,
    pub c: Option<C64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q: Option<C64>,
}

/// One output record.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub task: String,
    pub params: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactPart>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub predicted: Vec<PredictedTerm>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_value: Option<ExactPart>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub abs_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rel_err: Option<f64>,
    /// Task-specific payload for non-determinant tasks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    pub wall_time_ms: f64,
    #[serde(skip)]
    pub plot: Vec<(f64, f64)>,
}

impl RunRecord {
    fn new(task: &str, params: &BTreeMap<String, String>) -> Self {
        RunRecord {
            task: task.into(),
            params: params.clone(),
            n: None,
            exact: None,
            predicted: vec![],
            predicted_value: None,
            abs_err: None,
            rel_err: None,
            result: None,
            wall_time_ms: 0.0,
            plot: vec![],
        }
    }
}

fn part(l: &LogDet) -> Option<ExactPart> {
    (!l.exact_zero).then_some(ExactPart { logmod: l.log_modulus, phase: l.phase })
}

/// abs_err = |exact - predicted|; rel_err = |exp(log predicted - log exact) - 1|
/// computed from the logarithms, only when both are nonzero.
fn errors(exact: &LogDet, pred: &LogDet) -> (Option<f64>, Option<f64>) {
    match (exact.exact_zero, pred.exact_zero) {
        (true, true) => (Some(0.0), None),
        (true, false) => (Some(pred.log_modulus.exp()), None),
        (false, true) => (Some(exact.log_modulus.exp()), None),
        (false, false) => {
            let d = C64::new(pred.log_modulus - exact.log_modulus, pred.phase - exact.phase);
            let rel = (d.exp() - 1.0).norm();
            let abs = if rel == 0.0 { 0.0 } else { (exact.log_modulus + rel.ln()).exp() };
            (Some(abs), Some(rel))
        }
    }
}

fn terms_of(p: &AsymptoticPrediction) -> Vec<PredictedTerm> {
    p.terms
        .iter()
        .map(|t: &PredictionTerm| PredictedTerm {
            a: t.a,
            p: t.p,
            c: t.c,
            q: (t.quadratic != C64::new(0.0, 0.0)).then_some(t.quadratic),
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Driver

/// Result of one invocation: exit code, standard output and standard error.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs the command line. `argv[0]` is the program name.
pub fn run<S: AsRef<str>>(argv: &[S]) -> RunOutput {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(e) => return fail(&e),
    };
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    RunOutput { code: 0, stdout: text, stderr: String::new() }
                }
                _ => RunOutput { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    let records = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => return fail(&e),
    };
    let stdout = if cli.csv {
        match to_csv(&records) {
            Ok(s) => s,
            Err(e) => return fail(&e),
        }
    } else if cli.plot_data {
        to_plot(&records)
    } else {
        records.iter().map(|r| serde_json::to_string(r).unwrap() + "\n").collect()
    };
    RunOutput { code: 0, stdout, stderr: String::new() }
}

fn fail(e: &Error) -> RunOutput {
    RunOutput { code: e.exit_code(), stdout: String::new(), stderr: format!("error: {e}\n") }
}

/// Splices `--key value` pairs from a config file in front of the
/// subcommand's own arguments; later flags win, so the command line
/// overrides the file.
fn apply_config(argv: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = argv.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(argv);
    };
    let path = if let Some(p) = argv[pos].strip_prefix("--config=") {
        p.to_string()
    } else {
        match argv.get(pos + 1) {
            Some(p) => p.clone(),
            None => return Err(Error::Input("--config needs a path".into())),
        }
    };
    let text = std::fs::read_to_string(&path)
        .map_err(|e| Error::Input(format!("cannot read config '{path}': {e}")))?;
    let mut extra = vec![];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Input(format!("config line {}: expected key=value", i + 1)));
        };
        let (k, v) = (k.trim().replace('_', "-"), v.trim());
        match v {
            "true" => extra.push(format!("--{k}")),
            "false" => {}
            _ => extra.push(format!("--{k}={v}")),
        }
    }
    let sub = argv
        .iter()
        .position(|a| SUBCOMMANDS.contains(&a.as_str()))
        .ok_or_else(|| Error::Input("missing subcommand".into()))?;
    let mut out = argv[..=sub].to_vec();
    out.extend(extra);
    out.extend_from_slice(&argv[sub + 1..]);
    Ok(out)
}

fn precision(cli: &Cli) -> Precision {
    match cli.precision {
        PrecisionArg::Double => Precision::Double,
        PrecisionArg::Extended => Precision::Extended,
    }
}

fn sweep_sizes(s: &SweepArgs) -> Result<Vec<usize>> {
    if let Some(n) = s.n {
        return Ok(vec![n]);
    }
    let (Some(a), Some(b)) = (s.n_from, s.n_to) else {
        return Err(Error::Input("give --n or --n-from/--n-to".into()));
    };
    if a > b {
        return Err(Error::Input("--n-from exceeds --n-to".into()));
    }
    let sizes: Vec<usize> = match s.step.as_str() {
        "all" => (a..=b).collect(),
        "even" => (a..=b).filter(|n| n % 2 == 0).collect(),
        "odd" => (a..=b).filter(|n| n % 2 == 1).collect(),
        k => match k.parse::<usize>() {
            Ok(k) if k > 0 => (a..=b).step_by(k).collect(),
            _ => return Err(Error::Input(format!("bad --step '{k}'"))),
        },
    };
    Ok(sizes)
}

fn with_pool<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(Error::Input("--jobs must be positive".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|p| p.install(f))
            .map_err(|e| Error::Numerical(format!("thread pool: {e}"))),
    }
}

/// Parallel map over sizes with results kept in input order.
fn sweep<F>(cli: &Cli, sizes: &[usize], f: F) -> Result<Vec<RunRecord>>
where
    F: Fn(usize) -> Result<RunRecord> + Sync,
{
    with_pool(cli.jobs, || sizes.par_iter().map(|&n| timed(|| f(n))).collect::<Result<Vec<_>>>())?
}

fn timed(f: impl FnOnce() -> Result<RunRecord>) -> Result<RunRecord> {
    let t = Instant::now();
    let mut r = f()?;
    r.wall_time_ms = t.elapsed().as_secs_f64() * 1e3;
    Ok(r)
}

fn symbol_from(args: &SymbolArgs) -> Result<(CircleSymbol, BTreeMap<String, String>)> {
    let mut shown = BTreeMap::new();
    let mut p = Params::new();
    let named = [
        ("k_ons", &args.k_ons),
        ("t", &args.t),
        ("alpha", &args.alpha),
        ("beta", &args.beta),
        ("r", &args.r),
        ("m", &args.m),
        ("mu", &args.mu),
        ("lambda", &args.lambda),
        ("gamma", &args.gamma),
        ("theta1", &args.theta1),
        ("theta2", &args.theta2),
        ("chi1", &args.chi1),
        ("chi2", &args.chi2),
    ];
    for (k, v) in named {
        if let Some(v) = v {
            p.insert(k.to_string(), parse_complex(v)?);
            shown.insert(k.to_string(), v.clone());
        }
    }
    for kv in &args.params {
        let Some((k, v)) = kv.split_once('=') else {
            return Err(Error::Input(format!("--param expects key=value, got '{kv}'")));
        };
        p.insert(k.trim().to_string(), parse_complex(v.trim())?);
        shown.insert(k.trim().to_string(), v.trim().to_string());
    }
    let sym = match (&args.symbol, &args.symbol_file) {
        (Some(name), None) => {
            shown.insert("symbol".into(), name.clone());
            builtin(name, &p)?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Input(format!("cannot read symbol file '{path}': {e}")))?;
            shown.insert("symbol_file".into(), path.clone());
            parse_symbol_text(&text)?
        }
        _ => return Err(Error::Input("give exactly one of --symbol and --symbol-file".into())),
    };
    Ok((sym, shown))
}

fn dispatch(cli: &Cli) -> Result<Vec<RunRecord>> {
    let prec = precision(cli);
    match &cli.cmd {
        Command::Det(a) | Command::Predict(a) | Command::Compare(a) => {
            let task = match &cli.cmd {
                Command::Det(_) => "det",
                Command::Predict(_) => "predict",
                _ => "compare",
            };
            let (sym, mut params) = symbol_from(&a.symbol)?;
            params.insert("precision".into(), format!("{prec:?}").to_lowercase());
            let sizes = sweep_sizes(&a.sweep)?;
            let pred = if task == "det" { None } else { Some(bt_predict(&sym)?) };
            let opts = DetOptions { precision: prec };
            sweep(cli, &sizes, |n| {
                let mut r = RunRecord::new(task, &params);
                r.n = Some(n);
                let exact = if task == "predict" { None } else { Some(toeplitz_det(&sym, n, &opts)?) };
                if let Some(e) = &exact {
                    r.exact = part(e);
                    r.plot.push((n as f64, e.log_modulus));
                }
                if let Some(p) = &pred {
                    r.predicted = terms_of(p);
                    let pv = p.evaluate(n)?;
                    r.predicted_value = part(&pv);
                    if let Some(e) = &exact {
                        (r.abs_err, r.rel_err) = errors(e, &pv);
                    } else {
                        r.plot.push((n as f64, pv.log_modulus));
                    }
                }
                Ok(r)
            })
        }
        Command::Ising(a) => {
            let mut params = BTreeMap::new();
            let ip = if a.critical {
                params.insert("critical".into(), "true".into());
                IsingParams::symmetric_critical()
            } else if let Some(k) = a.k_ons {
                params.insert("k_ons".into(), k.to_string());
                IsingParams::symmetric_with_k(k)?
            } else if let (Some(c1), Some(c2)) = (a.chi1, a.chi2) {
                params.insert("chi1".into(), c1.to_string());
                params.insert("chi2".into(), c2.to_string());
                IsingParams::new(c1, c2)?
            } else {
                return Err(Error::Input("give --k-ons, --chi1/--chi2 or --critical".into()));
            };
            let kind = match a.kind {
                KindArg::Row => CorrelationKind::Row,
                KindArg::Diag => CorrelationKind::Diag,
            };
            let route = match a.route {
                RouteArg::Toeplitz => Route::Toeplitz,
                RouteArg::GammaProduct => Route::GammaProduct,
            };
            params.insert("kind".into(), format!("{:?}", a.kind).to_lowercase());
            params.insert("route".into(), serde_json::to_value(route).unwrap().as_str().unwrap().into());
            let sizes = sweep_sizes(&a.sweep)?;
            sweep(cli, &sizes, |n| {
                let c = correlation(&ip, kind, n, route)?;
                let lead = wu_leading(&ip, kind, n)?;
                let mut r = RunRecord::new("ising", &params);
                r.n = Some(n);
                r.exact = part(&c.logdet);
                let pv = if lead == 0.0 { LogDet::zero() } else { LogDet::from_value(C64::new(lead, 0.0)) };
                r.predicted_value = part(&pv);
                (r.abs_err, r.rel_err) = errors(&c.logdet, &pv);
                r.result = Some(serde_json::json!({
                    "value": c.value,
                    "leading": lead,
                    "magnetization": magnetization(&ip),
                    "regime": ip.regime,
                }));
                r.plot.push((n as f64, c.value));
                Ok(r)
            })
        }
        Command::Eigen(a) => timed(|| {
            let mut params = BTreeMap::new();
            let mut r;
            if let Some(gamma) = a.gap_gamma {
                let t1 = a.symbol.theta1.as_deref().map(parse_real).transpose()?;
                let t2 = a.symbol.theta2.as_deref().map(parse_real).transpose()?;
                let (Some(t1), Some(t2)) = (t1, t2) else {
                    return Err(Error::Input("--gap-gamma needs --theta1 and --theta2".into()));
                };
                params.insert("gap_gamma".into(), gamma.to_string());
                params.insert("theta1".into(), t1.to_string());
                params.insert("theta2".into(), t2.to_string());
                let g = gap_spectrum_stats(t1, t2, gamma, a.n, None)?;
                r = RunRecord::new("eigen", &params);
                r.result = Some(serde_json::to_value(g).unwrap());
            } else {
                let (sym, p) = symbol_from(&a.symbol)?;
                params = p;
                let spectrum = toeplitz_eigenvalues(&sym, a.n)?;
                r = RunRecord::new("eigen", &params);
                r.plot = spectrum.eigenvalues.iter().enumerate().map(|(i, &v)| (i as f64, v)).collect();
                let mut v = serde_json::to_value(&spectrum).unwrap();
                if let Some(x) = a.bulk_x {
                    r.params.insert("bulk_x".into(), x.to_string());
                    v["bulk"] = serde_json::to_value(bulk_prediction(&sym, x, a.n)?).unwrap();
                }
                r.result = Some(v);
            }
            r.n = Some(a.n);
            Ok(r)
        })
        .map(|r| vec![r]),
        Command::Scale(a) => timed(|| {
            let mut params = BTreeMap::new();
            let r_grid = &a.r;
            let mut r = match a.painleve {
                PainleveArg::P3 => {
                    let sign: ScalingSign = a.sign.parse()?;
                    params.insert("painleve".into(), "p3".into());
                    params.insert("lambda".into(), a.lambda.to_string());
                    params.insert("sign".into(), a.sign.clone());
                    let vals = p3_scaling_curve(r_grid, a.lambda, sign)?;
                    let mut rec = RunRecord::new("scale", &params);
                    rec.plot = r_grid.iter().zip(&vals).map(|(&x, v)| (x, v.g)).collect();
                    rec.result = Some(serde_json::json!({ "r": r_grid, "values": vals }));
                    rec
                }
                PainleveArg::P5 => {
                    params.insert("painleve".into(), "p5".into());
                    let g = g_minus_p5(r_grid)?;
                    let mut rec = RunRecord::new("scale", &params);
                    rec.plot = r_grid.iter().copied().zip(g.iter().copied()).collect();
                    rec.result = Some(serde_json::json!({ "r": r_grid, "G_minus": g }));
                    rec
                }
            };
            r.params.insert("r".into(), join(r_grid));
            Ok(r)
        })
        .map(|r| vec![r]),
        Command::Gap(a) => {
            let mut out = vec![];
            if let Some(mu) = a.widom_mu {
                if prec != Precision::Extended {
                    return Err(Error::Input(
                        "the Toeplitz route to the gap constant needs --precision extended".into(),
                    ));
                }
                let n = a.size.unwrap();
                out.push(timed(|| {
                    let mut params = BTreeMap::new();
                    params.insert("widom_mu".into(), mu.to_string());
                    let mut r = RunRecord::new("gap", &params);
                    r.n = Some(n);
                    let est = widom_route(mu, n)?;
                    r.result = Some(serde_json::json!({
                        "constant_estimate": est,
                        "constant": crate::scaling::widom_dyson_constant(),
                    }));
                    Ok(r)
                })?);
            }
            if a.dyson {
                out.push(timed(|| {
                    let mut params = BTreeMap::new();
                    params.insert("s".into(), join(&a.s));
                    let mut r = RunRecord::new("gap", &params);
                    r.result = Some(serde_json::to_value(dyson_asymptote(&a.s)?).unwrap());
                    Ok(r)
                })?);
            } else {
                let recs = with_pool(cli.jobs, || {
                    a.s.par_iter()
                        .map(|&s| {
                            timed(|| {
                                let nodes = a.nodes.unwrap_or_else(|| default_gap_nodes(s));
                                let mut params = BTreeMap::new();
                                params.insert("s".into(), s.to_string());
                                params.insert("nodes".into(), nodes.to_string());
                                let g = sine_gap(s, nodes)?;
                                let mut r = RunRecord::new("gap", &params);
                                r.exact = part(&g.p_s);
                                r.plot.push((s, g.p_s.value().re));
                                r.result = Some(serde_json::to_value(&g).unwrap());
                                Ok(r)
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })??;
                out.extend(recs);
            }
            if out.is_empty() {
                return Err(Error::Input("give --s, --dyson or --widom-mu".into()));
            }
            Ok(out)
        }
        Command::Boson(a) => {
            let mut out = vec![];
            let mut params = BTreeMap::new();
            params.insert("N".into(), a.particles.to_string());
            if !a.t.is_empty() {
                out.push(timed(|| {
                    let curve = with_pool(cli.jobs, || boson_density(a.particles, &a.t))??;
                    let mut r = RunRecord::new("boson", &params);
                    r.params.insert("t".into(), join(&a.t));
                    r.plot = curve.samples.clone();
                    r.result = Some(serde_json::to_value(&curve).unwrap());
                    Ok(r)
                })?);
            }
            if a.condensate {
                out.push(timed(|| {
                    let est = condensate_fraction(a.particles)?;
                    let mut r = RunRecord::new("boson", &params);
                    r.params.insert("condensate".into(), "true".into());
                    r.plot.push((a.particles as f64, est.value));
                    r.result = Some(serde_json::json!({
                        "condensate_fraction": est.value,
                        "error_bar": est.error_bar,
                        "scaled": est.value * (a.particles as f64).sqrt(),
                        "limit_constant": crate::applications::condensate_constant(),
                    }));
                    Ok(r)
                })?);
            }
            if out.is_empty() {
                return Err(Error::Input("give --t and/or --condensate".into()));
            }
            Ok(out)
        }
        Command::Lis(a) => {
            let mut params = BTreeMap::new();
            params.insert("lambda".into(), a.lambda.to_string());
            params.insert("n_max".into(), a.n_max.to_string());
            sweep(cli, &a.n, |n| {
                let c = lis_check(n, a.lambda, a.n_max)?;
                let mut r = RunRecord::new("lis", &params);
                r.n = Some(n);
                let lhs = LogDet::from_value(C64::new(c.lhs, 0.0));
                let rhs = LogDet::from_value(C64::new(c.rhs_truncated, 0.0));
                r.exact = part(&lhs);
                r.predicted_value = part(&rhs);
                (r.abs_err, r.rel_err) = errors(&lhs, &rhs);
                r.plot.push((n as f64, c.lhs));
                r.result = Some(serde_json::to_value(c).unwrap());
                Ok(r)
            })
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let z = parse_complex(s)?;
    if z.im != 0.0 {
        return Err(Error::Input(format!("'{s}' must be real")));
    }
    Ok(z.re)
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn to_csv(records: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(vec![]);
    let io = |e: csv::Error| Error::Numerical(format!("csv: {e}"));
    w.write_record([
        "task",
        "params",
        "n",
        "exact_logmod",
        "exact_phase",
        "predicted",
        "abs_err",
        "rel_err",
        "result",
        "wall_time_ms",
    ])
    .map_err(io)?;
    for r in records {
        let params = r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";");
        let predicted =
            if r.predicted.is_empty() { String::new() } else { serde_json::to_string(&r.predicted).unwrap() };
        w.write_record([
            r.task.clone(),
            params,
            opt(r.n),
            opt(r.exact.map(|e| e.logmod)),
            opt(r.exact.map(|e| e.phase)),
            predicted,
            opt(r.abs_err),
            opt(r.rel_err),
            r.result.as_ref().map(|v| v.to_string()).unwrap_or_default(),
            r.wall_time_ms.to_string(),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Numerical(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn to_plot(records: &[RunRecord]) -> String {
    let mut s = String::new();
    for r in records {
        for (x, y) in &r.plot {
            s.push_str(&format!("{x} {y}\n"));
        }
    }
    s
}
