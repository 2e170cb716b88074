//! Command-line front end: argument parsing, configuration and emission of
//! JSON, CSV or plain-text results.

mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

pub use report::{emit_plot_data, ReportBundle};

use crate::diophantine::{classify_spacing, dirichlet_approx, ProgressionSpec, SpacingReport};
use crate::divisor::{sieve, DivisorTable};
use crate::error::{Error, Result};
use crate::expsum::{
    divisor_expsum_direct_dd, divisor_expsum_hyperbola_dd, divisor_expsum_rational, ExpSumResult,
};
use crate::moments::{key_sum_table_limit, moment_report, KeySumForm, MomentReport, MomentRequest};
use crate::numerics::precision::PRECISION_ENV;
use crate::numerics::{PrecisionContext, RealExpr};
use crate::zeta::{continuous_mean_square, theta, zeta_critical, zeta_half_line, QuadraturePolicy};

/// Version of the JSON layout, bumped on incompatible changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(name = "zetaprog", version, about = "Discrete second moments of ζ on vertical progressions")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Emit JSON
    #[arg(long, global = true)]
    pub json: bool,
    /// Emit CSV
    #[arg(long, global = true)]
    pub csv: bool,
    /// Worker threads (defaults to the number of cores)
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=4096))]
    pub threads: Option<u64>,
    /// Working precision for expression inputs and certified approximations
    #[arg(long = "precision-bits", global = true, env = PRECISION_ENV)]
    pub precision_bits: Option<usize>,
    /// Leave the timestamp out of JSON metadata
    #[arg(long = "no-timestamp", global = true)]
    pub no_timestamp: bool,
    /// Divisor table written by `sieve`, used instead of sieving in memory
    #[arg(long, global = true)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputMode {
    Human,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Direct,
    Hyperbola,
    Rational,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormArg {
    Refined,
    Intro,
}

#[derive(Debug, Clone, Args)]
pub struct ProgressionArgs {
    /// Spacing a (real or expression such as 2*pi/log(3))
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Shift b
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub b: String,
    /// Rational-power spacing R:S:K0, meaning e^{2πK0/a} = R/S
    #[arg(long)]
    pub rs: Option<String>,
    /// Which form of the key sum to evaluate
    #[arg(long, value_enum, default_value = "refined")]
    pub form: FormArg,
    /// Skip the continuous mean-square comparison
    #[arg(long = "no-continuous")]
    pub no_continuous: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Sieve d(n) and write the table file
    Sieve {
        #[arg(long)]
        limit: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// |ζ(½+it)|² at one ordinate
    ZetaEval {
        #[arg(long, allow_hyphen_values = true)]
        t: String,
    },
    /// ∫₀^T |ζ(½+it)|² dt and E(T)
    MeanSquare {
        #[arg(long = "T")]
        t: String,
        #[arg(long)]
        step: Option<f64>,
        /// Output format for this command (overrides --json/--csv)
        #[arg(long, value_enum)]
        out: Option<OutputMode>,
    },
    /// Σ_{m≤M} d(m) e(αm)
    Expsum {
        #[arg(long = "M")]
        m: u64,
        /// Real, expression, or r/s for the rational algorithm
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, value_enum, default_value = "direct")]
        algo: Algo,
    },
    /// Dirichlet approximant p/q with q ≤ √M
    Approx {
        #[arg(long, allow_hyphen_values = true)]
        alpha: String,
        #[arg(long = "M")]
        m: u64,
    },
    /// Rationality of e^{2πk/a} for a rational-power spacing
    Classify {
        #[arg(long)]
        r: u64,
        #[arg(long)]
        s: u64,
        #[arg(long, default_value_t = 1)]
        k0: u64,
        #[arg(long)]
        kmax: u64,
        /// Cutoff for the approximation scales M(k) = T e^{−2πk/a}
        #[arg(long = "T")]
        t: Option<String>,
    },
    /// Discrete moment against its predicted main terms
    Moment {
        #[command(flatten)]
        prog: ProgressionArgs,
        #[arg(long = "T")]
        t: String,
    },
    /// Moment reports across a ladder of cutoffs
    Report {
        #[command(flatten)]
        prog: ProgressionArgs,
        #[arg(long = "T-ladder", value_delimiter = ',', required = true)]
        ladder: Vec<String>,
        /// Also write (T, ratio_full) columns to this file
        #[arg(long = "plot-data")]
        plot_data: Option<PathBuf>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sieve { .. } => "sieve",
            Command::ZetaEval { .. } => "zeta-eval",
            Command::MeanSquare { .. } => "mean-square",
            Command::Expsum { .. } => "expsum",
            Command::Approx { .. } => "approx",
            Command::Classify { .. } => "classify",
            Command::Moment { .. } => "moment",
            Command::Report { .. } => "report",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub precision: PrecisionContext,
    /// `None` uses every core.
    pub threads: Option<usize>,
    pub output: OutputMode,
    pub table: Option<PathBuf>,
    pub timestamp: bool,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let g = cli.global;
        if g.json && g.csv {
            return Err(Error::Parse("--json and --csv are mutually exclusive".into()));
        }
        let precision = match g.precision_bits {
            Some(b) => PrecisionContext::new(b).map_err(|e| Error::Parse(e.to_string()))?,
            None => PrecisionContext::default(),
        };
        let output = if g.json {
            OutputMode::Json
        } else if g.csv {
            OutputMode::Csv
        } else {
            OutputMode::Human
        };
        Ok(RunConfig {
            command: cli.command,
            precision,
            threads: g.threads.map(|t| t as usize),
            output,
            table: g.table,
            timestamp: !g.no_timestamp,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub schema_version: u32,
    pub version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
    pub command: &'static str,
    pub precision_bits: usize,
    pub output: OutputMode,
}

impl Metadata {
    pub fn new(cfg: &RunConfig) -> Self {
        Metadata {
            schema_version: SCHEMA_VERSION,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: cfg
                .timestamp
                .then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)),
            command: cfg.command.name(),
            precision_bits: cfg.precision.bits(),
            output: cfg.output,
        }
    }
}

/// Exit status for an error: 2 for bad input, 3 for resource caps, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::Resource(_) => 3,
        _ => 1,
    }
}

pub fn error_object(kind: &str, message: &str, code: i32) -> String {
    json!({ "error": { "kind": kind, "message": message, "exit_code": code } }).to_string()
}

/// Parse arguments, run, and return the process exit status. Results go to
/// `out`, error objects to `err`.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let _ = writeln!(err, "{}", error_object("usage", msg.trim(), 2));
            return 2;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| run(&cfg, out));
    match result {
        Ok(()) => 0,
        Err(e) => {
            let code = exit_code(&e);
            let _ = writeln!(err, "{}", error_object(e.kind(), &e.to_string(), code));
            code
        }
    }
}

pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Resource(format!("thread pool: {e}")))?;
    let text = pool.install(|| dispatch(cfg))?;
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn expr(src: &str) -> Result<RealExpr> {
    RealExpr::parse(src)
}

fn real(src: &str, ctx: PrecisionContext) -> Result<f64> {
    let v = expr(src)?.eval(ctx.bits())?.to_f64();
    if !v.is_finite() {
        return Err(Error::Parse(format!("{src:?} is not a finite number")));
    }
    Ok(v)
}

fn load_table(cfg: &RunConfig, need: u64) -> Result<DivisorTable> {
    match &cfg.table {
        Some(path) => {
            let t = DivisorTable::load(path)?;
            if t.limit() < need {
                return Err(Error::OutOfRange {
                    what: "table limit",
                    value: need as f64,
                    limit: t.limit(),
                });
            }
            Ok(t)
        }
        None => sieve(need.max(1)),
    }
}

/// `value` with a `metadata` member added.
fn with_metadata<S: Serialize>(cfg: &RunConfig, value: &S) -> Result<String> {
    let mut v = serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?;
    let meta = serde_json::to_value(Metadata::new(cfg)).map_err(|e| Error::Io(e.to_string()))?;
    match &mut v {
        Value::Object(map) => {
            map.insert("metadata".into(), meta);
        }
        other => {
            v = json!({ "metadata": meta, "result": other.take() });
        }
    }
    let mut s = serde_json::to_string_pretty(&v).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn lines<I: IntoIterator<Item = (String, String)>>(pairs: I) -> String {
    let mut s = String::new();
    for (k, v) in pairs {
        s.push_str(&format!("{k}: {v}\n"));
    }
    s
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn complex_text(z: Complex64) -> String {
    format!("{} {} {}i", z.re, if z.im < 0.0 { '-' } else { '+' }, z.im.abs())
}

fn dispatch(cfg: &RunConfig) -> Result<String> {
    let ctx = cfg.precision;
    match &cfg.command {
        Command::Sieve { limit, out } => {
            let table = sieve(*limit)?;
            table.save(out)?;
            let d = table.divisor_sum_int(*limit);
            let v = json!({ "limit": limit, "path": out.display().to_string(), "divisor_sum": d });
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &v)?,
                OutputMode::Csv => format!("limit,path,divisor_sum\n{limit},{},{d}\n", out.display()),
                OutputMode::Human => lines([
                    kv("limit", limit),
                    kv("path", out.display()),
                    kv("D(limit)", d),
                ]),
            })
        }
        Command::ZetaEval { t } => {
            let t = real(t, ctx)?;
            let p = zeta_half_line(t)?;
            let z = zeta_critical(t)?;
            let v = json!({
                "t": p.t,
                "zeta_abs_sq": p.zeta_abs_sq,
                "zeta": [z.re, z.im],
                "theta": theta(t),
                "method": p.method,
            });
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &v)?,
                OutputMode::Csv => format!(
                    "t,zeta_abs_sq,zeta_re,zeta_im,method\n{},{},{},{},{}\n",
                    p.t,
                    p.zeta_abs_sq,
                    z.re,
                    z.im,
                    v["method"].as_str().unwrap_or_default()
                ),
                OutputMode::Human => lines([
                    kv("t", p.t),
                    kv("|zeta|^2", p.zeta_abs_sq),
                    kv("zeta", complex_text(z)),
                    kv("method", v["method"].as_str().unwrap_or_default()),
                ]),
            })
        }
        Command::MeanSquare { t, step, out } => {
            let t = real(t, ctx)?;
            let policy = match step {
                Some(h) => QuadraturePolicy::with_step(*h),
                None => QuadraturePolicy::default(),
            };
            let ms = continuous_mean_square(t, policy)?;
            Ok(match out.unwrap_or(cfg.output) {
                OutputMode::Json => with_metadata(cfg, &ms)?,
                OutputMode::Csv => format!(
                    "T,integral,main_term,E_T\n{},{},{},{}\n",
                    ms.t_max, ms.integral, ms.main_term, ms.e_t
                ),
                OutputMode::Human => lines([
                    kv("T", ms.t_max),
                    kv("integral", ms.integral),
                    kv("main_term", ms.main_term),
                    kv("E(T)", ms.e_t),
                    kv("panels", ms.panels),
                ]),
            })
        }
        Command::Expsum { m, alpha, algo } => {
            let res = run_expsum(cfg, *m, alpha, *algo)?;
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &res)?,
                OutputMode::Csv => format!(
                    "M,alpha,algorithm,re,im,accuracy\n{},{},{},{},{},{}\n",
                    res.m,
                    res.alpha,
                    algo_name(&res),
                    res.value.re,
                    res.value.im,
                    res.accuracy
                ),
                OutputMode::Human => lines([
                    kv("M", res.m),
                    kv("alpha", res.alpha),
                    kv("algorithm", algo_name(&res)),
                    kv("value", complex_text(res.value)),
                    kv("accuracy", res.accuracy),
                ]),
            })
        }
        Command::Approx { alpha, m } => {
            let a = dirichlet_approx(&expr(alpha)?, *m, ctx)?;
            let kind = serde_json::to_value(a.kind).map_err(|e| Error::Io(e.to_string()))?;
            let kind = kind.as_str().unwrap_or_default().to_string();
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &a)?,
                OutputMode::Csv => format!(
                    "alpha,M,p,q,err,kind\n{},{},{},{},{},{kind}\n",
                    a.alpha, a.m, a.p, a.q, a.err
                ),
                OutputMode::Human => lines([
                    kv("alpha", a.alpha),
                    kv("M", a.m),
                    kv("p/q", format!("{}/{}", a.p, a.q)),
                    kv("err", a.err),
                    kv("kind", kind),
                ]),
            })
        }
        Command::Classify { r, s, k0, kmax, t } => {
            let spec = ProgressionSpec::rational_power(*r, *s, *k0, 0.0)
                .map_err(|e| Error::Parse(e.to_string()))?;
            let t = t.as_deref().map(|t| real(t, ctx)).transpose()?;
            let rep = classify_spacing(&spec, *kmax, t, ctx)?;
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &rep)?,
                OutputMode::Csv => classify_csv(&rep),
                OutputMode::Human => classify_text(&rep),
            })
        }
        Command::Moment { prog, t } => {
            let t = real(t, ctx)?;
            let spec = progression(prog, ctx)?;
            let rep = single_report(cfg, &spec, t, prog)?;
            Ok(match cfg.output {
                OutputMode::Json => with_metadata(cfg, &rep)?,
                OutputMode::Csv => format!("{}\n{}\n", MomentReport::CSV_HEADER, rep.csv_row()),
                OutputMode::Human => moment_text(&rep),
            })
        }
        Command::Report {
            prog,
            ladder,
            plot_data,
        } => {
            let spec = progression(prog, ctx)?;
            let ts = ladder
                .iter()
                .map(|s| real(s, ctx))
                .collect::<Result<Vec<_>>>()?;
            if ts.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Parse("--T-ladder must be strictly increasing".into()));
            }
            let rows = ts
                .iter()
                .map(|&t| single_report(cfg, &spec, t, prog))
                .collect::<Result<Vec<_>>>()?;
            let bundle = ReportBundle::new(Metadata::new(cfg), rows)?;
            if let Some(path) = plot_data {
                emit_plot_data(&bundle, path)?;
            }
            Ok(match cfg.output {
                OutputMode::Json => {
                    let mut s = serde_json::to_string_pretty(&bundle).map_err(|e| Error::Io(e.to_string()))?;
                    s.push('\n');
                    s
                }
                OutputMode::Csv => bundle.to_csv(),
                OutputMode::Human => bundle.rows.iter().map(moment_text).collect::<Vec<_>>().join("\n"),
            })
        }
    }
}

fn algo_name(r: &ExpSumResult) -> String {
    serde_json::to_value(r.algorithm)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

fn parse_ratio(src: &str) -> Option<(i64, u64)> {
    let (r, s) = src.split_once('/')?;
    Some((r.trim().parse().ok()?, s.trim().parse().ok()?))
}

fn run_expsum(cfg: &RunConfig, m: u64, alpha: &str, algo: Algo) -> Result<ExpSumResult> {
    let ctx = cfg.precision;
    if algo == Algo::Rational {
        let (r, s) = parse_ratio(alpha)
            .ok_or_else(|| Error::Parse(format!("--algo rational needs --alpha r/s, got {alpha:?}")))?;
        let table = load_table(cfg, m)?;
        let rs = divisor_expsum_rational(&table, m as f64, r, s)?;
        return Ok(ExpSumResult {
            m,
            alpha: r as f64 / s as f64,
            value: rs.value,
            algorithm: crate::expsum::Algorithm::RationalClosedForm,
            accuracy: rs.accuracy,
        });
    }
    let a = expr(alpha)?.eval(ctx.bits())?.to_dd();
    match algo {
        Algo::Direct => divisor_expsum_direct_dd(&load_table(cfg, m)?, m, a),
        _ => divisor_expsum_hyperbola_dd(m, a),
    }
}

fn progression(prog: &ProgressionArgs, ctx: PrecisionContext) -> Result<ProgressionSpec> {
    let b = real(&prog.b, ctx)?;
    let bad = |e: Error| Error::Parse(e.to_string());
    match (&prog.rs, &prog.a) {
        (Some(rs), a) => {
            let parts: Vec<&str> = rs.split(':').collect();
            let nums = parts
                .iter()
                .map(|p| p.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .ok()
                .filter(|v| v.len() == 3)
                .ok_or_else(|| Error::Parse(format!("--rs expects R:S:K0, got {rs:?}")))?;
            let spec = ProgressionSpec::rational_power(nums[0], nums[1], nums[2], b).map_err(bad)?;
            if let Some(a) = a {
                let given = real(a, ctx)?;
                if (given - spec.a()).abs() > 1e-9 * spec.a() {
                    return Err(Error::Parse(format!(
                        "--a {given} disagrees with 2πK0/log(R/S) = {}",
                        spec.a()
                    )));
                }
            }
            Ok(spec)
        }
        (None, Some(a)) => ProgressionSpec::generic(expr(a)?, b).map_err(bad),
        (None, None) => Err(Error::Parse("give --a or --rs".into())),
    }
}

fn single_report(cfg: &RunConfig, spec: &ProgressionSpec, t: f64, prog: &ProgressionArgs) -> Result<MomentReport> {
    let form = match prog.form {
        FormArg::Refined => KeySumForm::Refined,
        FormArg::Intro => KeySumForm::Intro,
    };
    let mut req = MomentRequest::new(spec.clone(), t)?;
    req.precision = cfg.precision;
    req.key_sum_form = form;
    req.continuous = !prog.no_continuous;
    let table = load_table(cfg, key_sum_table_limit(spec, t, form))?;
    moment_report(&req, &table)
}

fn opt_text(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_else(|| "undefined".into())
}

fn moment_text(r: &MomentReport) -> String {
    let mut pairs = vec![
        kv("T", r.t_max),
        kv("a", format!("{} ({})", r.a, r.a_expr)),
        kv("b", r.b),
        kv("form", r.form_name()),
        kv("terms", r.terms),
        kv("empirical", r.empirical),
        kv("predicted_leading", r.predicted_leading),
        kv("predicted_full", r.predicted_full),
        kv("ratio_leading", opt_text(r.ratio_leading)),
        kv("ratio_full", opt_text(r.ratio_full)),
        kv("key_sum", complex_text(r.key_sum_value)),
        kv("key_sum/(T log T)", r.key_sum_over_t_log_t),
    ];
    for d in &r.diagnostics {
        pairs.push(kv(d.name, d.value));
    }
    lines(pairs)
}

fn classify_csv(rep: &SpacingReport) -> String {
    let mut s = String::from("k,log_ratio,status,exact_p,exact_q,M,p,q,err\n");
    for e in &rep.entries {
        let status = serde_json::to_value(e.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default();
        let (ep, eq) = e
            .exact
            .as_ref()
            .map(|(p, q)| (p.to_string(), q.to_string()))
            .unwrap_or_default();
        let m = e.m.map(|m| m.to_string()).unwrap_or_default();
        let (p, q, err) = e
            .approximant
            .as_ref()
            .map(|a| (a.p.to_string(), a.q.to_string(), a.err.to_string()))
            .unwrap_or_default();
        s.push_str(&format!("{},{},{status},{ep},{eq},{m},{p},{q},{err}\n", e.k, e.log_ratio));
    }
    s
}

fn classify_text(rep: &SpacingReport) -> String {
    let mut s = format!("a = {} ({})\n", rep.a, rep.a_expr);
    for e in &rep.entries {
        let line = match (&e.exact, &e.approximant) {
            (Some((p, q)), _) => format!("k = {}: rational, e^(2πk/a) = {p}/{q}\n", e.k),
            (None, Some(a)) => format!(
                "k = {}: irrational, best p/q = {}/{} at M = {} (err {})\n",
                e.k, a.p, a.q, a.m, a.err
            ),
            (None, None) => format!("k = {}: irrational\n", e.k),
        };
        s.push_str(&line);
    }
    s
}
