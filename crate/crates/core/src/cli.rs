//! Command-line front end: `verify`, `eval`, `compositions` and `limit`.
//!
//! Exit codes: 0 when everything passes, 1 on a mathematical failure (an
//! identity check fails or a series hits its term cap), 2 on usage errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::{Integer, Rational};
use serde_json::json;

use crate::decimal::{to_decimal, upper_scientific};
use crate::identities::{
    self, check_record, default_q_points, GridBounds, IdentityId, VerificationReport, VerifyError,
};
use crate::qkernel::{exact_string, parse_rational, QPoint};
use crate::series::{self, BoundedValue, SeriesConfig, SeriesError};
use crate::strings::{enumerate_compositions, Ending, IndexString};

#[derive(Debug, Parser)]
#[command(name = "qzeta", version, about = "Exact q-multiple harmonic sums, identity checks and q-zeta star series")]
struct Cli {
    /// key=value file with defaults; command-line flags take precedence
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Verify finite identities exactly over parameter grids
    Verify(VerifyArgs),
    /// Evaluate zeta*_q on a two-one string with a proven error bound
    Eval(EvalArgs),
    /// List the composition strings of a two-one string
    Compositions(CompositionArgs),
    /// Compare the two-one formula near q = 1 with its classical value
    Limit(LimitArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Emit line-delimited JSON
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Identity ids (eq11 .. eq34, cert15 .. cert19) or "all"
    #[arg(long = "identity", value_delimiter = ',')]
    identities: Vec<String>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    k_max: Option<u32>,
    #[arg(long)]
    a_max: Option<u32>,
    #[arg(long)]
    b_max: Option<u32>,
    #[arg(long)]
    m_max: Option<u32>,
    #[arg(long)]
    s_max: Option<u32>,
    /// q points as exact rationals, e.g. 1/2,0.7
    #[arg(long = "q", value_delimiter = ',')]
    q: Vec<String>,
    /// Skip the independent check of the reconstructed closed forms
    #[arg(long)]
    skip_reconstruction: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct EvalArgs {
    /// Two-one string in expanded form, e.g. 2,2,1,2,1
    #[arg(long, allow_hyphen_values = true)]
    string: String,
    #[arg(long = "q")]
    q: Option<String>,
    /// Target tail bound, as num/den, a decimal or 1e-k
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    digits: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EndingArg {
    One,
    Two,
}

#[derive(Debug, Args)]
struct CompositionArgs {
    /// Exponents s_1,...,s_m (and s_{m+1} for strings ending with 2)
    #[arg(long = "s", value_delimiter = ',', required = true)]
    s: Vec<u32>,
    #[arg(long, value_enum)]
    ending: EndingArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[arg(long)]
    string: String,
    #[arg(long = "q", value_delimiter = ',')]
    q: Vec<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    digits: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

/// Settings shared by the subcommands after merging defaults, the config
/// file and the command line.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub identities: Vec<IdentityId>,
    pub bounds: GridBounds,
    pub q_points: Vec<QPoint>,
    pub eps: Rational,
    pub digits: usize,
    pub format: OutputFormat,
    pub config_path: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Math(String),
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Reconstruction { .. } => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<SeriesError> for Failure {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::TermCap { .. } => Failure::Math(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Usage(message.into())
}

/// Parses a positive tolerance: `num/den`, a terminating decimal, or
/// `Me-k` / `Me+k` with an exact mantissa.
pub fn parse_eps(text: &str) -> Option<Rational> {
    let text = text.trim();
    let value = match text.to_ascii_lowercase().split_once('e') {
        Some((mantissa, exponent)) => {
            let m = parse_rational(mantissa).ok()?;
            let e: i32 = exponent.parse().ok()?;
            let p = Rational::from(Integer::from(Integer::u_pow_u(10, e.unsigned_abs())));
            if e < 0 {
                m / p
            } else {
                m * p
            }
        }
        None => parse_rational(text).ok()?,
    };
    (value > 0).then_some(value)
}

fn parse_q_list(items: &[String]) -> Result<Vec<QPoint>, Failure> {
    items
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<QPoint>().map_err(|e| usage(e.to_string())))
        .collect()
}

fn parse_identities(items: &[String]) -> Result<Vec<IdentityId>, Failure> {
    let mut out = Vec::new();
    for item in items.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
        if item.eq_ignore_ascii_case("all") {
            out.extend(IdentityId::ALL);
        } else {
            out.push(item.parse::<IdentityId>().map_err(|e| usage(e.to_string()))?);
        }
    }
    let mut seen = Vec::new();
    out.retain(|id| {
        let fresh = !seen.contains(id);
        seen.push(*id);
        fresh
    });
    Ok(out)
}

const CONFIG_KEYS: [&str; 12] =
    ["identity", "n_max", "k_max", "a_max", "b_max", "m_max", "s_max", "q", "eps", "digits", "format", "skip_reconstruction"];

fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key=value", path.display(), i + 1)))?;
        let key = key.trim().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(usage(format!("{}:{}: unknown key {key:?}", path.display(), i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct Layered {
    file: BTreeMap<String, String>,
}

impl Layered {
    fn number<T: std::str::FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(v) => v.parse().map(Some).map_err(|_| usage(format!("config {key} = {v:?} is not a valid number"))),
            None => Ok(None),
        }
    }

    fn list(&self, flag: &[String], key: &str) -> Vec<String> {
        if !flag.is_empty() {
            return flag.to_vec();
        }
        self.file.get(key).map(|v| v.split(',').map(str::to_string).collect()).unwrap_or_default()
    }

    fn text(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| self.file.get(key).cloned())
    }

    fn flag(&self, flag: bool, key: &str) -> Result<bool, Failure> {
        if flag {
            return Ok(true);
        }
        match self.file.get(key).map(String::as_str) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(v) => Err(usage(format!("config {key} = {v:?} is not true/false"))),
        }
    }

    fn format(&self, json: bool) -> Result<OutputFormat, Failure> {
        if json {
            return Ok(OutputFormat::Json);
        }
        match self.file.get("format").map(String::as_str) {
            None | Some("text") => Ok(OutputFormat::Text),
            Some("json") => Ok(OutputFormat::Json),
            Some(v) => Err(usage(format!("config format = {v:?} must be text or json"))),
        }
    }
}

struct Common<'a> {
    q: &'a [String],
    eps: Option<&'a String>,
    digits: Option<usize>,
    json: bool,
    default_q: Vec<QPoint>,
    default_eps: &'a str,
}

fn build_config(layers: &Layered, path: Option<PathBuf>, c: Common<'_>) -> Result<RunConfig, Failure> {
    let q_points = parse_q_list(&layers.list(c.q, "q"))?;
    let q_points = if q_points.is_empty() { c.default_q } else { q_points };
    let eps_text = layers.text(c.eps, "eps").unwrap_or_else(|| c.default_eps.to_string());
    let eps = parse_eps(&eps_text).ok_or_else(|| usage(format!("eps {eps_text:?} must be a positive exact number")))?;
    let digits = layers.number(c.digits, "digits")?.unwrap_or(30);
    if digits == 0 {
        return Err(usage("digits must be at least 1"));
    }
    Ok(RunConfig {
        identities: Vec::new(),
        bounds: GridBounds::default(),
        q_points,
        eps,
        digits,
        format: layers.format(c.json)?,
        config_path: path,
    })
}

struct Emitter<'a> {
    out: &'a mut dyn Write,
}

impl Emitter<'_> {
    fn line(&mut self, text: impl AsRef<str>) {
        // a closed pipe is not an error worth reporting
        let _ = writeln!(self.out, "{}", text.as_ref());
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_from<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let mut emit = Emitter { out };
    match dispatch(cli, &mut emit) {
        Ok(code) => code,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Math(m)) => {
            let _ = writeln!(err, "failure: {m}");
            1
        }
    }
}

pub fn run() -> ExitCode {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    let code = run_from(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock());
    ExitCode::from(code)
}

fn dispatch(cli: Cli, emit: &mut Emitter<'_>) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let layers = Layered { file };
    let series_config = || SeriesConfig::from_env().map_err(|e| usage(e.to_string()));
    match cli.command {
        Command::Verify(args) => {
            let mut config = build_config(
                &layers,
                cli.config.clone(),
                Common { q: &args.q, eps: None, digits: None, json: args.output.json, default_q: default_q_points(), default_eps: "1e-30" },
            )?;
            config.identities = parse_identities(&layers.list(&args.identities, "identity"))?;
            if config.identities.is_empty() {
                return Err(usage("no identity selected (use --identity <id> or --identity all)"));
            }
            let defaults = GridBounds::default();
            let n_max = layers.number(args.n_max, "n_max")?.unwrap_or(defaults.n_max);
            config.bounds = GridBounds {
                n_max,
                k_max: layers.number(args.k_max, "k_max")?.unwrap_or(n_max),
                a_max: layers.number(args.a_max, "a_max")?.unwrap_or(defaults.a_max),
                b_max: layers.number(args.b_max, "b_max")?.unwrap_or(defaults.b_max),
                m_max: layers.number(args.m_max, "m_max")?.unwrap_or(defaults.m_max),
                s_max: layers.number(args.s_max, "s_max")?.unwrap_or(defaults.s_max),
            };
            let skip = layers.flag(args.skip_reconstruction, "skip_reconstruction")?;
            cmd_verify(&config, skip, emit)
        }
        Command::Eval(args) => {
            let config = build_config(
                &layers,
                cli.config.clone(),
                Common {
                    q: args.q.as_slice(),
                    eps: args.eps.as_ref(),
                    digits: args.digits,
                    json: args.output.json,
                    default_q: vec![QPoint::from_ratio(1, 2)],
                    default_eps: "1e-30",
                },
            )?;
            if config.q_points.len() != 1 {
                return Err(usage("eval takes exactly one q"));
            }
            cmd_eval(&config, &args.string, &series_config()?, emit)
        }
        Command::Compositions(args) => {
            let json = args.output.json || layers.format(false)? == OutputFormat::Json;
            cmd_compositions(&args.s, args.ending, json, emit)
        }
        Command::Limit(args) => {
            let config = build_config(
                &layers,
                cli.config.clone(),
                Common {
                    q: &args.q,
                    eps: args.eps.as_ref(),
                    digits: args.digits,
                    json: args.output.json,
                    default_q: [(9, 10), (99, 100), (999, 1000)].into_iter().map(|(n, d)| QPoint::from_ratio(n, d)).collect(),
                    default_eps: "1e-12",
                },
            )?;
            cmd_limit(&config, &args.string, &series_config()?, emit)
        }
    }
}

fn q_list_text(q: &[Rational]) -> String {
    q.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
}

fn emit_report(report: &VerificationReport, format: OutputFormat, emit: &mut Emitter<'_>) {
    match format {
        OutputFormat::Json => {
            for c in &report.checks {
                emit.line(serde_json::to_string(&check_record(c)).expect("records serialize"));
            }
        }
        OutputFormat::Text => {
            let status = if report.passed() { "PASS" } else { "FAIL" };
            emit.line(format!(
                "{status} {}: {}/{} checks, {} parameter points, q = {} ({:.2?})",
                report.identity,
                report.pass_count(),
                report.checks.len(),
                report.grid().len(),
                q_list_text(&report.q_points),
                report.elapsed
            ));
            for c in report.failures() {
                emit.line(format!("  witness {} at q = {}: lhs = {} rhs = {}", c.params, c.q, c.lhs, c.rhs));
                if let Some(alt) = &c.lhs_alt {
                    emit.line(format!("    lhs by recurrence = {alt}"));
                }
            }
        }
    }
}

fn cmd_verify(config: &RunConfig, skip_reconstruction: bool, emit: &mut Emitter<'_>) -> Result<u8, Failure> {
    let mut all_pass = true;
    if !skip_reconstruction {
        let report = identities::validate_reconstructions(&config.q_points, config.bounds.n_max)?;
        emit_report(&report, config.format, emit);
    }
    for &id in &config.identities {
        let report = identities::verify(id, &config.bounds, &config.q_points)?;
        all_pass &= report.passed();
        emit_report(&report, config.format, emit);
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn emit_value(label: &str, value: &BoundedValue, digits: usize, emit: &mut Emitter<'_>) {
    emit.line(format!("{label}{}", to_decimal(&value.partial_sum, digits)));
    emit.line(format!("  tail bound <= {}", upper_scientific(&value.tail_bound, 3)));
    emit.line(format!("  terms used  {}", value.terms_used));
}

fn cmd_eval(config: &RunConfig, text: &str, series_config: &SeriesConfig, emit: &mut Emitter<'_>) -> Result<u8, Failure> {
    let q = &config.q_points[0];
    let parsed = IndexString::parse(text).map_err(|e| usage(e.to_string()))?;
    let value = match &parsed {
        None => BoundedValue::exact(Rational::from(1)),
        Some(s) => series::two_one_eval(s, q, &config.eps, series_config)?,
    };
    let shown = parsed.as_ref().map(ToString::to_string).unwrap_or_default();
    match config.format {
        OutputFormat::Json => emit.line(
            json!({
                "string": shown,
                "q": exact_string(q.value()),
                "eps": exact_string(&config.eps),
                "value": value.to_json(config.digits),
            })
            .to_string(),
        ),
        OutputFormat::Text => emit_value(&format!("zeta*_q[{shown}] at q = {q}: "), &value, config.digits, emit),
    }
    Ok(0)
}

fn cmd_compositions(s: &[u32], ending: EndingArg, json: bool, emit: &mut Emitter<'_>) -> Result<u8, Failure> {
    let ending = match ending {
        EndingArg::One => Ending::One,
        EndingArg::Two => Ending::Two,
    };
    let string = IndexString::new(s.to_vec(), ending).map_err(|e| usage(e.to_string()))?;
    let rows = enumerate_compositions(&string).map_err(|e| usage(e.to_string()))?;
    let join = |v: &[u32]| v.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    for c in &rows {
        if json {
            emit.line(json!({ "mask": c.mask_string(), "p": c.p, "p_tilde": c.p_tilde }).to_string());
        } else {
            let mask = if c.mask.is_empty() { "-".to_string() } else { c.mask_string() };
            emit.line(format!("{mask}\tp = ({})\tp~ = ({})", join(&c.p), join(&c.p_tilde)));
        }
    }
    Ok(0)
}

fn cmd_limit(config: &RunConfig, text: &str, series_config: &SeriesConfig, emit: &mut Emitter<'_>) -> Result<u8, Failure> {
    let s = IndexString::parse(text)
        .map_err(|e| usage(e.to_string()))?
        .ok_or_else(|| usage("the empty string has no classical target"))?;
    let probe = series::limit_probe(&s, &config.q_points, &config.eps, series_config)?;
    let digits = config.digits;
    match config.format {
        OutputFormat::Json => {
            emit.line(
                json!({
                    "string": s.to_string(),
                    "target": probe.target.describe(),
                    "value": probe.target_value.to_json(digits),
                })
                .to_string(),
            );
            for row in &probe.rows {
                emit.line(
                    json!({
                        "q": exact_string(row.q.value()),
                        "value": row.value.to_json(digits),
                        "distance": to_decimal(&row.distance, digits),
                        "uncertainty": upper_scientific(&row.uncertainty, 3),
                    })
                    .to_string(),
                );
            }
            emit.line(json!({ "distances_decrease": probe.distances_decrease() }).to_string());
        }
        OutputFormat::Text => {
            emit_value(&format!("{} = ", probe.target.describe()), &probe.target_value, digits, emit);
            emit.line("q\tvalue\ttail bound\t|value - target|");
            for row in &probe.rows {
                emit.line(format!(
                    "{}\t{}\t{}\t{}",
                    row.q,
                    to_decimal(&row.value.partial_sum, digits),
                    upper_scientific(&row.value.tail_bound, 3),
                    to_decimal(&row.distance, digits)
                ));
            }
            let verdict = if probe.distances_decrease() { "strictly decreasing" } else { "not provably decreasing" };
            emit.line(format!("distances: {verdict}"));
        }
    }
    Ok(0)
}
