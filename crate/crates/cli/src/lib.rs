//! Command surface of `wnrank`: run a test on a CSV panel or a Monte Carlo grid.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use wn_core::io::{load_csv, save_csv, Outcome, ResultDocument};
use wn_core::lstat::{permutation_test, LStatConfig, DEFAULT_PERMS};
use wn_core::mc::{
    replicate_seed, run_power, run_size, with_threads, CurveAxis, McGrid, McMethod, ModelSpec, DEFAULT_REPS,
};
use wn_core::scan::{max_test, pair_scan};
use wn_core::simgen::{AltForm, NullModel, DEFAULT_BURN_IN};
use wn_core::{Method, WnError};

pub const EXIT_ACCEPT: i32 = 0;
pub const EXIT_REJECT: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] WnError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "wnrank",
    version,
    about = "Rank-correlation white noise tests for multivariate time series"
)]
pub struct Cli {
    /// Worker threads; falls back to WN_THREADS, then all cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test a CSV panel (rows = time, columns = series) for white noise.
    Test(TestArgs),
    /// Estimate empirical size or power by Monte Carlo.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TestMethod {
    Rho,
    Tau,
    D,
    R,
    Taustar,
    Xi,
    Lstat,
}

impl TestMethod {
    fn builtin(self) -> Option<Method> {
        match self {
            TestMethod::Rho => Some(Method::SpearmanRho),
            TestMethod::Tau => Some(Method::KendallTau),
            TestMethod::D => Some(Method::HoeffdingD),
            TestMethod::R => Some(Method::BkrR),
            TestMethod::Taustar => Some(Method::TauStar),
            TestMethod::Xi => Some(Method::ChatterjeeXi),
            TestMethod::Lstat => None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Emit the JSON result document (default).
    #[arg(long, conflicts_with = "csv")]
    pub json: bool,
    /// Emit the CSV projection of the result.
    #[arg(long)]
    pub csv: bool,
    /// Write the result here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TestArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// The first row holds column names.
    #[arg(long)]
    pub header: bool,
    #[arg(long, value_enum)]
    pub method: TestMethod,
    /// Statistic summed by the L-statistic.
    #[arg(long, default_value = "taustar")]
    pub stat: String,
    /// Largest lag.
    #[arg(short = 'K', long = "K", default_value_t = 2)]
    pub k_max: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Number of largest cells summed (L-statistic only).
    #[arg(short = 'L', long = "L")]
    pub l: Option<usize>,
    /// Permutations (L-statistic only).
    #[arg(long)]
    pub perms: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Size,
    Power,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Comma-separated model ids: i..viii for size, I..VIII for power.
    #[arg(long)]
    pub models: String,
    /// Comma-separated methods, e.g. `d,taustar,lstat_taustar_L5_B200`.
    #[arg(long, default_value = "rho,tau,taustar,d,r,xi")]
    pub methods: String,
    #[arg(long, default_value = "100")]
    pub n: String,
    #[arg(long, default_value = "30")]
    pub p: String,
    #[arg(short = 'K', long = "K", default_value = "2")]
    pub k: String,
    /// Signal strengths: a list `0.1,0.5` or a sweep `start:end:count`.
    #[arg(long, default_value = "0.5")]
    pub rho: String,
    /// Sparsity levels: a list or a sweep.
    #[arg(long, default_value = "2")]
    pub k0: String,
    /// Keep each alternative's matrix fixed across replicates.
    #[arg(long)]
    pub fixed_matrix: bool,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    /// With --csv, emit long-format rows against this axis (rho, k0, p, n, K).
    #[arg(long)]
    pub curve: Option<String>,
    /// Also write the first replicate panel of the first cell as CSV.
    #[arg(long)]
    pub emit_panel: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn check_alpha(alpha: f64) -> CliResult<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(rand::random)
}

fn resolve_threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match std::env::var("WN_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("WN_THREADS must be a positive integer, got '{v}'"))),
        _ => Ok(None),
    }
}

/// Parses `a,b,c` or a sweep `start:end:count` with evenly spaced points.
pub fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<Vec<T>>
where
    f64: Into<SweepValue<T>>,
{
    let bad = || usage(format!("malformed {what} list '{s}'"));
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    if parts.len() == 3 {
        let start: f64 = parts[0].parse().map_err(|_| bad())?;
        let end: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if count == 0 || !(start.is_finite() && end.is_finite()) {
            return Err(bad());
        }
        let step = if count == 1 {
            0.0
        } else {
            (end - start) / (count - 1) as f64
        };
        return (0..count)
            .map(|i| {
                let x = if i + 1 == count && count > 1 {
                    end
                } else {
                    start + step * i as f64
                };
                // Round away float noise so labels read cleanly.
                let x = (x * 1e12).round() / 1e12;
                Into::<SweepValue<T>>::into(x).0.ok_or_else(bad)
            })
            .collect();
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    let values: Vec<T> = s
        .split(',')
        .map(|v| v.trim().parse().map_err(|_| bad()))
        .collect::<CliResult<_>>()?;
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// Conversion of a sweep point into a list element.
pub struct SweepValue<T>(Option<T>);

impl From<f64> for SweepValue<f64> {
    fn from(x: f64) -> Self {
        SweepValue(Some(x))
    }
}

impl From<f64> for SweepValue<usize> {
    fn from(x: f64) -> Self {
        SweepValue((x >= 0.0 && x.fract() == 0.0).then_some(x as usize))
    }
}

fn emit(doc: &ResultDocument, output: &OutputArgs, curve: Option<CurveAxis>, stdout: &mut dyn Write) -> CliResult<()> {
    let mut buf = Vec::new();
    if output.csv {
        match (&doc.outcome, curve) {
            (Outcome::Table(table), Some(axis)) => table.write_curve_csv(&mut buf, axis)?,
            _ => doc.write_csv(&mut buf)?,
        }
    } else {
        buf.extend_from_slice(doc.to_json()?.as_bytes());
        buf.push(b'\n');
    }
    match &output.out {
        Some(path) => File::create(path)?.write_all(&buf)?,
        None => stdout.write_all(&buf)?,
    }
    Ok(())
}

#[derive(Serialize)]
struct TestEcho<'a> {
    command: &'static str,
    input: &'a PathBuf,
    header: bool,
    method: TestMethod,
    stat: Option<Method>,
    #[serde(rename = "K")]
    k_max: usize,
    alpha: f64,
    #[serde(rename = "L")]
    l: Option<usize>,
    perms: Option<usize>,
    seed: Option<u64>,
    format: &'static str,
    threads: Option<usize>,
}

pub fn cmd_test(args: &TestArgs, threads: Option<usize>, stdout: &mut dyn Write) -> CliResult<i32> {
    check_alpha(args.alpha)?;
    let lstat = args.method == TestMethod::Lstat;
    if !lstat && (args.l.is_some() || args.perms.is_some()) {
        return Err(usage("--L and --perms apply only to --method lstat"));
    }
    let stat: Option<Method> = if lstat {
        let m: Method = args.stat.parse().map_err(|e: WnError| usage(e.to_string()))?;
        if m == Method::GenericSlr {
            return Err(usage("--stat must name a built-in statistic"));
        }
        Some(m)
    } else {
        None
    };
    let start = Instant::now();
    let loaded = load_csv(&args.input, args.header)?;
    let seed = lstat.then(|| resolve_seed(args.seed));
    let l = lstat.then(|| args.l.unwrap_or(1));
    let perms = lstat.then(|| args.perms.unwrap_or(DEFAULT_PERMS));

    let outcome = with_threads(threads, || match args.method.builtin() {
        Some(method) => max_test(&pair_scan(&loaded.panel, args.k_max, method)?, args.alpha),
        None => permutation_test(
            &loaded.panel,
            &LStatConfig {
                l: l.unwrap_or(1),
                method: stat.unwrap_or(Method::TauStar),
                perms: perms.unwrap_or(DEFAULT_PERMS),
                alpha: args.alpha,
                seed: seed.unwrap_or(0),
            },
            args.k_max,
        ),
    })??;

    let echo = TestEcho {
        command: "test",
        input: &args.input,
        header: args.header,
        method: args.method,
        stat,
        k_max: args.k_max,
        alpha: args.alpha,
        l,
        perms,
        seed: seed.or(args.seed),
        format: if args.output.csv { "csv" } else { "json" },
        threads,
    };
    let reject = outcome.reject;
    let (i, j, _) = outcome.argmax;
    let mut doc = ResultDocument::new(
        serde_json::to_value(echo).expect("serializable echo"),
        Outcome::Test(outcome),
    );
    doc.argmax_columns = loaded
        .names
        .is_some()
        .then(|| (loaded.column_name(i - 1), loaded.column_name(j - 1)));
    doc.warnings = loaded.warnings.clone();
    doc.seed = seed;
    doc.wall_seconds = start.elapsed().as_secs_f64();
    emit(&doc, &args.output, None, stdout)?;
    Ok(if reject { EXIT_REJECT } else { EXIT_ACCEPT })
}

fn build_grid(args: &SimulateArgs, seed: u64) -> CliResult<McGrid> {
    check_alpha(args.alpha)?;
    let ids: Vec<&str> = args
        .models
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if ids.is_empty() {
        return Err(usage("--models is empty"));
    }
    let mut models = Vec::new();
    match args.mode {
        Mode::Size => {
            for id in ids {
                let model: NullModel = id.parse().map_err(|e: WnError| usage(e.to_string()))?;
                models.push(ModelSpec::null(model));
            }
        }
        Mode::Power => {
            let rhos: Vec<f64> = parse_list(&args.rho, "rho")?;
            let k0s: Vec<usize> = parse_list(&args.k0, "k0")?;
            for id in ids {
                let form: AltForm = id.parse().map_err(|e: WnError| usage(e.to_string()))?;
                for &k0 in &k0s {
                    for &rho in &rhos {
                        models.push(ModelSpec::Alt {
                            form,
                            rho,
                            k0,
                            fixed_matrix: args.fixed_matrix,
                        });
                    }
                }
            }
        }
    }
    let methods = args
        .methods
        .split(',')
        .map(|m| m.trim().parse::<McMethod>().map_err(|e| usage(e.to_string())))
        .collect::<CliResult<Vec<_>>>()?;
    let grid = McGrid {
        models,
        methods,
        n_list: parse_list(&args.n, "n")?,
        p_list: parse_list(&args.p, "p")?,
        k_list: parse_list(&args.k, "K")?,
        reps: args.reps,
        alpha: args.alpha,
        base_seed: seed,
        burn_in: args.burn_in,
    };
    grid.validate().map_err(|e| usage(e.to_string()))?;
    Ok(grid)
}

pub fn cmd_simulate(args: &SimulateArgs, threads: Option<usize>, stdout: &mut dyn Write) -> CliResult<i32> {
    let seed = resolve_seed(args.seed);
    let grid = build_grid(args, seed)?;
    let curve = args
        .curve
        .as_deref()
        .map(|c| c.parse::<CurveAxis>().map_err(|e| usage(e.to_string())))
        .transpose()?;
    let start = Instant::now();
    if let Some(path) = &args.emit_panel {
        let (model, n, p, k) = (&grid.models[0], grid.n_list[0], grid.p_list[0], grid.k_list[0]);
        let panel = model.generate(n, p, replicate_seed(seed, model, n, p, k, 0), seed, grid.burn_in)?;
        save_csv(&panel, None, path)?;
    }
    let table = with_threads(threads, || match args.mode {
        Mode::Size => run_size(&grid),
        Mode::Power => run_power(&grid),
    })??;
    let mut warnings = Vec::new();
    for c in table.cells.iter().filter(|c| c.partial) {
        warnings.push(format!(
            "model {} method {} n={} p={} K={}: {} of {} replicates failed",
            c.model, c.method, c.n, c.p, c.k, c.failed, grid.reps
        ));
    }
    let echo = serde_json::json!({
        "command": "simulate",
        "mode": args.mode,
        "grid": grid,
        "curve": args.curve,
        "emit_panel": args.emit_panel,
        "format": if args.output.csv { "csv" } else { "json" },
        "threads": threads,
    });
    let mut doc = ResultDocument::new(echo, Outcome::Table(table));
    doc.warnings = warnings;
    doc.seed = Some(seed);
    doc.wall_seconds = start.elapsed().as_secs_f64();
    emit(&doc, &args.output, curve, stdout)?;
    Ok(EXIT_ACCEPT)
}

/// Parses `args` and runs the command, returning the process exit code.
/// Errors are reported on `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_ACCEPT };
        }
    };
    let result = resolve_threads(cli.threads).and_then(|threads| match &cli.command {
        Command::Test(a) => cmd_test(a, threads, stdout),
        Command::Simulate(a) => cmd_simulate(a, threads, stdout),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "wnrank: {e}");
            EXIT_ERROR
        }
    }
}
