//! Command-line front end for `rubber-core`.
//!
//! [`Cli`] is the clap surface, [`RunConfig`] the validated request and
//! [`run`] turns a request into an [`Outcome`]: exit code, stdout text and
//! warnings for stderr.

pub mod cache;
pub mod output;
pub mod reference;
pub mod verify;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rubber_core::chambers::{self, validate};
use rubber_core::recursion::{self, EulerTable};
use rubber_core::series::DEFAULT_ORDER;
use rubber_core::strata::{self, RamificationDatum};
use rubber_core::GClass;
use serde_json::{json, Value};
use thiserror::Error;

use crate::cache::{Cache, CacheError};
use crate::output::{big, class_json, Report};

/// Largest `max_n` accepted by `table` and `ratio`.
pub const TABLE_BOUND: usize = 40;

/// Largest `max_n` accepted by `verify`; the oracle suites are exponential.
pub const VERIFY_BOUND: usize = 7;

pub mod exit {
    pub const OK: i32 = 0;
    pub const INVALID_INPUT: i32 = 1;
    pub const VERIFICATION_FAILED: i32 = 2;
    pub const INTERNAL: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "rubber", version, about = "Euler characteristics and classes of genus-zero rubber map spaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CommandArgs,

    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Directory for cached tables and classes.
    #[arg(long, global = true, env = "RUBBER_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum CommandArgs {
    /// Euler characteristics of the maximally ramified spaces, n = 2..=max-n.
    Table {
        #[arg(long, default_value_t = 19)]
        max_n: usize,
        /// Truncation order; defaults to max(20, max-n).
        #[arg(long)]
        order: Option<usize>,
    },
    /// Euler characteristic of the space for a ramification vector.
    Euler {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Class in Z[L], coefficients lowest degree first.
    Class {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Validation report and chamber signature.
    Chamber {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Difference of classes between the chambers of x and y.
    Wallcross {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Run the property suites.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
    },
    /// Ratio of the two Euler characteristic columns, n = 2..=max-n.
    Ratio {
        #[arg(long, default_value_t = 19)]
        max_n: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Recursion,
    Strata,
    Chambers,
    Oracle,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Recursion => "recursion",
            Suite::Strata => "strata",
            Suite::Chambers => "chambers",
            Suite::Oracle => "oracle",
            Suite::All => "all",
        }
    }
}

/// A validated request: exactly one command with checked arguments.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub format: Format,
    pub cache_dir: Option<PathBuf>,
    pub threads: Option<usize>,
}

#[derive(Clone, Debug)]
pub enum Command {
    Table { max_n: usize, order: usize },
    Euler { x: RamificationDatum },
    Class { x: RamificationDatum },
    Chamber { x: RamificationDatum },
    Wallcross { x: RamificationDatum, y: RamificationDatum },
    Verify { suite: Suite, max_n: usize },
    Ratio { max_n: usize },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Table { .. } => "table",
            Command::Euler { .. } => "euler",
            Command::Class { .. } => "class",
            Command::Chamber { .. } => "chamber",
            Command::Wallcross { .. } => "wallcross",
            Command::Verify { .. } => "verify",
            Command::Ratio { .. } => "ratio",
        }
    }

    fn input(&self) -> Value {
        match self {
            Command::Table { max_n, order } => json!({ "max_n": max_n, "order": order }),
            Command::Euler { x } | Command::Class { x } | Command::Chamber { x } => json!({ "x": x.entries() }),
            Command::Wallcross { x, y } => json!({ "x": x.entries(), "y": y.entries() }),
            Command::Verify { suite, max_n } => json!({ "suite": suite.name(), "max_n": max_n }),
            Command::Ratio { max_n } => json!({ "max_n": max_n }),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    InvalidInput(String),
    #[error(transparent)]
    Core(#[from] rubber_core::Error),
    #[error(transparent)]
    Cache(#[from] CacheError),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rubber_core::Error as E;
        match self {
            CliError::InvalidInput(_) => exit::INVALID_INPUT,
            CliError::Core(
                E::BoundExceeded { .. }
                | E::InvalidArgument(_)
                | E::Validation(_)
                | E::LengthMismatch { .. }
                | E::OrderTooSmall { .. },
            ) => exit::INVALID_INPUT,
            _ => exit::INTERNAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            exit::INVALID_INPUT => "invalid_input",
            _ => "internal",
        }
    }
}

/// Parses a comma-separated list of signed integers.
pub fn parse_vector(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<i64>().map_err(|_| CliError::InvalidInput(format!("'{s}' is not an integer")))
        })
        .collect()
}

fn parse_datum(text: &str) -> Result<RamificationDatum, CliError> {
    let v = parse_vector(text)?;
    validate(&v).map_err(|e| CliError::InvalidInput(format!("x = ({text}) rejected: {e}")))
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Result<Self, CliError> {
        let command = match cli.command {
            CommandArgs::Table { max_n, order } => {
                check_range("max_n", max_n, 2, TABLE_BOUND)?;
                let order = order.unwrap_or(DEFAULT_ORDER.max(max_n));
                if order < max_n {
                    return Err(CliError::InvalidInput(format!("order {order} is smaller than max_n {max_n}")));
                }
                Command::Table { max_n, order }
            }
            CommandArgs::Euler { x } => Command::Euler { x: parse_datum(&x)? },
            CommandArgs::Class { x } => Command::Class { x: parse_datum(&x)? },
            CommandArgs::Chamber { x } => Command::Chamber { x: parse_datum(&x)? },
            CommandArgs::Wallcross { x, y } => {
                let (x, y) = (parse_datum(&x)?, parse_datum(&y)?);
                if x.n() != y.n() {
                    return Err(CliError::InvalidInput(format!("x has {} entries, y has {}", x.n(), y.n())));
                }
                Command::Wallcross { x, y }
            }
            CommandArgs::Verify { suite, max_n } => {
                check_range("max_n", max_n, 3, VERIFY_BOUND)?;
                Command::Verify { suite, max_n }
            }
            CommandArgs::Ratio { max_n } => {
                check_range("max_n", max_n, 2, TABLE_BOUND)?;
                Command::Ratio { max_n }
            }
        };
        if cli.threads == Some(0) {
            return Err(CliError::InvalidInput("threads must be positive".into()));
        }
        Ok(Self { command, format: cli.format, cache_dir: cli.cache_dir, threads: cli.threads })
    }
}

fn check_range(what: &str, value: usize, lo: usize, hi: usize) -> Result<(), CliError> {
    if (lo..=hi).contains(&value) {
        Ok(())
    } else {
        Err(CliError::InvalidInput(format!("{what} = {value} is outside {lo}..={hi}")))
    }
}

/// What a run produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub warnings: Vec<String>,
}

impl Outcome {
    /// Machine-readable error report.
    pub fn error(command: &str, input: Value, code: i32, kind: &str, message: &str) -> Self {
        let body = json!({
            "command": command,
            "input": input,
            "error": { "kind": kind, "message": message },
        });
        Self { code, stdout: format!("{body}\n"), warnings: Vec::new() }
    }
}

/// Parses arguments and runs; argument errors become exit code 1 with an
/// error report.
pub fn run_cli(cli: Cli) -> Outcome {
    let name = match &cli.command {
        CommandArgs::Table { .. } => "table",
        CommandArgs::Euler { .. } => "euler",
        CommandArgs::Class { .. } => "class",
        CommandArgs::Chamber { .. } => "chamber",
        CommandArgs::Wallcross { .. } => "wallcross",
        CommandArgs::Verify { .. } => "verify",
        CommandArgs::Ratio { .. } => "ratio",
    };
    let raw = raw_input(&cli.command);
    match RunConfig::from_cli(cli) {
        Ok(config) => run(config),
        Err(e) => Outcome::error(name, raw, e.exit_code(), e.kind(), &e.to_string()),
    }
}

fn raw_input(args: &CommandArgs) -> Value {
    match args {
        CommandArgs::Table { max_n, order } => json!({ "max_n": max_n, "order": order }),
        CommandArgs::Euler { x } | CommandArgs::Class { x } | CommandArgs::Chamber { x } => json!({ "x": x }),
        CommandArgs::Wallcross { x, y } => json!({ "x": x, "y": y }),
        CommandArgs::Verify { suite, max_n } => json!({ "suite": suite.name(), "max_n": max_n }),
        CommandArgs::Ratio { max_n } => json!({ "max_n": max_n }),
    }
}

pub fn run(config: RunConfig) -> Outcome {
    let name = config.command.name();
    let input = config.command.input();
    let mut warnings = Vec::new();
    let start = Instant::now();

    let result = match config.threads {
        Some(k) => match rayon::ThreadPoolBuilder::new().num_threads(k).build() {
            Ok(pool) => pool.install(|| dispatch(&config, &mut warnings)),
            Err(e) => Err(CliError::Internal(format!("thread pool: {e}"))),
        },
        None => dispatch(&config, &mut warnings),
    };
    let timing_ms = start.elapsed().as_secs_f64() * 1000.0;

    match result {
        Ok((report, code)) => {
            let stdout = match config.format {
                Format::Json => report.to_json(name, input, timing_ms),
                Format::Csv => match report.to_csv() {
                    Ok(s) => s,
                    Err(e) => {
                        return Outcome::error(name, config.command.input(), exit::INTERNAL, "internal", &e.to_string())
                    }
                },
            };
            Outcome { code, stdout, warnings }
        }
        Err(e) => {
            let mut out = Outcome::error(name, input, e.exit_code(), e.kind(), &e.to_string());
            out.warnings = warnings;
            out
        }
    }
}

fn open_cache(config: &RunConfig) -> Result<Option<Cache>, CliError> {
    Ok(match &config.cache_dir {
        Some(dir) => Some(Cache::open(dir)?),
        None => None,
    })
}

fn dispatch(config: &RunConfig, warnings: &mut Vec<String>) -> Result<(Report, i32), CliError> {
    let cache = open_cache(config)?;
    let report = match &config.command {
        Command::Table { max_n, order } => table(*max_n, *order, cache.as_ref(), warnings)?,
        Command::Euler { x } => {
            let e = strata::euler_char(x)?;
            Report::new(json!({ "euler": big(&e) }), &["x", "euler"], vec![vec![join(x.entries()), e.to_string()]])
        }
        Command::Class { x } => {
            let c = class(x, cache.as_ref(), warnings)?;
            class_report(&c, json!({ "class": class_json(&c) }))
        }
        Command::Chamber { x } => chamber(x)?,
        Command::Wallcross { x, y } => {
            let walls = chambers::walls_between(x, y)?;
            let d = chambers::wallcross(x, y)?;
            let wall_lists: Vec<Vec<usize>> = walls.iter().map(|w| w.indices()).collect();
            class_report(&d, json!({ "walls": wall_lists, "difference": class_json(&d) }))
        }
        Command::Verify { suite, max_n } => {
            let checks = verify::run_suites(*suite, *max_n)?;
            let code = if checks.iter().all(|c| c.passed) { exit::OK } else { exit::VERIFICATION_FAILED };
            return Ok((verify::report(&checks), code));
        }
        Command::Ratio { max_n } => ratio(*max_n)?,
    };
    Ok((report, exit::OK))
}

fn join(v: &[i64]) -> String {
    v.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn table(max_n: usize, order: usize, cache: Option<&Cache>, warnings: &mut Vec<String>) -> Result<Report, CliError> {
    let cached = match cache {
        Some(c) => c.load_table(max_n, order, warnings)?,
        None => None,
    };
    let t: EulerTable = match cached {
        Some(t) => t,
        None => {
            let t = recursion::chi_table(max_n, order)?;
            if let Some(c) = cache {
                c.store_table(&t, order)?;
            }
            t
        }
    };
    let mbar0 = recursion::chi_mbar0_series(max_n)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for n in 2..=max_n {
        let total = t.total(n).expect("row exists");
        let m0 = &mbar0[n - 2];
        json_rows.push(json!({
            "n": n,
            "chi_mbar": big(&total),
            "chi_mbar0": big(m0),
            "by_k": t.rows()[n - 2].iter().map(big).collect::<Vec<_>>(),
        }));
        rows.push(vec![n.to_string(), total.to_string(), m0.to_string()]);
    }
    Ok(Report::new(json!({ "rows": json_rows }), &["n", "chi_mbar", "chi_mbar0"], rows))
}

/// Serves a class from the cache when its stored representative is verified
/// to share the query's chamber; otherwise computes and stores it.
fn class(x: &RamificationDatum, cache: Option<&Cache>, warnings: &mut Vec<String>) -> Result<GClass, CliError> {
    if let Some(c) = cache {
        if let Some(hit) = c.load_class(x, warnings)? {
            return Ok(hit);
        }
    }
    let computed = strata::total_class(x)?;
    if let Some(c) = cache {
        c.store_class(x, &computed, warnings)?;
    }
    Ok(computed)
}

fn class_report(c: &GClass, result: Value) -> Report {
    let rows = c.coeffs().iter().enumerate().map(|(d, a)| vec![d.to_string(), a.to_string()]).collect();
    Report::new(result, &["degree", "coefficient"], rows)
}

fn chamber(x: &RamificationDatum) -> Result<Report, CliError> {
    let sig = chambers::signature(x)?;
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut rows = Vec::new();
    for (subset, pos) in sig.entries() {
        rows.push(vec![join(&subset.iter().map(|&i| i as i64).collect::<Vec<_>>()), if pos { "+" } else { "-" }.to_string()]);
        if pos {
            positive.push(subset);
        } else {
            negative.push(subset);
        }
    }
    let result = json!({
        "validation": { "valid": true, "n": x.n(), "nonzero_entries": true, "sum_zero": true, "vanishing_subsets": 0 },
        "signature": {
            "walls": sig.len(),
            "signs": sig.to_sign_string(),
            "positive": positive,
            "negative": negative,
        },
    });
    Ok(Report::new(result, &["subset", "sign"], rows))
}

fn ratio(max_n: usize) -> Result<Report, CliError> {
    use num_traits::ToPrimitive;
    let values = chambers::ratio_trend(max_n)?;
    let mut rows = Vec::new();
    let mut json_rows = Vec::new();
    for (i, q) in values.iter().enumerate() {
        let n = i + 2;
        let approx = q.to_f64().unwrap_or(f64::NAN);
        json_rows.push(json!({
            "n": n,
            "numerator": big(q.numer()),
            "denominator": big(q.denom()),
            "approx": approx,
        }));
        rows.push(vec![n.to_string(), q.numer().to_string(), q.denom().to_string(), format!("{approx:e}")]);
    }
    let result = json!({
        "ratios": json_rows,
        "strictly_decreasing": chambers::strictly_decreasing(&values),
        "strictly_decreasing_from_3": values.len() < 2 || chambers::strictly_decreasing(&values[1..]),
    });
    Ok(Report::new(result, &["n", "numerator", "denominator", "approx"], rows))
}
