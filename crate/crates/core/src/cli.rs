//! Command-line front end.
//!
//! Every subcommand writes exactly one CSV table or one JSON object. Reals
//! carry at most 15 significant digits, big integers are exact decimals, and
//! identical arguments give byte-identical output.

use std::ffi::OsString;
use std::io::{self, Write};
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::bigcount::{count_partitions, knapsack_cost};
use crate::diagnostics::{run_all, run_suite, DiagnosticsReport, Suite};
use crate::family::{sample, FamilyPoint, DEFAULT_EPS};
use crate::numeric::{fmt15, round_sig15};
use crate::saddle::{bd_saddle, closed_form, exact_saddle, hayman_estimate, hr_closed_form, qk_closed_form, DEFAULT_RTOL};
use crate::special::constants;
use crate::{Error, PartitionKind};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "POWERPART_THREADS";

/// Largest `n` accepted for `k = 1` by default.
pub const DEFAULT_BUDGET_N: usize = 1 << 16;

#[derive(Debug, Parser)]
#[command(name = "powerpart", version, about = "Partitions into k-th powers: exact counts, the Boltzmann family and asymptotics")]
pub struct RunConfig {
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Target {
    #[arg(long, value_enum, default_value_t = PartitionKind::Unrestricted)]
    pub kind: PartitionKind,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
    pub k: u32,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact coefficient table of P_k or Q_k.
    Count {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Maximum number of big-integer additions (default: the cost of n = 2^16, k = 1).
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Asymptotic constants for k.
    Constants {
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..=64))]
        k: u32,
        /// Highest m for omega_{k,m}.
        #[arg(long, default_value_t = 2)]
        m_max: u32,
    },
    /// Moments, characteristic function and samples at t = e^{-s}.
    Family {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_negative_numbers = true)]
        s: f64,
        /// Normalized characteristic function on `a:b:points` (or `linear:a:b:points`, or a comma list).
        #[arg(long, default_value = "0:3:7", allow_hyphen_values = true)]
        theta_grid: String,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
        /// Draw this many samples instead of evaluating the characteristic function.
        #[arg(long)]
        draws: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// One asymptotic estimate of log a_n.
    Asymptotic {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[arg(long, default_value_t = DEFAULT_RTOL)]
        rtol: f64,
    },
    /// Exact log-counts against estimates over an n grid.
    RatioTable {
        #[command(flatten)]
        target: Target,
        /// `geometric:a:b:points`, `linear:a:b:points` or a comma list.
        #[arg(long)]
        n_grid: String,
        #[arg(long, value_enum, default_value_t = TableMethod::Closed)]
        method: TableMethod,
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Numerical checks of the limit statements.
    Diagnose {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Flatten to `metric,s,value` rows.
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Hayman's formula at the closed-form saddle.
    Bd,
    /// Hayman's formula at the exact saddle.
    Exact,
    /// Closed form for p_k(n).
    Hr,
    /// Closed form for q_k(n).
    Qk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableMethod {
    /// Closed form (p_k or q_k, by kind).
    Closed,
    Bd,
    Exact,
    All,
}

#[derive(Debug)]
pub enum CliError {
    Compute(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Compute(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Compute(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o: {e}"),
        }
    }
}

/// Parsed `a:b:points` style grid.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    Geometric { a: f64, b: f64, points: usize },
    Linear { a: f64, b: f64, points: usize },
    List(Vec<f64>),
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self, Error> {
        let bad = |reason: &str| Error::invalid("grid", format!("{text:?}: {reason}"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("not a number"));
        let parts: Vec<&str> = text.split(':').collect();
        let range = |fields: &[&str]| -> Result<(f64, f64, usize), Error> {
            let [a, b, p] = fields else {
                return Err(bad("expected a:b:points"));
            };
            let points = p.trim().parse::<usize>().map_err(|_| bad("points must be an integer"))?;
            if points < 1 {
                return Err(bad("points must be >= 1"));
            }
            Ok((number(a)?, number(b)?, points))
        };
        let spec = match parts[0] {
            "geometric" => {
                let (a, b, points) = range(&parts[1..])?;
                if !(a > 0.0 && b > 0.0) {
                    return Err(bad("geometric bounds must be positive"));
                }
                GridSpec::Geometric { a, b, points }
            }
            "linear" => {
                let (a, b, points) = range(&parts[1..])?;
                GridSpec::Linear { a, b, points }
            }
            _ if parts.len() == 3 => {
                let (a, b, points) = range(&parts)?;
                GridSpec::Linear { a, b, points }
            }
            _ if parts.len() == 1 => GridSpec::List(text.split(',').map(number).collect::<Result<_, _>>()?),
            _ => return Err(bad("unknown grid form")),
        };
        let values = spec.values();
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(bad("grid is empty or not finite"));
        }
        if values.len() > 1 && !(values.windows(2).all(|w| w[1] > w[0]) || values.windows(2).all(|w| w[1] < w[0])) {
            return Err(bad("grid must be strictly monotone"));
        }
        Ok(spec)
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let spread = |points: usize, f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if points == 1 {
                return vec![f(0.0)];
            }
            (0..points).map(|i| f(i as f64 / (points - 1) as f64)).collect()
        };
        match self {
            GridSpec::Geometric { a, b, points } => spread(*points, &|u| a * (b / a).powf(u)),
            GridSpec::Linear { a, b, points } => spread(*points, &|u| a + (b - a) * u),
            GridSpec::List(v) => v.clone(),
        }
    }

    /// Values rounded to integers; they must stay positive and strictly increasing.
    pub fn integer_values(&self) -> Result<Vec<u64>, Error> {
        let values: Vec<u64> = self.values().iter().map(|v| v.round() as u64).collect();
        if values.first().is_some_and(|&v| v == 0) || !values.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::invalid(
                "n_grid",
                "must round to positive, strictly increasing integers",
            ));
        }
        Ok(values)
    }
}

/// Largest `n` whose knapsack cost fits in `budget`.
pub fn largest_feasible_n(k: u32, budget: u128) -> usize {
    let (mut lo, mut hi) = (0usize, 1usize);
    while knapsack_cost(k, hi) <= budget && hi < usize::MAX / 2 {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if knapsack_cost(k, mid) <= budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn check_budget(k: u32, n_max: usize, budget: Option<u128>) -> Result<(), Error> {
    let budget = budget.unwrap_or_else(|| knapsack_cost(1, DEFAULT_BUDGET_N));
    if knapsack_cost(k, n_max) > budget {
        return Err(Error::Budget {
            reason: format!(
                "n = {n_max} needs {} additions, budget is {budget}; largest feasible n for k = {k} is {}",
                knapsack_cost(k, n_max),
                largest_feasible_n(k, budget)
            ),
        });
    }
    Ok(())
}

/// Rounds every float in a JSON tree to 15 significant digits.
pub fn round_json(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            serde_json::Number::from_f64(round_sig15(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn write_json(out: &mut dyn Write, value: Value) -> io::Result<()> {
    let text = serde_json::to_string_pretty(&round_json(value)).map_err(io::Error::other)?;
    writeln!(out, "{text}")
}

fn report_json(report: &DiagnosticsReport) -> Result<Value, CliError> {
    serde_json::to_value(report).map_err(|e| CliError::Io(io::Error::other(e)))
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(fmt15).unwrap_or_default()
}

/// Runs one parsed command, writing to `out`.
pub fn execute(command: &Command, out: &mut dyn Write) -> Result<(), CliError> {
    match command {
        Command::Count {
            target,
            n_max,
            format,
            budget,
        } => {
            check_budget(target.k, *n_max, *budget)?;
            let table = count_partitions(target.kind, target.k, *n_max)?;
            match format {
                Format::Csv => table.write_csv(&mut *out)?,
                Format::Json => write_json(out, table.to_json())?,
            }
        }
        Command::Constants { k, m_max } => {
            let c = constants(*k, (*m_max).max(2))?;
            write_json(out, c.to_json())?;
        }
        Command::Family {
            target,
            s,
            theta_grid,
            eps,
            draws,
            seed,
            format,
        } => {
            let point = FamilyPoint::new(target.kind, target.k, *s, *eps)?;
            if let Some(count) = draws {
                let values = sample(&point, *count, *seed)?;
                match format {
                    Format::Csv => {
                        writeln!(out, "index,value")?;
                        for (i, v) in values.iter().enumerate() {
                            writeln!(out, "{i},{v}")?;
                        }
                    }
                    Format::Json => write_json(
                        out,
                        json!({
                            "kind": target.kind, "k": target.k, "s": s, "seed": seed,
                            "mean": point.mean(), "variance": point.variance(), "samples": values,
                        }),
                    )?,
                }
                return Ok(());
            }
            let thetas = theta_grid.parse::<GridSpec>()?.values();
            let phis: Vec<Complex64> = thetas.iter().map(|&th| point.char_fn(th)).collect::<Result<_, _>>()?;
            match format {
                Format::Csv => {
                    writeln!(out, "s,mean,variance,theta,re,im")?;
                    for (th, c) in thetas.iter().zip(&phis) {
                        writeln!(
                            out,
                            "{},{},{},{},{},{}",
                            fmt15(*s),
                            fmt15(point.mean()),
                            fmt15(point.variance()),
                            fmt15(*th),
                            fmt15(c.re),
                            fmt15(c.im)
                        )?;
                    }
                }
                Format::Json => {
                    let rows: Vec<Value> = thetas
                        .iter()
                        .zip(&phis)
                        .map(|(th, c)| json!({"theta": th, "re": c.re, "im": c.im}))
                        .collect();
                    write_json(
                        out,
                        json!({
                            "kind": target.kind, "k": target.k, "s": s, "t": point.t(),
                            "mean": point.mean(), "variance": point.variance(),
                            "log_normalizer": point.log_normalizer(), "char_fn": rows,
                        }),
                    )?;
                }
            }
        }
        Command::Asymptotic { target, n, method, rtol } => {
            let (kind, k) = (target.kind, target.k);
            let mismatch = |want: PartitionKind| {
                Error::invalid("method", format!("this closed form applies to kind {want} only"))
            };
            let (estimate, saddle) = match method {
                Method::Bd => {
                    let sp = bd_saddle(kind, k, *n)?;
                    (hayman_estimate(&sp)?, Some(sp))
                }
                Method::Exact => {
                    let sp = exact_saddle(kind, k, *n, *rtol)?;
                    (hayman_estimate(&sp)?, Some(sp))
                }
                Method::Hr if kind == PartitionKind::Unrestricted => (hr_closed_form(k, *n)?, None),
                Method::Qk if kind == PartitionKind::Distinct => (qk_closed_form(k, *n)?, None),
                Method::Hr => return Err(mismatch(PartitionKind::Unrestricted).into()),
                Method::Qk => return Err(mismatch(PartitionKind::Distinct).into()),
            };
            write_json(
                out,
                json!({
                    "kind": kind, "k": k, "n": n,
                    "formula": estimate.formula,
                    "log_value": estimate.log_value,
                    "s": saddle.map(|sp| sp.s),
                    "residual": saddle.map(|sp| sp.residual),
                    "heuristic": estimate.heuristic,
                }),
            )?;
        }
        Command::RatioTable {
            target,
            n_grid,
            method,
            budget,
        } => ratio_table(target.kind, target.k, n_grid, *method, *budget, out)?,
        Command::Diagnose {
            target,
            suite,
            seed,
            csv,
        } => {
            let reports = match suite {
                Suite::All => run_all(target.kind, target.k, *seed)?,
                one => vec![run_suite(target.kind, target.k, *one, *seed)?],
            };
            if *csv {
                writeln!(out, "suite,metric,s,value")?;
                for r in &reports {
                    for (name, s, v) in r.csv_rows() {
                        writeln!(out, "{},{name},{},{}", r.suite.name(), csv_opt(s), fmt15(v))?;
                    }
                }
            } else if *suite == Suite::All {
                let items: Vec<Value> = reports.iter().map(report_json).collect::<Result<_, _>>()?;
                write_json(out, json!({"suite": "all", "kind": target.kind, "k": target.k, "reports": items}))?;
            } else {
                write_json(out, report_json(&reports[0])?)?;
            }
        }
    }
    Ok(())
}

/// CSV comparing `ln a_n` with estimates. A single method gives
/// `n,exact_log,estimate_log,ratio`; `all` gives one log and one ratio column per estimator.
pub fn ratio_table(
    kind: PartitionKind,
    k: u32,
    n_grid: &str,
    method: TableMethod,
    budget: Option<u128>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let ns = n_grid.parse::<GridSpec>()?.integer_values()?;
    let n_max = *ns.last().expect("grid is nonempty") as usize;
    check_budget(k, n_max, budget)?;
    let table = count_partitions(kind, k, n_max)?;
    let estimators: Vec<TableMethod> = match method {
        TableMethod::All => vec![TableMethod::Exact, TableMethod::Bd, TableMethod::Closed],
        one => vec![one],
    };
    let estimate = |m: TableMethod, n: u64| -> Result<f64, Error> {
        Ok(match m {
            TableMethod::Exact => hayman_estimate(&exact_saddle(kind, k, n, DEFAULT_RTOL)?)?.log_value,
            TableMethod::Bd => hayman_estimate(&bd_saddle(kind, k, n)?)?.log_value,
            TableMethod::Closed | TableMethod::All => closed_form(kind, k, n)?.log_value,
        })
    };
    if estimators.len() == 1 {
        writeln!(out, "n,exact_log,estimate_log,ratio")?;
    } else {
        writeln!(
            out,
            "n,exact_log,hayman_exact_log,hayman_bd_log,closed_form_log,ratio_hayman_exact,ratio_hayman_bd,ratio_closed_form"
        )?;
    }
    for n in ns {
        let exact = table
            .ln_coeff(n as usize)
            .ok_or_else(|| Error::invalid("n_grid", format!("a_{n} is zero, no log ratio")))?;
        let logs: Vec<f64> = estimators.iter().map(|&m| estimate(m, n)).collect::<Result<_, _>>()?;
        let mut row = vec![n.to_string(), fmt15(exact)];
        row.extend(logs.iter().map(|l| fmt15(*l)));
        row.extend(logs.iter().map(|l| fmt15((l - exact).exp())));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?;
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code:
/// 0 on success, 2 on a usage error, 1 on a computation or i/o error.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Err(msg) = configure_threads() {
        eprintln!("error: {msg}");
        return 2;
    }
    let mut buffer = Vec::new();
    if let Err(e) = execute(&config.command, &mut buffer) {
        eprintln!("error: {e}");
        return 1;
    }
    let written = match &config.output {
        Some(path) => std::fs::write(path, &buffer),
        None => io::stdout().lock().write_all(&buffer),
    };
    match written {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: i/o: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<String, CliError> {
        let config = RunConfig::try_parse_from(std::iter::once("powerpart").chain(args.iter().copied())).unwrap();
        let mut buf = Vec::new();
        execute(&config.command, &mut buf)?;
        Ok(String::from_utf8(buf).unwrap())
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "geometric:128:8192:7".parse().unwrap();
        assert_eq!(g.integer_values().unwrap(), vec![128, 256, 512, 1024, 2048, 4096, 8192]);
        let g: GridSpec = "0:3:4".parse().unwrap();
        assert_eq!(g.values(), vec![0.0, 1.0, 2.0, 3.0]);
        let g: GridSpec = "1,5,9".parse().unwrap();
        assert_eq!(g.values(), vec![1.0, 5.0, 9.0]);
        for bad in ["geometric:0:10:3", "1:2", "a:b:c", "3,1,2", "1,1", "x", "geometric:1:2:0"] {
            assert!(bad.parse::<GridSpec>().is_err(), "{bad}");
        }
        // rounding collapses 1..2 onto repeated integers
        let g: GridSpec = "geometric:1:2:5".parse().unwrap();
        assert!(g.integer_values().is_err());
    }

    #[test]
    fn count_squares_csv() {
        let text = run(&["count", "--kind", "unrestricted", "--k", "2", "--n-max", "10"]).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 12);
        assert_eq!(lines[0], "n,coeff");
        assert_eq!(lines[5], "4,2");
    }

    #[test]
    fn constants_json() {
        let v: Value = serde_json::from_str(&run(&["constants", "--k", "1"]).unwrap()).unwrap();
        assert_eq!(v["beta"].as_f64().unwrap(), 2.56509966032373);
    }

    #[test]
    fn budget_refusal_suggests_smaller_n() {
        let err = run(&["count", "--k", "1", "--n-max", "100", "--budget", "1000"]).unwrap_err();
        let msg = err.to_string();
        let n = largest_feasible_n(1, 1000);
        assert!(knapsack_cost(1, n) <= 1000 && knapsack_cost(1, n + 1) > 1000);
        assert!(msg.contains(&format!("is {n}")), "{msg}");
    }

    #[test]
    fn asymptotic_method_kind_mismatch() {
        assert!(run(&["asymptotic", "--kind", "distinct", "--k", "1", "--n", "100", "--method", "hr"]).is_err());
        let v: Value =
            serde_json::from_str(&run(&["asymptotic", "--k", "1", "--n", "100", "--method", "hr"]).unwrap()).unwrap();
        assert!(v["s"].is_null());
    }

    #[test]
    fn ratio_table_columns() {
        let text = run(&["ratio-table", "--k", "1", "--n-grid", "10,20", "--method", "all"]).unwrap();
        let header = text.lines().next().unwrap();
        assert_eq!(header.split(',').count(), 8);
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 8));
    }

    #[test]
    fn round_json_limits_digits() {
        let v = round_json(json!({"x": [0.1 + 0.2, 1.0 / 3.0], "n": 5}));
        assert_eq!(v["x"][0].as_f64().unwrap(), 0.3);
        assert_eq!(v["x"][1].to_string(), "0.333333333333333");
        assert_eq!(v["n"], 5);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(main_with_args(["powerpart", "count", "--k", "0", "--n-max", "5"]), 2);
        assert_eq!(main_with_args(["powerpart", "count", "--bogus"]), 2);
        assert_eq!(main_with_args(["powerpart", "family", "--k", "1", "--s", "-1"]), 1);
    }
}
