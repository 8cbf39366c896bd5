//! The `univoque` command line.
//!
//! Exit codes: 0 success, 2 parse or domain error, 3 result beyond the
//! level cap (`NearKL`), 4 input on a decision boundary.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rayon::prelude::*;
use serde::Serialize;

use crate::bases::{
    compute_z1k, compute_zn, kl_interval, level_interval, quasi_greedy_alpha, Base, BasesError, ExactReal, MAX_LEVEL,
};
use crate::oracle::{expansion_branches, greedy_expansion, quasi_greedy_expansion, OracleError};
use crate::precise::{
    bits_for_tolerance, format_enclosure, format_exact, parse_exact, scoped, Dyadic, PreciseReal,
    Round, MAX_PRECISION, MIN_PRECISION,
};
use crate::solver::{qs, Classification, GapIntervals, QsResult, SolverError, SolverOptions, Strategy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NEAR_KL: i32 = 3;
pub const EXIT_BOUNDARY: i32 = 4;

/// Decimals used for the exact `x` values of figure samples.
pub const FIGURE_DECIMALS: usize = 12;

#[derive(Debug, Parser)]
#[command(name = "univoque", version, about = "Smallest bases with a unique binary expansion")]
pub struct Cli {
    /// Width target for computed roots.
    #[arg(long, global = true, env = "UNIVOQUE_TOL", default_value = "1e-12")]
    pub tol: String,
    /// Largest working precision in bits.
    #[arg(long, global = true, env = "UNIVOQUE_PRECISION_CAP", default_value_t = MAX_PRECISION)]
    pub precision_cap: u32,
    /// Highest level scanned before reporting NearKL.
    #[arg(long, global = true, env = "UNIVOQUE_MAX_LEVEL", default_value_t = MAX_LEVEL)]
    pub max_level: usize,
    /// Machine-readable output.
    #[arg(long, global = true, env = "UNIVOQUE_JSON")]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Smallest univoque base of x.
    Qs {
        x: String,
        /// Skip the closed forms and run the level scan.
        #[arg(long)]
        general: bool,
    },
    /// Table of ladder constants, thresholds and gap endpoints.
    Constants {
        #[arg(long, default_value_t = 6)]
        levels: usize,
    },
    /// CSV samples of q_s over a range of x.
    Figure {
        #[arg(long, default_value = "1.0507")]
        from: String,
        #[arg(long, default_value = "2")]
        to: String,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counts the expansions of x in base q.
    Check {
        x: String,
        q: String,
        #[arg(long, default_value_t = crate::oracle::DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Prints a prefix of an expansion of x in base q.
    Expand {
        x: String,
        q: String,
        #[arg(long, default_value_t = 32)]
        digits: usize,
        #[arg(long, value_enum, default_value_t = Algorithm::Greedy)]
        algorithm: Algorithm,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    Greedy,
    QuasiGreedy,
}

/// A failed command: exit code and message.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        let code = if e.is_boundary() { EXIT_BOUNDARY } else { EXIT_INPUT };
        CliError { code, message: e.to_string() }
    }
}

impl From<BasesError> for CliError {
    fn from(e: BasesError) -> Self {
        SolverError::Bases(e).into()
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::Boundary { .. } => CliError { code: EXIT_BOUNDARY, message: e.to_string() },
            OracleError::Bases(b) => b.into(),
            OracleError::Domain(m) => CliError::input(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(e.to_string())
    }
}

/// Runs the binary with the process arguments.
pub fn main_from_env() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    let options = options(cli)?;
    match &cli.command {
        Command::Qs { x, general } => {
            let options = if *general { SolverOptions { strategy: Strategy::General, ..options } } else { options };
            cmd_qs(x, &options, cli.json, out)
        }
        Command::Constants { levels } => cmd_constants(*levels, &options, cli.json, out),
        Command::Figure { from, to, samples, out: path } => {
            let rows = figure_rows(from, to, *samples, &options)?;
            match path {
                Some(path) => {
                    let file = File::create(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
                    write_csv(&rows, file)?;
                    if cli.json {
                        serde_json::to_writer(&mut *out, &serde_json::json!({ "rows": rows.len(), "out": path }))?;
                        writeln!(out)?;
                    }
                }
                None => write_csv(&rows, &mut *out)?,
            }
            Ok(EXIT_OK)
        }
        Command::Check { x, q, depth } => cmd_check(x, q, *depth, cli.json, out),
        Command::Expand { x, q, digits, algorithm } => cmd_expand(x, q, *digits, *algorithm, cli.json, out),
    }
}

fn options(cli: &Cli) -> Result<SolverOptions, CliError> {
    let tol = parse_exact(&cli.tol).map_err(|e| CliError::input(format!("--tol: {e}")))?;
    if !tol.is_positive() || tol >= BigRational::one() {
        return Err(CliError::input("--tol must lie in (0, 1)"));
    }
    if !(MIN_PRECISION..=MAX_PRECISION).contains(&cli.precision_cap) {
        return Err(CliError::input(format!("--precision-cap must lie in {MIN_PRECISION}..={MAX_PRECISION}")));
    }
    if cli.max_level == 0 || cli.max_level > MAX_LEVEL {
        return Err(CliError::input(format!("--max-level must lie in 1..={MAX_LEVEL}")));
    }
    Ok(SolverOptions { tol, precision_cap: cli.precision_cap, max_level: cli.max_level, ..SolverOptions::default() })
}

fn parse_x(text: &str) -> Result<ExactReal, CliError> {
    ExactReal::parse(text).map_err(|e| CliError::input(format!("{text:?}: {e}")))
}

fn parse_q(text: &str) -> Result<Base, CliError> {
    let q = parse_exact(text).map_err(|e| CliError::input(format!("{text:?}: {e}")))?;
    let base = Base::Rational(q);
    base.check_range().map_err(|_| CliError::input(format!("base {text} must lie in (1, 2)")))?;
    Ok(base)
}

/// Machine-readable `qs` result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QsReport {
    pub x: String,
    pub classification: String,
    pub path: String,
    pub level: Option<usize>,
    pub gamma: Option<String>,
    pub q_s: Option<String>,
    pub q_s_lo: Option<String>,
    pub q_s_hi: Option<String>,
    pub gap: Option<usize>,
    pub gap_interval: Option<[String; 2]>,
    pub exceptional: Option<usize>,
    pub partition: Option<usize>,
}

impl QsReport {
    pub fn from_result(r: &QsResult) -> Self {
        let gap_interval = r.gap.map(|k| {
            let gaps = GapIntervals::new();
            let (left, right) = gaps.endpoints(k);
            [render_value(left, 10), render_value(right, 10)]
        });
        QsReport {
            x: r.x.to_string(),
            classification: r.classification.to_string(),
            path: r.path.to_string(),
            level: r.level,
            gamma: r.gamma.as_ref().map(|g| g.to_string()),
            q_s: r.qs.as_ref().map(|q| format_enclosure(&q.enclosure())),
            q_s_lo: r.qs.as_ref().map(|q| directed(&q.lo.to_rational(), MAX_DIGITS, Round::Floor)),
            q_s_hi: r.qs.as_ref().map(|q| directed(&q.hi.to_rational(), MAX_DIGITS, Round::Ceil)),
            gap: r.gap,
            gap_interval,
            exceptional: r.exceptional,
            partition: r.partition,
        }
    }
}

const MAX_DIGITS: usize = 20;

/// Decimal rounded toward `-∞` or `+∞`.
fn directed(value: &BigRational, decimals: usize, round: Round) -> String {
    let scale = BigRational::from_integer(num_traits::pow(BigInt::from(10), decimals));
    let scaled = value * &scale;
    let n = match round {
        Round::Floor => scaled.floor(),
        Round::Ceil => scaled.ceil(),
    };
    format_exact(&(n / scale), decimals)
}

fn render_value(x: &ExactReal, decimals: usize) -> String {
    match x {
        ExactReal::Rational(_) => x.to_string(),
        _ => match scoped(128, || x.enclosure()) {
            Ok(p) => crate::precise::format_rational(&p.midpoint().to_rational(), decimals),
            Err(_) => x.to_string(),
        },
    }
}

fn cmd_qs(x: &str, options: &SolverOptions, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let x = parse_x(x)?;
    let result = qs(&x, options)?;
    let report = QsReport::from_result(&result);
    if json {
        serde_json::to_writer(&mut *out, &report)?;
        writeln!(out)?;
    } else {
        let mut line = |k: &str, v: &str| writeln!(out, "{k:<16}{v}");
        line("x", &report.x)?;
        line("classification", &report.classification)?;
        line("path", &report.path)?;
        if let Some(level) = report.level {
            line("level", &level.to_string())?;
        }
        if let Some(g) = &report.gamma {
            line("gamma", g)?;
        }
        if let Some(q) = &report.q_s {
            line("q_s", q)?;
            line("enclosure", &format!("[{}, {}]", report.q_s_lo.as_ref().unwrap(), report.q_s_hi.as_ref().unwrap()))?;
        }
        if let (Some(k), Some([l, r])) = (report.gap, &report.gap_interval) {
            line("gap", &format!("{k} [{l}, {r})"))?;
        }
        if let Some(i) = report.exceptional {
            line("exceptional", &i.to_string())?;
        }
        if let Some(k) = report.partition {
            line("partition", &k.to_string())?;
        }
    }
    Ok(if result.classification == Classification::NearKL { EXIT_NEAR_KL } else { EXIT_OK })
}

/// One row of the constants table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: String,
    pub width: String,
}

impl ConstantRow {
    fn new(name: impl Into<String>, p: &PreciseReal) -> Self {
        ConstantRow { name: name.into(), value: format_enclosure(p), width: format!("{:.1e}", p.width().to_f64()) }
    }
}

/// Ladder constants at a precision matching `options.tol`.
pub fn constants_table(levels: usize, options: &SolverOptions) -> Result<Vec<ConstantRow>, BasesError> {
    if levels == 0 || levels > MAX_LEVEL {
        return Err(BasesError::LevelOutOfRange { level: levels, max: MAX_LEVEL });
    }
    let tol = Dyadic::from_rational(&options.tol, 64, Round::Floor);
    let bits = (bits_for_tolerance(&tol) + 40).clamp(MIN_PRECISION, options.precision_cap.max(MIN_PRECISION));
    scoped(bits, || {
        let mut rows = Vec::new();
        for n in 1..=levels {
            rows.push(ConstantRow::new(format!("q_{n}"), &level_interval(n, bits)?.enclosure()));
        }
        rows.push(ConstantRow::new("q_KL", &kl_interval(bits)?.enclosure()));
        for n in 1..=levels {
            rows.push(ConstantRow::new(format!("z_{n}"), &compute_zn(n)?));
        }
        for k in 1..=levels {
            rows.push(ConstantRow::new(format!("z_1,{k}"), &compute_z1k(k)?));
        }
        let gaps = GapIntervals::new();
        for k in 1..=3 {
            let (left, right) = gaps.endpoints(k);
            rows.push(ConstantRow::new(format!("gap-{k} left"), &left.enclosure()?));
            rows.push(ConstantRow::new(format!("gap-{k} right"), &right.enclosure()?));
        }
        Ok(rows)
    })
}

fn cmd_constants(levels: usize, options: &SolverOptions, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    if levels == 0 || levels > MAX_LEVEL {
        return Err(CliError::input(format!("--levels must lie in 1..={MAX_LEVEL}")));
    }
    let rows = constants_table(levels, options)?;
    if json {
        serde_json::to_writer(&mut *out, &rows)?;
        writeln!(out)?;
    } else {
        let value_width = rows.iter().map(|r| r.value.len()).max().unwrap_or(0);
        writeln!(out, "{:<14}{:<value_width$}  width", "name", "value")?;
        for r in &rows {
            writeln!(out, "{:<14}{:<value_width$}  {}", r.name, r.value, r.width)?;
        }
    }
    Ok(EXIT_OK)
}

/// One CSV row of the figure data.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct FigureSample {
    pub x: String,
    pub q_s: String,
    pub level: Option<usize>,
    pub gamma: String,
    pub class: String,
}

/// Uniformly spaced samples, rounded to [`FIGURE_DECIMALS`] decimals.
pub fn figure_points(from: &BigRational, to: &BigRational, samples: usize) -> Vec<BigRational> {
    let steps = BigRational::from_integer(BigInt::from(samples - 1));
    (0..samples)
        .map(|i| {
            let t = from + (to - from) * BigRational::from_integer(BigInt::from(i)) / &steps;
            parse_exact(&crate::precise::format_rational(&t, FIGURE_DECIMALS)).expect("rendered decimal")
        })
        .collect()
}

/// Evaluates `q_s` on the sample points; rows come back in `x` order.
pub fn figure_rows(from: &str, to: &str, samples: usize, options: &SolverOptions) -> Result<Vec<FigureSample>, CliError> {
    let from_v = parse_exact(from).map_err(|e| CliError::input(format!("--from: {e}")))?;
    let to_v = parse_exact(to).map_err(|e| CliError::input(format!("--to: {e}")))?;
    if from_v >= to_v {
        return Err(CliError::input("--from must be smaller than --to"));
    }
    if !from_v.is_positive() {
        return Err(CliError::input("--from must be positive"));
    }
    if samples < 2 {
        return Err(CliError::input("--samples must be at least 2"));
    }
    let points = figure_points(&from_v, &to_v, samples);
    points.par_iter().map(|x| figure_sample(x, options)).collect()
}

fn figure_sample(x: &BigRational, options: &SolverOptions) -> Result<FigureSample, CliError> {
    let xs = format_exact(x, FIGURE_DECIMALS);
    match qs(&ExactReal::Rational(x.clone()), options) {
        Ok(r) => Ok(FigureSample {
            x: xs,
            q_s: r.qs.as_ref().map(|q| format_enclosure(&q.enclosure())).unwrap_or_default(),
            level: r.level,
            gamma: r.gamma.as_ref().map(|g| g.to_string()).unwrap_or_default(),
            class: r.classification.to_string(),
        }),
        Err(e) if e.is_boundary() => {
            Ok(FigureSample { x: xs, q_s: String::new(), level: None, gamma: String::new(), class: "boundary".into() })
        }
        Err(e) => Err(e.into()),
    }
}

/// Writes the rows with header `x,q_s,level,gamma,class`.
pub fn write_csv<W: Write>(rows: &[FigureSample], sink: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()
}

fn cmd_check(x: &str, q: &str, depth: usize, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let (xv, base) = (parse_x(x)?, parse_q(q)?);
    let verdict = expansion_branches(&xv, &base, depth)?;
    if json {
        let record = serde_json::json!({ "x": xv.to_string(), "q": q, "depth": depth, "verdict": verdict.to_string() });
        serde_json::to_writer(&mut *out, &record)?;
        writeln!(out)?;
    } else {
        writeln!(out, "{verdict}")?;
    }
    Ok(EXIT_OK)
}

fn cmd_expand(x: &str, q: &str, digits: usize, algorithm: Algorithm, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let (xv, base) = (parse_x(x)?, parse_q(q)?);
    if digits == 0 || digits > crate::oracle::MAX_DEPTH {
        return Err(CliError::input(format!("--digits must lie in 1..={}", crate::oracle::MAX_DEPTH)));
    }
    let word = match algorithm {
        Algorithm::Greedy => greedy_expansion(&xv, &base, digits)?,
        Algorithm::QuasiGreedy if xv.as_rational().is_some_and(|r| r.is_one()) => quasi_greedy_alpha(&base, digits)?,
        Algorithm::QuasiGreedy => quasi_greedy_expansion(&xv, &base, digits)?,
    };
    if json {
        serde_json::to_writer(&mut *out, &serde_json::json!({ "x": xv.to_string(), "q": q, "digits": word.to_string() }))?;
        writeln!(out)?;
    } else {
        writeln!(out, "{word}")?;
    }
    Ok(EXIT_OK)
}
