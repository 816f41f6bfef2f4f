//! `gmt`: evaluate, enumerate and verify from the command line.
//!
//! stdout carries data only (values, JSON Lines, reports); diagnostics go to stderr.
//! Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmt_core::identities::{ConjectureSpec, Grid, IdentityId, Sampling};
use gmt_core::report::{render_table, VerificationReport};
use gmt_core::{
    alpha, enumerate_dmt, enumerate_gmt, enumerate_mt, enumerate_tn, run_conjecture_suite, s_statistic, sc_statistic,
    EnumerationLimits, Error, EvalCache, Method, Row, SignedCount, Window,
};

#[derive(Parser)]
#[command(
    name = "gmt",
    version,
    about = "Exact evaluation of the Monotone Triangle polynomial alpha(n; k)"
)]
struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate alpha(n; k_1, ..., k_n).
    Alpha(AlphaArgs),
    /// Stream the triangles of a class as JSON Lines.
    Enumerate(EnumerateArgs),
    /// Check identities and conjectures over parameter grids.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct LimitArgs {
    /// Stop with exit code 3 after this many triangles.
    #[arg(long)]
    max_triangles: Option<u64>,
    /// Stop with exit code 3 after generating this many candidate rows.
    #[arg(long)]
    max_rows: Option<u64>,
}

impl LimitArgs {
    fn limits(&self) -> Result<EnumerationLimits, Error> {
        let d = EnumerationLimits::default();
        EnumerationLimits::new(
            self.max_rows.unwrap_or(d.max_rows_generated),
            self.max_triangles.unwrap_or(d.max_triangles),
        )
    }
}

#[derive(Args)]
struct AlphaArgs {
    /// Comma-separated integers, e.g. 4,2,1,3 or -1,0,2.
    #[arg(long, allow_hyphen_values = true)]
    row: Row,
    #[arg(long, default_value = "operator")]
    method: Method,
    /// Print one value per applicable method; exit 1 if they disagree.
    #[arg(long, conflicts_with = "method")]
    all_methods: bool,
    /// Persistent memo table for the selected method, loaded before and saved after.
    #[arg(long, conflicts_with = "all_methods")]
    cache_file: Option<PathBuf>,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Class {
    Mt,
    Dmt,
    Gmt,
    Tn,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(value_enum)]
    class: Class,
    #[arg(long, allow_hyphen_values = true)]
    row: Row,
    /// Print only the number of objects.
    #[arg(long, conflicts_with = "signed")]
    count: bool,
    /// Print only the signed total.
    #[arg(long)]
    signed: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct VerifyArgs {
    /// Identity id, or `all`.
    target: String,
    /// Row length for grid checks; largest parameter for families.
    #[arg(long)]
    n: Option<usize>,
    /// Smallest parameter for families.
    #[arg(long)]
    n_min: Option<usize>,
    /// k for ratio-raw.
    #[arg(long)]
    k: Option<usize>,
    /// Entry window, e.g. -4..4 (inclusive).
    #[arg(long, allow_hyphen_values = true, default_value = "-2..2")]
    window: Window,
    #[arg(long, conflicts_with = "samples")]
    exhaustive: bool,
    /// Number of seeded random rows (default: exhaustive).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random test functions per row for lemma1 and operator-alt.
    #[arg(long, default_value_t = 10)]
    functions: usize,
    #[arg(long, default_value = "operator")]
    method: Method,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Per-identity budget for families without --n.
    #[arg(long, default_value_t = 60)]
    time_budget_secs: u64,
    /// Include wall times in the report (makes output run-dependent).
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    limits: LimitArgs,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Usage(_) | Error::Parse(_) => 2,
        Error::Budget(_) => 3,
        Error::Internal(_) | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be positive");
            return ExitCode::from(2);
        }
        pool = pool.num_threads(j);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Alpha(a) => cmd_alpha(a),
        Command::Enumerate(a) => cmd_enumerate(a),
        Command::Verify(a) => cmd_verify(a),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn cmd_alpha(a: &AlphaArgs) -> Result<u8, Error> {
    let cache = EvalCache::new().with_mt_limits(a.limits.limits()?);
    let k = a.row.entries();
    let mut out = io::stdout().lock();
    if a.all_methods {
        let values = Method::applicable(k)
            .into_iter()
            .map(|m| alpha(k, m, &cache))
            .collect::<Result<Vec<_>, _>>()?;
        for v in &values {
            writeln!(out, "{v}")?;
        }
        if values.windows(2).any(|w| w[0] != w[1]) {
            eprintln!("methods disagree");
            return Ok(1);
        }
        return Ok(0);
    }
    if let Some(path) = &a.cache_file {
        if path.exists() {
            let loaded = cache.load(a.method, BufReader::new(File::open(path)?))?;
            eprintln!("loaded {loaded} cached values");
        }
    }
    let v = alpha(k, a.method, &cache)?;
    writeln!(out, "{v}")?;
    if let Some(path) = &a.cache_file {
        cache.save(a.method, BufWriter::new(File::create(path)?))?;
    }
    Ok(0)
}

fn cmd_enumerate(a: &EnumerateArgs) -> Result<u8, Error> {
    let limits = a.limits.limits()?;
    // Each item: JSON text and the sign exponent.
    let stream: Box<dyn Iterator<Item = Result<(String, usize), Error>>> = match a.class {
        Class::Mt => Box::new(enumerate_mt(&a.row, limits)?.map(|t| t.map(|t| (t.to_json(), 0)))),
        Class::Dmt => Box::new(enumerate_dmt(&a.row, limits)?.map(|t| t.map(|t| (t.to_json(), 0)))),
        Class::Gmt => Box::new(enumerate_gmt(&a.row, limits).map(|t| t.map(|t| (t.to_json(), sc_statistic(&t).sc)))),
        Class::Tn => Box::new(enumerate_tn(&a.row, limits).map(|o| o.map(|o| (o.to_json(), s_statistic(&o))))),
    };
    let mut out = BufWriter::new(io::stdout().lock());
    let (mut count, mut signed) = (0u64, SignedCount::from(0));
    for item in stream {
        let (json, exponent) = item?;
        count += 1;
        signed += if exponent % 2 == 0 { 1 } else { -1 };
        if !a.count && !a.signed {
            writeln!(out, "{json}")?;
        }
    }
    if a.count {
        writeln!(out, "{count}")?;
    } else if a.signed {
        writeln!(out, "{signed}")?;
    }
    out.flush()?;
    Ok(0)
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8, Error> {
    let ids: Vec<IdentityId> = if a.target == "all" {
        IdentityId::ALL
            .into_iter()
            .filter(|&id| id != IdentityId::RatioRaw || a.k.is_some())
            .collect()
    } else {
        vec![a.target.parse()?]
    };
    let limits = a.limits.limits()?;
    let cache = EvalCache::new().with_mt_limits(limits);
    let sampling = match a.samples {
        Some(samples) => Sampling::Sampled { samples, seed: a.seed },
        None => Sampling::Exhaustive,
    };
    let mut reports: Vec<VerificationReport> = Vec::new();
    for id in ids {
        let mut spec = ConjectureSpec::new(id).with_method(a.method);
        spec.limits = limits;
        spec.functions_per_row = a.functions;
        spec.ratio_k = a.k;
        spec.time_budget = Duration::from_secs(a.time_budget_secs);
        if id.is_grid() {
            if let Some(n) = a.n {
                spec.grid = Some(Grid {
                    n,
                    window: a.window,
                    sampling,
                });
            } else if a.target != "all" || a.samples.is_some() {
                spec.grid = Some(Grid {
                    n: 3,
                    window: a.window,
                    sampling,
                });
            }
        } else {
            spec.n_min = a.n_min;
            spec.n_max = a.n;
        }
        let mut report = run_conjecture_suite(&spec, &cache)?;
        if a.timing {
            report.expose_timing();
        }
        eprintln!("{}: {}", report.identity, report.outcome);
        reports.push(report);
    }
    let failed = reports.iter().any(|r| !r.passed());
    let mut out = io::stdout().lock();
    match a.format {
        Format::Table => write!(out, "{}", render_table(&reports))?,
        Format::Json => {
            let json = if reports.len() == 1 {
                serde_json::to_string_pretty(&reports[0])
            } else {
                serde_json::to_string_pretty(&reports)
            }
            .map_err(|e| Error::Internal(e.to_string()))?;
            writeln!(out, "{json}")?;
        }
    }
    Ok(u8::from(failed))
}
