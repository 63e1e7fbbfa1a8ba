//! Thin command-line front end; all logic lives in the library.

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use quatnorm::cli::{
    self, exit_code_for, DensityQuery, RunReport, ScanMode,
};
use quatnorm::Error;

#[derive(Parser)]
#[command(
    name = "quatnorm",
    version,
    about = "Reduced norms of integral quaternions over Q: outliers, enumeration, densities"
)]
struct Args {
    /// Emit the run report as JSON (deterministic bytes).
    #[arg(long, global = true)]
    json: bool,
    /// Emit CSV (scan and enumerate only).
    #[arg(long, global = true)]
    csv: bool,
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether m is the norm of an integer of the algebra.
    Check {
        #[arg(allow_negative_numbers = true)]
        m: i64,
        /// Algebra spec: p:<prime>, ram:<p1,p2,...>, or sym:<a>,<b>.
        #[arg(long)]
        algebra: String,
    },
    /// Enumerate the complete outlier set of a definite algebra.
    Enumerate {
        #[arg(long)]
        algebra: String,
        /// Additionally scan (M, k*M] as a consistency check.
        #[arg(long = "verify-band", value_name = "k")]
        verify_band: Option<u64>,
    },
    /// Exact (and optionally empirical) density of a prime condition.
    Density {
        /// Density of primes r for which m is an outlier for A_r.
        #[arg(long, conflicts_with = "expr")]
        m: Option<u64>,
        /// Condition grammar: sym(<d>)=<1|-1>, outlier(<m>), !, &, |, parens.
        #[arg(long)]
        expr: Option<String>,
        /// Also scan primes up to this bound (at least 100).
        #[arg(long, value_name = "N")]
        empirical: Option<u64>,
    },
    /// Per-prime table over all r <= N.
    Scan {
        #[arg(long = "max-prime", value_name = "N")]
        max_prime: u64,
        /// fixed-m:<m>, no-outliers, or base-sets.
        #[arg(long)]
        mode: String,
    },
    /// Verdict in supersingular-elliptic-curve language over GF(p).
    Report {
        #[arg(allow_negative_numbers = true)]
        m: i64,
        p: u64,
    },
}

fn positive(m: i64) -> Result<u64, Error> {
    u64::try_from(m).map_err(|_| Error::NotPositive)
}

fn dispatch(args: &Args) -> Result<RunReport, Error> {
    match &args.cmd {
        Cmd::Check { m, algebra } => cli::cmd_check(positive(*m)?, algebra),
        Cmd::Enumerate {
            algebra,
            verify_band,
        } => cli::cmd_enumerate(algebra, *verify_band),
        Cmd::Density { m, expr, empirical } => {
            let query = match (m, expr) {
                (Some(m), None) => DensityQuery::OutlierOf(*m),
                (None, Some(text)) => DensityQuery::Expr(text.clone()),
                _ => {
                    return Err(Error::Usage(
                        "density needs exactly one of --m or --expr".to_string(),
                    ))
                }
            };
            cli::cmd_density(&query, *empirical)
        }
        Cmd::Scan { max_prime, mode } => {
            let mode: ScanMode = mode.parse()?;
            cli::cmd_scan(*max_prime, mode)
        }
        Cmd::Report { m, p } => cli::cmd_report(positive(*m)?, *p),
    }
}

fn run() -> i32 {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    if args.json && args.csv {
        eprintln!("error: --json and --csv are mutually exclusive");
        return 1;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build();
    let pool = match pool {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| dispatch(&args)) {
        Ok(report) => {
            if args.json {
                print!("{}", cli::to_json(&report));
            } else if args.csv {
                match cli::to_csv(&report) {
                    Ok(csv) => print!("{csv}"),
                    Err(e) => {
                        eprintln!("error: {e}");
                        return exit_code_for(&e);
                    }
                }
            } else {
                print!("{}", cli::to_human(&report));
            }
            eprintln!("elapsed: {} ms", report.elapsed.as_millis());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run() as u8)
}
