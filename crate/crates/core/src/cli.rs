//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 validation below its pass threshold,
//! 2 usage or parse error, 3 degenerate computation, 4 numerical failure.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bayes::{bayes_factor_laplace, bayes_factor_truncated_with_tolerance, Method};
use crate::error::Error;
use crate::frequentist::p_value;
use crate::model::{ExperimentSummary, SlowlyVaryingPrior, TruncatedScalePrior};
use crate::montecarlo::{mc_bayes_factor, validate};
use crate::numerics::DEFAULT_REL_TOL;
use crate::output::{Field, Format, RecordWriter};
use crate::sweep::{log_grid, run_sweep, scaling_diagnostic, series, SweepConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

/// Smallest pass fraction for `validate` to succeed.
pub const VALIDATE_PASS_FRACTION: f64 = 0.98;
/// Largest |z| counted as agreement in `validate`.
pub const VALIDATE_MAX_Z: f64 = 3.0;

pub const PVALUE_COLUMNS: &[&str] = &["t", "p_value"];
pub const BF_COLUMNS: &[&str] = &["t", "n", "a", "b", "method", "log_b10", "b10", "error_estimate"];
pub const SWEEP_COLUMNS: &[&str] = &["t", "n", "a", "b", "log_b10", "b10", "mu_hat", "in_support"];
pub const VALIDATE_COLUMNS: &[&str] = &[
    "trial", "t", "n", "sigma", "a", "b", "log_b10_exact", "log_b10_mc", "std_error", "z", "pass",
];

#[derive(Debug, Parser)]
#[command(name = "lindley", version, about = "p-values and Bayes factors for a normal mean with known variance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Laplace,
    Mc,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => Method::ExactQuadrature,
            MethodArg::Laplace => Method::Laplace,
            MethodArg::Mc => Method::MonteCarlo,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Two-sided p-value of an observed t-statistic.
    #[command(allow_negative_numbers = true)]
    Pvalue {
        #[arg(long)]
        t: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bayes factor under the truncated scale-invariant prior a <= |mu| <= b.
    #[command(allow_negative_numbers = true)]
    Bf {
        #[arg(long)]
        t: f64,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
        method: MethodArg,
        /// Monte Carlo sample count.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Monte Carlo seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long = "rel-tol", default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Bayes factor against sample size for several prior breadths.
    #[command(allow_negative_numbers = true)]
    Sweep {
        /// t values, repeated or comma separated.
        #[arg(long = "t", value_delimiter = ',', default_values_t = [2.0, 3.0])]
        t_values: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long = "n-min", default_value_t = 1.0)]
        n_min: f64,
        #[arg(long = "n-max", default_value_t = 1e12)]
        n_max: f64,
        #[arg(long = "n-points", default_value_t = 200)]
        n_points: usize,
        /// Priors 10^-k <= |mu| <= 10^k for each listed k.
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 5])]
        decades: Vec<u32>,
        /// Explicit supports as A:B, repeatable; replaces --decades.
        #[arg(long, value_parser = parse_support)]
        support: Vec<TruncatedScalePrior>,
        #[arg(long = "rel-tol", default_value_t = DEFAULT_REL_TOL)]
        rel_tol: f64,
        /// Append the local slope d ln B10 / d ln n.
        #[arg(long)]
        diagnostic: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Compare quadrature against Monte Carlo on random configurations.
    Validate {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 10_000_000)]
        samples: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
}

fn parse_support(s: &str) -> std::result::Result<TruncatedScalePrior, String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected A:B, got {s:?}"))?;
    let a: f64 = a.trim().parse().map_err(|e| format!("bad lower bound {a:?}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("bad upper bound {b:?}: {e}"))?;
    TruncatedScalePrior::new(a, b).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    Compute(Error),
    Io(io::Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Compute(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) => EXIT_USAGE,
        Error::Degenerate(_) => EXIT_DEGENERATE,
        Error::NoConvergence { .. } | Error::BoundViolated { .. } => EXIT_NUMERICAL,
        Error::GridPoint { source, .. } => match **source {
            Error::Degenerate(_) => EXIT_DEGENERATE,
            _ => EXIT_NUMERICAL,
        },
    }
}

fn open_output<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> io::Result<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(stdout),
    })
}

fn with_threads<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map(|pool| pool.install(job))
            .map_err(|e| Failure::Usage(format!("cannot build thread pool: {e}"))),
    }
}

/// Run the CLI on `args` (including the program name) and return the exit
/// status. Records go to `stdout` unless `--out` is given.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{}", e.render());
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{}", e.render());
                    EXIT_USAGE
                }
            };
            return code;
        }
    };

    match dispatch(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(Failure::Compute(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn dispatch(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Pvalue { t, output } => {
            let p = p_value(t)?;
            let mut w = RecordWriter::new(open_output(&output.out, stdout)?, output.format, PVALUE_COLUMNS);
            w.write(&[t.into(), p.into()])?;
            w.finish()?;
            Ok(EXIT_OK)
        }
        Command::Bf { t, n, sigma, a, b, method, samples, seed, rel_tol, threads, output } => {
            let summary = ExperimentSummary::new(t, n, sigma)?;
            let prior = TruncatedScalePrior::new(a, b)?;
            let method = Method::from(method);
            let (log_b10, error) = match method {
                Method::ExactQuadrature => {
                    let r = bayes_factor_truncated_with_tolerance(&summary, &prior, rel_tol)?;
                    (r.log_b10, r.abs_error_estimate.unwrap_or(f64::NAN))
                }
                Method::Laplace => {
                    let r = bayes_factor_laplace(&summary, &SlowlyVaryingPrior::from(prior))?;
                    (r.log_b10, f64::NAN)
                }
                Method::MonteCarlo => {
                    let r = with_threads(threads, || mc_bayes_factor(&summary, &prior, samples, seed))??;
                    (r.log_b10, r.std_error)
                }
            };
            let mut w = RecordWriter::new(open_output(&output.out, stdout)?, output.format, BF_COLUMNS);
            w.write(&[
                t.into(),
                n.into(),
                a.into(),
                b.into(),
                method.as_str().into(),
                log_b10.into(),
                log_b10.exp().into(),
                error.into(),
            ])?;
            w.finish()?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            t_values,
            sigma,
            n_min,
            n_max,
            n_points,
            decades,
            support,
            rel_tol,
            diagnostic,
            threads,
            output,
        } => {
            let breadths = if support.is_empty() {
                decades
                    .iter()
                    .map(|&k| TruncatedScalePrior::symmetric_decades(k))
                    .collect::<crate::Result<Vec<_>>>()?
            } else {
                support
            };
            let config = SweepConfig {
                t_values,
                sigma,
                n_grid: log_grid(n_min, n_max, n_points)?,
                breadths,
                rel_tol,
            };
            let rows = with_threads(threads, || run_sweep(&config))??;

            let mut columns = SWEEP_COLUMNS.to_vec();
            let slopes = if diagnostic {
                columns.push("local_slope");
                let mut all = Vec::with_capacity(rows.len());
                for s in series(&rows) {
                    all.extend(scaling_diagnostic(s)?.into_iter().map(|(_, slope)| slope));
                }
                Some(all)
            } else {
                None
            };

            let mut w = RecordWriter::new(open_output(&output.out, stdout)?, output.format, &columns);
            for (i, r) in rows.iter().enumerate() {
                let mut fields: Vec<Field> = vec![
                    r.t.into(),
                    r.n.into(),
                    r.a.into(),
                    r.b.into(),
                    r.log_b10.into(),
                    r.b10().into(),
                    r.mu_hat.into(),
                    r.in_support.into(),
                ];
                if let Some(s) = &slopes {
                    fields.push(s[i].into());
                }
                w.write(&fields)?;
            }
            w.finish()?;
            Ok(EXIT_OK)
        }
        Command::Validate { trials, seed, samples, threads, output } => {
            let checks = with_threads(threads, || validate(trials as usize, seed, samples))??;
            let mut w = RecordWriter::new(open_output(&output.out, stdout)?, output.format, VALIDATE_COLUMNS);
            let mut passed = 0u64;
            for (i, c) in checks.iter().enumerate() {
                let ok = c.passed(VALIDATE_MAX_Z);
                passed += u64::from(ok);
                w.write(&[
                    (i as u64).into(),
                    c.summary.t().into(),
                    c.summary.n().into(),
                    c.summary.sigma().into(),
                    c.prior.a().into(),
                    c.prior.b().into(),
                    c.exact.log_b10.into(),
                    c.mc.log_b10.into(),
                    c.mc.std_error.into(),
                    c.z.into(),
                    ok.into(),
                ])?;
            }
            w.finish()?;
            let fraction = passed as f64 / trials as f64;
            let verdict = fraction >= VALIDATE_PASS_FRACTION;
            writeln!(
                stderr,
                "{passed}/{trials} trials within {VALIDATE_MAX_Z} standard errors ({:.1}%); {}",
                100.0 * fraction,
                if verdict { "PASS" } else { "FAIL" }
            )?;
            Ok(if verdict { EXIT_OK } else { EXIT_VALIDATION_FAILED })
        }
    }
}
