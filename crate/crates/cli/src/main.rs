//! `expsearch`: generate instances, run solvers, compare bounds and benchmark.

mod bench;
mod run;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use expsearch::bnc::CutConfig;
use expsearch::io::{Family, GeneratorSpec};
use expsearch::Error;

use crate::run::Method;

#[derive(Parser)]
#[command(name = "expsearch", version, about = "Solvers for the expanding search problem")]
struct Cli {
    /// More log output on stderr (-v: info, -vv: debug, -vvv: per-node trace).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Subcommand)]
enum Command {
    /// Write seeded random instances.
    Generate {
        #[arg(long, value_parser = parse_family)]
        family: Family,
        /// Number of vertices including the root.
        #[arg(long)]
        n: usize,
        /// Edge density |E| / (n(n-1)/2); density-controlled family only.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        /// Uniform probabilities instead of random integer weights.
        #[arg(long)]
        unweighted: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instances to write, with seeds seed, seed+1, ...
        #[arg(long, default_value_t = 1)]
        count: u64,
        /// Output directory.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Solve one instance and print the search with its cost.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Seconds before branch-and-cut stops with a gap.
        #[arg(long, default_value_t = 1200.0)]
        time_limit: f64,
        /// Bisection gap of the density search (default 1/(2n-1)).
        #[arg(long)]
        epsilon: Option<f64>,
        /// Seed branch-and-cut with greedy plus local search.
        #[arg(long, value_enum, default_value_t = Switch::On)]
        warm_start: Switch,
        /// Also write the search as a solution file.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Root relaxation bound under a choice of cut families.
    Bounds {
        instance: PathBuf,
        #[arg(long, value_parser = parse_cuts, default_value = "c1c2")]
        cuts: CutConfig,
    },
    /// Run methods over a directory of instances and write a CSV.
    Bench {
        dir: PathBuf,
        /// Comma-separated: exact, greedy, local, oracle, lp-none, lp-c1, lp-c2, lp-c1c2.
        #[arg(long, default_value = "exact,greedy,local")]
        methods: String,
        #[arg(long, default_value = "results.csv")]
        out: PathBuf,
        #[arg(long, default_value_t = 1200.0)]
        time_limit: f64,
        /// Parallel workers (one instance each).
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the invariant suite on every instance of a directory.
    Verify { dir: PathBuf },
    /// Per (n, density) group ratios of bounds and heuristics to the optimum.
    RatioReport {
        results: PathBuf,
        #[arg(long, default_value = "ratios.csv")]
        out: PathBuf,
    },
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse()
}

fn parse_cuts(s: &str) -> Result<CutConfig, String> {
    s.parse()
}

/// Failure categories, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Internal(String),
    Usage(String),
    Io(String),
    Invalid(String),
    Infeasible(String),
    Verify(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Internal(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
            Failure::Invalid(_) => 4,
            Failure::Infeasible(_) => 5,
            Failure::Verify(_) => 6,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Internal(_) => "internal",
            Failure::Usage(_) => "usage",
            Failure::Io(_) => "io",
            Failure::Invalid(_) => "invalid-instance",
            Failure::Infeasible(_) => "infeasible-request",
            Failure::Verify(_) => "verify-failed",
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Internal(m)
            | Failure::Usage(m)
            | Failure::Io(m)
            | Failure::Invalid(m)
            | Failure::Infeasible(m)
            | Failure::Verify(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Io(_) => Failure::Io(msg),
            Error::Parse { .. }
            | Error::SelfLoop(_)
            | Error::VertexOutOfRange { .. }
            | Error::BadLength { .. }
            | Error::BadProbability { .. }
            | Error::RootProbability(_)
            | Error::ProbabilitySum(_)
            | Error::Disconnected(_)
            | Error::InvalidSearch { .. }
            | Error::IncompleteSearch { .. } => Failure::Invalid(msg),
            Error::TooLarge { .. } | Error::InfeasibleRequest(_) | Error::BadEpsilon(_) | Error::UndefinedDensity => {
                Failure::Infeasible(msg)
            }
            _ => Failure::Internal(msg),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        match e.kind() {
            csv::ErrorKind::Io(_) => Failure::Io(e.to_string()),
            _ => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn time_limit(secs: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(secs).map_err(|_| Failure::Usage(format!("invalid time limit {secs}")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Generate { family, n, density, unweighted, seed, count, out } => {
            let spec = GeneratorSpec { family, n, density, weighted: !unweighted, seed };
            for path in bench::generate_many(&spec, count, &out)? {
                emit(&format!("{}\n", path.display()));
            }
            Ok(())
        }
        Command::Solve { instance, method, time_limit: t, epsilon, warm_start, output } => {
            let params = run::Params { time_limit: time_limit(t)?, epsilon, warm_start: matches!(warm_start, Switch::On) };
            run::solve_command(&instance, method, &params, output.as_deref())
        }
        Command::Bounds { instance, cuts } => run::bounds_command(&instance, cuts),
        Command::Bench { dir, methods, out, time_limit: t, jobs } => {
            let methods = bench::parse_methods(&methods)?;
            bench::bench(&dir, &methods, &out, time_limit(t)?, jobs)
        }
        Command::Verify { dir } => verify::verify_dir(&dir),
        Command::RatioReport { results, out } => bench::ratio_report(&results, &out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let f = Failure::Usage(e.to_string().trim().to_string());
            report(&f);
            return ExitCode::from(f.code());
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        2 => log::LevelFilter::Debug,
        _ => log::LevelFilter::Trace,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            report(&f);
            ExitCode::from(f.code())
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
pub fn emit(text: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        if e.kind() != std::io::ErrorKind::BrokenPipe {
            log::error!("writing output: {e}");
        }
    }
}

fn report(f: &Failure) {
    let line = serde_json::json!({ "error": f.kind(), "code": f.code(), "message": f.message() });
    eprintln!("{line}");
}
