mod commands;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use loopcount::{CountCache, DegreeSequence, ExactCounter, LoopModel};

use report::{Format, Report};

/// Exact and asymptotic enumeration of symmetric 0-1 matrices with given row sums.
#[derive(Debug, Parser)]
#[command(name = "loopcount", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Memo table snapshot read before and written after exact counting.
    #[arg(
        long,
        global = true,
        value_name = "PATH",
        default_value = "loopcount.cache"
    )]
    cache: PathBuf,

    #[arg(long, global = true)]
    no_cache: bool,

    /// Worker threads for the exact engine (default: all cores).
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Largest memo table allowed before giving up on an instance.
    #[arg(long, global = true, value_name = "N", default_value_t = loopcount::exact::DEFAULT_ENTRY_CAP)]
    entry_cap: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Exact counts, in total or per trace.
    Exact(ExactArgs),
    /// Every applicable closed-form estimate, with the loop density parameters.
    Asymptotic(AsymptoticArgs),
    /// Exact counts against every applicable estimate.
    Compare(CompareArgs),
    /// Exact trace law against its dense and sparse approximations.
    TraceDist(TraceDistArgs),
    /// Residuals of exact regular counts against the conjectured formula.
    ConjectureScan(ScanArgs),
    /// Elementary symmetric sums of exponentials against their approximation.
    SaddleCheck(SaddleArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Comma-separated row sums; an empty string is the empty sequence.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    seq: Option<String>,

    /// The regular family: n rows each summing to d.
    #[arg(long, num_args = 2, value_names = ["N", "D"])]
    regular: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Contribution of a diagonal entry to its row sum.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    model: u32,

    /// Count simple graphs (zero diagonal) instead.
    #[arg(long, conflicts_with = "model")]
    loopless: bool,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    model: ModelArgs,
    /// One row per trace value.
    #[arg(long, conflicts_with = "loopless")]
    by_trace: bool,
    /// A single trace value.
    #[arg(long, value_name = "L", conflicts_with_all = ["by_trace", "loopless"])]
    trace: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AsymptoticArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    model: ModelArgs,
    /// Add the per-trace dense estimates.
    #[arg(long)]
    by_trace: bool,
    /// Evaluate the sparse prefactor as a double factorial.
    #[arg(long)]
    factorial: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    model: ModelArgs,
    /// Also compare each trace count with its dense estimate.
    #[arg(long)]
    by_trace: bool,
    /// Evaluate the sparse prefactor as a double factorial.
    #[arg(long)]
    factorial: bool,
}

#[derive(Debug, Args)]
pub struct TraceDistArgs {
    #[command(flatten)]
    input: Input,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..=2))]
    model: u32,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    #[arg(long, value_name = "N", default_value_t = 4)]
    n_min: u64,
    #[arg(long, value_name = "N", default_value_t = 12)]
    n_max: u64,
    /// Restrict the scan to one degree.
    #[arg(long, value_name = "D")]
    degree: Option<u64>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct Weights {
    /// Comma-separated exponents β.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    beta: Option<String>,
    /// n exponents alternating between +A and -A.
    #[arg(long, num_args = 2, value_names = ["N", "A"], allow_negative_numbers = true)]
    alternating: Option<Vec<f64>>,
}

#[derive(Debug, Args)]
pub struct SaddleArgs {
    #[command(flatten)]
    weights: Weights,
    /// A single trace value instead of all of them.
    #[arg(long, value_name = "L")]
    trace: Option<usize>,
}

impl Input {
    pub fn sequence(&self) -> Result<DegreeSequence> {
        if let Some(s) = &self.seq {
            let s = s.trim();
            if s.is_empty() {
                return Ok(DegreeSequence::new(Vec::new()));
            }
            let degrees = s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u32>()
                        .with_context(|| format!("bad degree {t:?}"))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(DegreeSequence::new(degrees));
        }
        match self.regular.as_deref() {
            Some(&[n, d]) => {
                let n = usize::try_from(n)?;
                let d = u32::try_from(d)?;
                Ok(DegreeSequence::regular(n, d))
            }
            _ => bail!("give either --seq or --regular N D"),
        }
    }

    /// `regular(n,d)` or `seq(d1,...)`.
    pub fn instance_id(&self, seq: &DegreeSequence) -> String {
        match self.regular.as_deref() {
            Some(&[n, d]) => format!("regular({n},{d})"),
            _ => {
                let body: Vec<String> = seq.degrees().iter().map(u32::to_string).collect();
                format!("seq({})", body.join(","))
            }
        }
    }

    pub fn regular_params(&self, seq: &DegreeSequence) -> Option<(u64, u64)> {
        if seq.is_empty() || !seq.is_regular() {
            return None;
        }
        Some((seq.len() as u64, seq.degrees()[0] as u64))
    }
}

impl ModelArgs {
    /// `None` for simple graphs.
    pub fn model(&self) -> Result<Option<LoopModel>> {
        if self.loopless {
            Ok(None)
        } else {
            Ok(Some(LoopModel::from_weight(self.model)?))
        }
    }
}

/// Shared exact-counting state for one run.
pub struct Engine {
    counter: ExactCounter,
    path: Option<PathBuf>,
    loaded: usize,
}

impl Engine {
    fn open(cli: &Cli) -> Result<Engine> {
        let cache = CountCache::new();
        let mut loaded = 0;
        let path = if cli.no_cache {
            None
        } else {
            Some(cli.cache.clone())
        };
        if let Some(p) = &path {
            if p.exists() {
                loaded = cache
                    .load(p)
                    .with_context(|| format!("reading cache {}", p.display()))?;
            }
        }
        Ok(Engine {
            counter: ExactCounter::with_cache(cache, cli.entry_cap),
            path,
            loaded,
        })
    }

    pub fn counter(&self) -> &ExactCounter {
        &self.counter
    }

    fn close(self) -> Result<()> {
        if let Some(p) = &self.path {
            if self.counter.cache().len() != self.loaded || !p.exists() {
                self.counter
                    .cache()
                    .save(p)
                    .with_context(|| format!("writing cache {}", p.display()))?;
            }
        }
        Ok(())
    }
}

/// What a subcommand produced.
pub struct Outcome {
    pub report: Report,
    /// Set when an in-scope assertion failed.
    pub violation: Option<String>,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Outcome {
            report,
            violation: None,
        }
    }
}

const EXIT_ERROR: u8 = 1;
const EXIT_VIOLATION: u8 = 3;
const STACK_SIZE: usize = 512 << 20;

fn run(cli: Cli) -> Result<Option<String>> {
    let mut pool = rayon::ThreadPoolBuilder::new().stack_size(STACK_SIZE);
    if let Some(t) = cli.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        pool = pool.num_threads(t);
    }
    pool.build_global().context("starting worker pool")?;

    let uses_engine = !matches!(
        cli.command,
        Command::Asymptotic(_) | Command::SaddleCheck(_)
    );
    let engine = if uses_engine {
        Some(Engine::open(&cli)?)
    } else {
        None
    };
    let outcome = match &cli.command {
        Command::Exact(a) => commands::exact(a, engine.as_ref().unwrap())?,
        Command::Asymptotic(a) => commands::asymptotic(a)?,
        Command::Compare(a) => commands::compare(a, engine.as_ref().unwrap())?,
        Command::TraceDist(a) => commands::trace_dist(a, engine.as_ref().unwrap())?,
        Command::ConjectureScan(a) => commands::conjecture_scan(a, engine.as_ref().unwrap())?,
        Command::SaddleCheck(a) => commands::saddle_check(a)?,
    };
    if let Some(e) = engine {
        e.close()?;
    }
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    outcome.report.write(cli.format, &mut out)?;
    out.flush()?;
    Ok(outcome.violation)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // The memoized recursion goes one frame per removed row, so give it room.
    let worker = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || run(cli))
        .expect("spawning main worker");
    match worker.join() {
        Ok(Ok(None)) => ExitCode::SUCCESS,
        Ok(Ok(Some(msg))) => {
            eprintln!("assertion failed: {msg}");
            ExitCode::from(EXIT_VIOLATION)
        }
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
        Err(_) => ExitCode::from(EXIT_ERROR),
    }
}
