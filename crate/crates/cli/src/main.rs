use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dilatekit::bounds::{applicable, evaluate, BoundKind};
use dilatekit::io::read_set_file;
use dilatekit::modular::{chowla_sweep, lemma8_sweep, stabilizer_sweep};
use dilatekit::residue::EfReading;
use dilatekit::search::{hunt_counterexamples, HuntOutcome, DEFAULT_BUDGET, DEFAULT_WITNESS_CAP};
use dilatekit::{
    decompose, evaluate_form, extremal_min, margin_profile, BoundReport, Family, IntSet,
    LinearForm, SearchMode, SearchSpec,
};
use serde::Serialize;

/// Sets larger than this are summarized unless `--full` is given.
const ECHO_LIMIT: usize = 1000;

#[derive(Parser, Debug)]
#[command(
    name = "dilatekit",
    version,
    about = "Dilated sumsets m·A + k·A: computation, bounds and search"
)]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, env = "DILATEKIT_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a linear form on a set.
    Sumset {
        /// Comma-separated nonzero coefficients, e.g. 2,3.
        #[arg(
            long,
            value_delimiter = ',',
            allow_negative_numbers = true,
            required = true
        )]
        form: Vec<i64>,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        full: bool,
    },
    /// Congruence classes of a set modulo k.
    Decompose {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, value_enum, default_value_t = Reading::Projection)]
        reading: Reading,
        #[arg(long)]
        full: bool,
    },
    /// Exhaustive lemma sweeps and the theorem desk check.
    Verify {
        #[command(subcommand)]
        what: Verify,
    },
    /// Check one bound on one set; one JSON report per line.
    Check {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        set: PathBuf,
        #[arg(long, default_value = "thm")]
        bound: String,
    },
    /// Every bound that applies to k, on each given set; JSON lines.
    Report {
        #[arg(long)]
        k: i64,
        #[arg(long, required = true, num_args = 1..)]
        set: Vec<PathBuf>,
        /// Restrict to these bounds (comma-separated).
        #[arg(long, value_delimiter = ',')]
        bounds: Vec<String>,
    },
    /// Minimum of |2·A + k·A| over a family of sets of one size.
    Extremal {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        size: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Enumerate every subset instead of normalized representatives.
        #[arg(long)]
        raw: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Look for instances where a bound fails.
    Hunt {
        #[arg(long)]
        bound: String,
        #[arg(long)]
        k: i64,
        /// A size `n` or an inclusive range `lo..hi`.
        #[arg(long, default_value = "1")]
        sizes: String,
        #[command(flatten)]
        search: SearchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// |2·A + k·A| along a structured family against the theorem bound.
    Profile {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        sizes: String,
        #[arg(long, default_value = "ap")]
        family: String,
        #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
        format: TableFormat,
    },
}

#[derive(Subcommand, Debug)]
enum Verify {
    /// Chowla's inequality over every admissible pair in ℤ/nℤ, 2 ≤ n ≤ max-n.
    Chowla {
        #[arg(long, default_value_t = 10)]
        max_n: u64,
    },
    /// The stabilizer characterization for n ≤ max-n.
    L6 {
        #[arg(long, default_value_t = 12)]
        max_n: u64,
    },
    /// The mixed-coprimality addition lemma for each composite k.
    L8 {
        #[arg(long, value_delimiter = ',', default_values_t = [6u64, 9, 10])]
        k: Vec<u64>,
    },
    /// Theorem bound on random sets of one size.
    Thm {
        #[arg(long)]
        k: i64,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 50)]
        samples: u64,
        #[arg(long, default_value_t = 100_000)]
        universe: u64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Σ|Δ_ii| ≥ j(j − 1) for every nonempty A ⊆ [0, universe).
    Graph {
        #[arg(long, value_delimiter = ',', default_values_t = [3i64, 4, 5, 6])]
        k: Vec<i64>,
        #[arg(long, default_value_t = 13)]
        universe: u64,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long)]
    universe: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<Mode>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, default_value_t = DEFAULT_WITNESS_CAP)]
    witness_cap: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exhaustive,
    Random,
    Structured,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum TableFormat {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Reading {
    Projection,
    Cardinality,
}

/// Exit statuses: success, bound violations found, usage or input error.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Clean,
    Violations,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli.command) {
        Ok(Status::Clean) => ExitCode::SUCCESS,
        Ok(Status::Violations) => ExitCode::from(1),
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

// A closed stdout (`| head`) ends the run quietly.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let io = c
            .downcast_ref::<std::io::Error>()
            .map(|e| e.kind())
            .or_else(|| {
                c.downcast_ref::<csv::Error>().and_then(|e| match e.kind() {
                    csv::ErrorKind::Io(e) => Some(e.kind()),
                    _ => None,
                })
            });
        io == Some(std::io::ErrorKind::BrokenPipe)
    })
}

fn load(path: &Path) -> anyhow::Result<IntSet> {
    let parsed = read_set_file(path).with_context(|| format!("reading {}", path.display()))?;
    if parsed.duplicates > 0 {
        log::warn!(
            "{}: dropped {} duplicate entries",
            path.display(),
            parsed.duplicates
        );
    }
    if parsed.set.is_empty() {
        bail!("{}: set is empty", path.display());
    }
    Ok(parsed.set)
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    writeln!(
        std::io::stdout().lock(),
        "{}",
        serde_json::to_string_pretty(value)?
    )?;
    Ok(())
}

fn write_json<T: Serialize>(value: &T, out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(path) => {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => print_json(value),
    }
}

fn seed_or_fresh(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let t = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .unwrap_or_default();
        let s = t.as_nanos() as u64;
        eprintln!("seed: {s}");
        s
    })
}

/// `n`, `lo..hi` or `lo..=hi`, both ends inclusive.
fn parse_sizes(s: &str) -> anyhow::Result<(usize, usize)> {
    let parse = |x: &str| {
        x.trim()
            .parse::<usize>()
            .with_context(|| format!("bad size '{x}' in '{s}'"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((lo, hi)) => (parse(lo)?, parse(hi.strip_prefix('=').unwrap_or(hi))?),
        None => {
            let n = parse(s)?;
            (n, n)
        }
    };
    if lo == 0 || lo > hi {
        bail!("bad size range '{s}'");
    }
    Ok((lo, hi))
}

fn parse_bound(s: &str) -> anyhow::Result<BoundKind> {
    Ok(s.parse::<BoundKind>()?)
}

fn status_of(violations: u64) -> Status {
    if violations == 0 {
        Status::Clean
    } else {
        Status::Violations
    }
}

fn search_spec(
    k: i64,
    min: usize,
    max: usize,
    args: &SearchArgs,
    default_universe: u64,
) -> anyhow::Result<SearchSpec> {
    let mode = match (args.mode, args.samples) {
        (Some(Mode::Exhaustive), Some(_)) => bail!("--samples only applies to --mode random"),
        (Some(Mode::Structured), Some(_)) => bail!("--samples only applies to --mode random"),
        (Some(Mode::Random), None) => bail!("--mode random needs --samples"),
        (Some(Mode::Random), Some(samples)) | (None, Some(samples)) => SearchMode::Random {
            samples,
            seed: seed_or_fresh(args.seed),
        },
        (Some(Mode::Structured), None) => SearchMode::Structured,
        (Some(Mode::Exhaustive), None) | (None, None) => SearchMode::Exhaustive,
    };
    if args.seed.is_some() && !matches!(mode, SearchMode::Random { .. }) {
        bail!("--seed only applies to --mode random");
    }
    Ok(
        SearchSpec::new(k, min, args.universe.unwrap_or(default_universe), mode)
            .with_sizes(min, max)
            .with_budget(args.budget)
            .with_witness_cap(args.witness_cap),
    )
}

#[derive(Serialize)]
struct SumsetOut<'a> {
    form: &'a [i64],
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<&'a IntSet>,
}

#[derive(Serialize)]
struct ClassOut<'a> {
    residue: u64,
    size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    elements: Option<&'a IntSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<&'a IntSet>,
}

#[derive(Serialize)]
struct DecomposeOut<'a> {
    k: u64,
    j: usize,
    classes: Vec<ClassOut<'a>>,
    #[serde(rename = "E")]
    e: Vec<usize>,
    #[serde(rename = "F")]
    f: Vec<usize>,
}

fn print_reports(reports: &[BoundReport]) -> anyhow::Result<u64> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for r in reports {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(reports.iter().filter(|r| r.is_violation()).count() as u64)
}

fn run(command: Command) -> anyhow::Result<Status> {
    match command {
        Command::Sumset {
            form,
            set,
            format,
            full,
        } => {
            let f = LinearForm::new(form)?;
            let a = load(&set)?;
            let s = evaluate_form(&f, &a)?;
            let show = full || s.len() <= ECHO_LIMIT;
            match format {
                Format::Json => print_json(&SumsetOut {
                    form: f.coefficients(),
                    size: s.len(),
                    elements: show.then_some(&s),
                })?,
                Format::Text => {
                    let mut out = std::io::stdout().lock();
                    if show {
                        writeln!(out, "{s}")?;
                    }
                    writeln!(out, "size {}", s.len())?;
                }
            }
            Ok(Status::Clean)
        }
        Command::Decompose {
            k,
            set,
            reading,
            full,
        } => {
            let a = load(&set)?;
            let d = decompose(&a, k)?;
            let reading = match reading {
                Reading::Projection => EfReading::Projection,
                Reading::Cardinality => EfReading::Cardinality,
            };
            let show = full || a.len() <= ECHO_LIMIT;
            let out = DecomposeOut {
                k: d.modulus(),
                j: d.j(),
                classes: d
                    .classes()
                    .iter()
                    .map(|c| ClassOut {
                        residue: c.residue,
                        size: c.len(),
                        elements: show.then_some(&c.elements),
                        quotient: show.then_some(&c.quotient),
                    })
                    .collect(),
                e: d.e_indices_with(reading),
                f: d.f_indices_with(reading),
            };
            print_json(&out)?;
            Ok(Status::Clean)
        }
        Command::Verify { what } => verify(what),
        Command::Check { k, set, bound } => {
            let kind = parse_bound(&bound)?;
            let a = load(&set)?;
            Ok(status_of(print_reports(&evaluate(kind, &a, k)?)?))
        }
        Command::Report { k, set, bounds } => {
            let kinds = if bounds.is_empty() {
                applicable(k)
            } else {
                bounds
                    .iter()
                    .map(|b| parse_bound(b))
                    .collect::<anyhow::Result<_>>()?
            };
            if kinds.is_empty() {
                bail!("no set-level bound applies to k = {k}");
            }
            let mut violations = 0;
            for path in &set {
                let a = load(path)?;
                for &kind in &kinds {
                    violations += print_reports(&evaluate(kind, &a, k)?)?;
                }
            }
            Ok(status_of(violations))
        }
        Command::Extremal {
            k,
            size,
            search,
            raw,
            out,
        } => {
            let universe = search.universe.context("--universe is required")?;
            let mut spec = search_spec(k, size, size, &search, universe)?;
            if raw {
                spec = spec.raw();
            }
            let result = extremal_min(&spec)?;
            write_json(&result, out.as_deref())?;
            Ok(Status::Clean)
        }
        Command::Hunt {
            bound,
            k,
            sizes,
            search,
            out,
        } => {
            let kind = parse_bound(&bound)?;
            let (lo, hi) = parse_sizes(&sizes)?;
            let spec = if kind.is_modular() {
                SearchSpec::new(k, 1, 1, SearchMode::Exhaustive)
            } else {
                let universe = search.universe.context("--universe is required")?;
                search_spec(k, lo, hi, &search, universe)?
            };
            let outcome = hunt_counterexamples(&spec, kind)?;
            write_json(&outcome, out.as_deref())?;
            if let HuntOutcome::Sets(r) = &outcome {
                if !r.all_confirmed {
                    bail!("fast path and naive oracle disagree on a failing instance");
                }
            }
            Ok(status_of(outcome.violation_count()))
        }
        Command::Profile {
            k,
            sizes,
            family,
            format,
        } => {
            let family: Family = family.parse()?;
            let (lo, hi) = parse_sizes(&sizes)?;
            let rows = margin_profile(k, lo, hi, family)?;
            match format {
                TableFormat::Json => print_json(&rows)?,
                TableFormat::Csv => {
                    let mut w = csv::Writer::from_writer(std::io::stdout());
                    w.write_record(["k", "family", "n", "actual", "bound", "margin"])?;
                    for r in &rows {
                        w.write_record([
                            r.k.to_string(),
                            r.family.to_string(),
                            r.n.to_string(),
                            r.actual.to_string(),
                            r.bound.to_string(),
                            r.margin.to_string(),
                        ])?;
                    }
                    w.flush()?;
                }
            }
            Ok(Status::Clean)
        }
    }
}

fn verify(what: Verify) -> anyhow::Result<Status> {
    let summary = match what {
        Verify::Chowla { max_n } => chowla_sweep(max_n)?,
        Verify::L6 { max_n } => stabilizer_sweep(max_n)?,
        Verify::L8 { k } => lemma8_sweep(&k)?,
        Verify::Thm {
            k,
            size,
            samples,
            universe,
            seed,
        } => {
            let spec = SearchSpec::new(
                k,
                size,
                universe,
                SearchMode::Random {
                    samples,
                    seed: seed_or_fresh(seed),
                },
            );
            let outcome = hunt_counterexamples(&spec, BoundKind::Theorem)?;
            print_json(&outcome)?;
            return Ok(status_of(outcome.violation_count()));
        }
        Verify::Graph { k, universe } => {
            let mut outcomes = Vec::new();
            let mut violations = 0;
            for k in k {
                let spec = SearchSpec::new(k, 1, universe, SearchMode::Exhaustive)
                    .with_sizes(1, universe as usize)
                    .with_budget(u64::MAX);
                let outcome = hunt_counterexamples(&spec, BoundKind::Graph)?;
                violations += outcome.violation_count();
                outcomes.push(outcome);
            }
            print_json(&outcomes)?;
            return Ok(status_of(violations));
        }
    };
    print_json(&summary)?;
    Ok(status_of(summary.violations.len() as u64))
}
