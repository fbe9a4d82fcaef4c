//! `predlab`: run scenarios, enumerate automata, analyse bit sequences.
//!
//! Exit codes: 0 on any completed evaluation (whatever the verdict), 2 for an
//! invalid config or arguments, 3 for a runtime failure. Failures print one
//! JSON line on stderr: `{"error":"CODE","message":"...","exit":N}`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use predlab::analysis::{borel_normality_check, detect_cycle, parse_bits_csv, CycleReport, NormalityReport};
use predlab::bitstreams::make_rule_stream;
use predlab::mealy::{enumerate_automata, PredicateKind};
use predlab::model::DEFAULT_FUEL;
use predlab::scenario::{load_config, parse_config, trials_csv, RunReport, ScenarioConfig, TOOL_NAME, TOOL_VERSION};
use rayon::prelude::*;
use serde::Serialize;

const DYADIC_DEMO: &str = include_str!("../configs/dyadic.json");
const MEALY_DEMO: &str = include_str!("../configs/mealy-em.json");
const QUBIT_DEMO: &str = include_str!("../configs/qubit-ec.json");

#[derive(Parser)]
#[command(name = "predlab", version, about = "Prediction-game laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the scenarios in a JSON config.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        output: RunOutput,
    },
    /// Count automata over {x, z} satisfying predicate conjunctions.
    Enumerate(EnumerateArgs),
    /// Cycle detection and block-frequency normality on a bit sequence.
    Analyze(AnalyzeArgs),
    /// Run one of the shipped scenarios.
    Demo {
        #[arg(value_enum)]
        scenario: Demo,
        /// Print the embedded config instead of running it.
        #[arg(long)]
        show_config: bool,
        #[command(flatten)]
        output: RunOutput,
    },
}

#[derive(Args)]
struct RunOutput {
    /// Report path; a directory when the config holds several scenarios.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replaces the noise seeds of every scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Per-trial CSV path; a directory when the config holds several scenarios.
    #[arg(long)]
    trials_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Demo {
    Dyadic,
    MealyEm,
    QubitEc,
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long)]
    q_max: usize,
    #[arg(long)]
    output_stable: bool,
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    restricted: bool,
    #[arg(long)]
    witnessed: bool,
    /// Every predicate; also the default when no predicate flag is given.
    #[arg(long)]
    all: bool,
    /// Automata satisfying all selected predicates to include in the output.
    #[arg(long, default_value_t = 0)]
    exemplars: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// CSV of bits, or a trials CSV from `run` (its outcome column is used).
    #[arg(long, conflicts_with = "rule", required_unless_present = "rule")]
    bits: Option<PathBuf>,
    #[arg(long)]
    rule: Option<String>,
    /// Number of bits; required with --rule, truncates --bits.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    normality: bool,
    /// Longest block length for the normality check (implies --normality).
    #[arg(long)]
    blocks: Option<usize>,
    #[arg(long)]
    cycle: bool,
    /// Cycle search bound, default the whole sequence.
    #[arg(long)]
    bound: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Failure {
    code: String,
    message: String,
    exit: u8,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: "INVALID_ARGUMENT".into(), message: message.into(), exit: 2 }
    }

    fn config(e: predlab::Error) -> Self {
        Failure { code: e.code().into(), message: e.to_string(), exit: 2 }
    }

    fn runtime(e: predlab::Error) -> Self {
        Failure { code: e.code().into(), message: e.to_string(), exit: 3 }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure { code: "IO_ERROR".into(), message: format!("{}: {e}", path.display()), exit: 3 }
    }

    fn emit(&self) {
        let line = serde_json::json!({ "error": self.code, "message": self.message, "exit": self.exit });
        eprintln!("{line}");
    }
}

type CliResult<T = ()> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            Failure::usage(first).emit();
            return ExitCode::from(2);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            f.emit();
            ExitCode::from(f.exit)
        }
    }
}

fn dispatch(command: Command) -> CliResult {
    match command {
        Command::Run { config, output } => {
            let configs = load_config(&config).map_err(Failure::config)?;
            run_scenarios(configs, &output)
        }
        Command::Demo { scenario, show_config, output } => {
            let text = match scenario {
                Demo::Dyadic => DYADIC_DEMO,
                Demo::MealyEm => MEALY_DEMO,
                Demo::QubitEc => QUBIT_DEMO,
            };
            if show_config {
                print!("{text}");
                return Ok(());
            }
            let configs = parse_config(text).map_err(Failure::config)?;
            run_scenarios(configs, &output)
        }
        Command::Enumerate(args) => enumerate(args),
        Command::Analyze(args) => analyze(args),
    }
}

fn fuel() -> CliResult<u64> {
    match std::env::var("PREDLAB_FUEL") {
        Err(_) => Ok(DEFAULT_FUEL),
        Ok(v) => match v.trim().parse::<u64>() {
            Ok(f) if f > 0 => Ok(f),
            _ => Err(Failure::usage(format!("PREDLAB_FUEL must be a positive integer, got `{v}`"))),
        },
    }
}

fn run_scenarios(mut configs: Vec<ScenarioConfig>, output: &RunOutput) -> CliResult {
    let fuel = fuel()?;
    if let Some(seed) = output.seed {
        for c in &mut configs {
            c.seed = Some(seed);
        }
    }
    let multi = configs.len() > 1;
    let mut names: Vec<&str> = configs.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if multi && names.len() != configs.len() {
        return Err(Failure::usage("scenario names must be unique within a config"));
    }

    // Building reads automaton and stream files: failures there are config errors.
    let built = configs.iter().map(|c| c.build(fuel).map_err(Failure::config)).collect::<CliResult<Vec<_>>>()?;
    let reports: Vec<RunReport> =
        built.into_par_iter().map(|s| s.run().map_err(Failure::runtime)).collect::<CliResult<_>>()?;

    let mut stdout_reports = Vec::new();
    for r in &reports {
        let report_path = destination(output.out.as_deref(), r.scenario.outputs.report.as_deref(), multi, &r.scenario.name, "json")?;
        match report_path {
            Some(path) => write_atomic(&path, r.to_json().as_bytes())?,
            None => stdout_reports.push(r),
        }
        let csv_path =
            destination(output.trials_csv.as_deref(), r.scenario.outputs.trials_csv.as_deref(), multi, &r.scenario.name, "trials.csv")?;
        if let Some(path) = csv_path {
            write_atomic(&path, trials_csv(r.report.trials.as_deref().unwrap_or_default()).as_bytes())?;
        }
    }
    match stdout_reports.as_slice() {
        [] => {}
        [one] if !multi => println!("{}", one.to_json()),
        many => println!("{}", serde_json::to_string_pretty(many).expect("reports serialise")),
    }
    Ok(())
}

/// The flag wins over the config; with several scenarios the flag names a directory.
fn destination(flag: Option<&Path>, configured: Option<&Path>, multi: bool, name: &str, ext: &str) -> CliResult<Option<PathBuf>> {
    match (flag, multi) {
        (Some(dir), true) => {
            fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            Ok(Some(dir.join(format!("{name}.{ext}"))))
        }
        (Some(path), false) => Ok(Some(path.to_path_buf())),
        (None, _) => Ok(configured.map(Path::to_path_buf)),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Failure::io(path, e))?;
    tmp.write_all(bytes).map_err(|e| Failure::io(path, e))?;
    tmp.persist(path).map_err(|e| Failure::io(path, e.error))?;
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> CliResult {
    let text = serde_json::to_string_pretty(value).expect("reports serialise");
    match out {
        Some(path) => write_atomic(path, format!("{text}\n").as_bytes()),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct EnumerateReport {
    tool: &'static str,
    version: &'static str,
    #[serde(flatten)]
    summary: predlab::mealy::EnumerationSummary,
}

fn enumerate(args: EnumerateArgs) -> CliResult {
    let flags = [
        (args.output_stable, PredicateKind::OutputStable),
        (args.strict, PredicateKind::Strict),
        (args.restricted, PredicateKind::Restricted),
        (args.witnessed, PredicateKind::Witnessed),
    ];
    let mut kinds: Vec<PredicateKind> = flags.iter().filter(|(on, _)| *on).map(|(_, k)| *k).collect();
    if args.all || kinds.is_empty() {
        kinds = PredicateKind::ALL.to_vec();
    }
    let summary = enumerate_automata(args.q_max, &kinds, args.exemplars).map_err(Failure::config)?;
    emit_json(&EnumerateReport { tool: TOOL_NAME, version: TOOL_VERSION, summary }, args.out.as_deref())
}

#[derive(Serialize)]
struct AnalyzeReport {
    tool: &'static str,
    version: &'static str,
    source: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    normality: Option<NormalityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<CycleReport>,
}

fn analyze(args: AnalyzeArgs) -> CliResult {
    let (source, bits) = match (&args.bits, &args.rule) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
            let mut bits = parse_bits_csv(&text).map_err(Failure::config)?;
            if let Some(n) = args.n {
                if n > bits.len() {
                    return Err(Failure::usage(format!("--n {n} exceeds the {} bits in {}", bits.len(), path.display())));
                }
                bits.truncate(n);
            }
            (path.display().to_string(), bits)
        }
        (None, Some(rule)) => {
            let n = args.n.ok_or_else(|| Failure::usage("--rule needs --n"))?;
            let stream = make_rule_stream(rule).map_err(Failure::config)?;
            (format!("rule:{rule}"), stream.prefix(n).map_err(Failure::runtime)?.into_bits())
        }
        (None, None) => return Err(Failure::usage("one of --bits or --rule is required")),
    };

    let want_normality = args.normality || args.blocks.is_some();
    let want_cycle = args.cycle || !want_normality;
    let normality = if want_normality {
        Some(borel_normality_check(&bits, args.blocks.unwrap_or(2)).map_err(Failure::config)?)
    } else {
        None
    };
    let cycle = if want_cycle {
        Some(detect_cycle(&bits, args.bound.unwrap_or(bits.len())).map_err(Failure::config)?)
    } else {
        None
    };
    emit_json(&AnalyzeReport { tool: TOOL_NAME, version: TOOL_VERSION, source, n: bits.len(), normality, cycle }, args.out.as_deref())
}
