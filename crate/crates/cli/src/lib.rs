//! Command-line front end for the `hypermon` binary.

pub mod report;

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use hypermon_circuits::{
    default_flow, independence_property, random_traces, CircuitError, CircuitKind, InputBias,
    Manifest,
};
use hypermon_core::automaton::{to_dot, AutomatonError, Limits, MonitorTemplate};
use hypermon_core::engine::{EngineError, Session, SessionOptions, Verdict};
use hypermon_core::formula::{parse_formula, FormulaError, QuantifiedFormula};
use hypermon_core::spec_analysis::analyze;
use hypermon_core::trace_io::{expand_trace_paths, read_trace_file, write_trace_file, TraceFileError, TRACE_EXTENSION};
use thiserror::Error;

pub use report::{AnalysisReport, SessionReport, VerdictKind};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "hypermon", version, about = "Monitor finite trace sets against universally quantified hyperproperties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a trace corpus against a specification.
    Monitor(MonitorArgs),
    /// Report symmetry, transitivity and reflexivity of a specification.
    Analyze(AnalyzeArgs),
    /// Generate random circuit traces.
    Gen(GenArgs),
    /// Export the monitor automaton of a specification as Graphviz.
    Template(TemplateArgs),
    /// Print the information-flow property of a sample circuit.
    Property(PropertyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct LimitArgs {
    /// Maximum number of automaton states per construction.
    #[arg(long, value_name = "N", default_value_t = Limits::default().max_states)]
    pub state_limit: usize,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_states: self.state_limit,
            ..Limits::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct MonitorArgs {
    /// Specification file.
    pub spec: PathBuf,
    /// Trace files or directories of `.trace` files, processed in order.
    pub traces: Vec<PathBuf>,
    #[arg(long)]
    pub no_trace_analysis: bool,
    #[arg(long)]
    pub no_spec_analysis: bool,
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub continue_after_violation: bool,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub stats_format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub spec: PathBuf,
    #[command(flatten)]
    pub limits: LimitArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(value_parser = parse_kind)]
    pub kind: CircuitKind,
    /// Number of traces.
    #[arg(short = 'n', long)]
    pub count: usize,
    /// Steps per trace.
    #[arg(short, long)]
    pub length: usize,
    #[arg(short, long, default_value_t = 0)]
    pub seed: u64,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    /// Probability that an input bit is set, as `bit=p`; repeatable.
    #[arg(long, value_name = "BIT=P", value_parser = parse_bias)]
    pub bias: Vec<(String, f64)>,
}

#[derive(Debug, Args)]
pub struct TemplateArgs {
    pub spec: PathBuf,
    /// Write the DOT text here instead of standard output.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[command(flatten)]
    pub limits: LimitArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MuxObserve {
    Out1,
    Out2,
    Both,
}

#[derive(Debug, Args)]
pub struct PropertyArgs {
    #[arg(value_parser = parse_kind)]
    pub kind: CircuitKind,
    /// Input bits whose influence is tested (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub source: Vec<String>,
    /// Output bits that must not depend on the sources (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    /// Mux outputs to observe when no targets are given.
    #[arg(long, value_enum, default_value_t = MuxObserve::Out1)]
    pub observe: MuxObserve,
    /// Treat the mux select line as a source rather than a public input.
    #[arg(long)]
    pub secret_sel: bool,
}

fn parse_kind(s: &str) -> Result<CircuitKind, String> {
    s.parse().map_err(|e: CircuitError| e.to_string())
}

fn parse_bias(s: &str) -> Result<(String, f64), String> {
    let (bit, p) = s.split_once('=').ok_or("expected BIT=P")?;
    let p: f64 = p.trim().parse().map_err(|_| format!("`{p}` is not a number"))?;
    Ok((bit.trim().to_string(), p))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: {source}")]
    Formula {
        path: PathBuf,
        #[source]
        source: FormulaError,
    },
    #[error(transparent)]
    TraceFile(#[from] TraceFileError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Engine(e) if e.is_resource() => EXIT_RESOURCE,
            CliError::Automaton(e) if e.is_resource() => EXIT_RESOURCE,
            _ => EXIT_USAGE,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn read_spec(path: &Path) -> Result<QuantifiedFormula, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_formula(&text).map_err(|source| CliError::Formula {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(io_err(p)),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Collapses the per-trace projection warnings into one line.
fn summarize_warnings(warnings: &[String]) -> Vec<String> {
    let (proj, other): (Vec<&String>, Vec<&String>) =
        warnings.iter().partition(|w| w.contains("ignoring propositions"));
    let mut out: Vec<String> = other.into_iter().cloned().collect();
    match proj.len() {
        0 => {}
        1 => out.push(proj[0].clone()),
        n => out.push(format!("{n} traces carried propositions not in the formula, e.g. {}", proj[0])),
    }
    out
}

pub fn monitor(args: &MonitorArgs) -> Result<SessionReport, CliError> {
    let qf = read_spec(&args.spec)?;
    let options = SessionOptions {
        trace_analysis: !args.no_trace_analysis,
        spec_analysis: !args.no_spec_analysis,
        parallel: args.parallel,
        continue_after_violation: args.continue_after_violation,
        limits: args.limits.limits(),
    };
    let mut session = Session::new(qf, options)?;
    for path in expand_trace_paths(&args.traces)? {
        let trace = read_trace_file(&path)?;
        // Later traces cannot change a universal violation.
        if matches!(session.process_trace(trace)?, Verdict::Violation(_))
            && !args.continue_after_violation
        {
            break;
        }
    }
    Ok(SessionReport::from_session(&session))
}

fn cmd_monitor(args: &MonitorArgs) -> Result<i32, CliError> {
    let report = monitor(args)?;
    for w in summarize_warnings(&report.warnings) {
        eprintln!("warning: {w}");
    }
    let text = match args.stats_format {
        Format::Text => report.to_string(),
        Format::Json => json(&report),
    };
    emit(args.out.as_deref(), &text)?;
    Ok(report.verdict.exit_code())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<i32, CliError> {
    let qf = read_spec(&args.spec)?;
    let report = AnalysisReport::new(&qf.to_string(), &analyze(&qf, args.limits.limits()));
    let text = match args.format {
        Format::Text => report.to_string(),
        Format::Json => json(&report),
    };
    emit(None, &text)?;
    Ok(EXIT_CLEAN)
}

pub fn generate(args: &GenArgs) -> Result<Manifest, CliError> {
    let mut bias = InputBias::uniform();
    for (bit, p) in &args.bias {
        bias = bias.with(bit, *p);
    }
    let traces = random_traces(args.kind, args.count, args.length, args.seed, &bias)?;
    fs::create_dir_all(&args.out_dir).map_err(io_err(&args.out_dir))?;
    let mut files = Vec::with_capacity(traces.len());
    for (i, t) in traces.iter().enumerate() {
        let name = hypermon_circuits::trace_name(args.kind, i, args.count);
        let file = format!("{name}.{TRACE_EXTENSION}");
        write_trace_file(&args.out_dir.join(&file), &t.to_trace(name))?;
        files.push(file);
    }
    let manifest = Manifest::new(args.kind, args.count, args.length, args.seed, bias, files);
    let path = args.out_dir.join(MANIFEST_FILE);
    fs::write(&path, json(&manifest)).map_err(io_err(&path))?;
    Ok(manifest)
}

fn cmd_gen(args: &GenArgs) -> Result<i32, CliError> {
    let m = generate(args)?;
    eprintln!("wrote {} traces to {}", m.files.len(), args.out_dir.display());
    Ok(EXIT_CLEAN)
}

fn cmd_template(args: &TemplateArgs) -> Result<i32, CliError> {
    let qf = read_spec(&args.spec)?;
    let template = MonitorTemplate::for_formula(&qf, args.limits.limits())?;
    let dfa = template.dfa();
    eprintln!(
        "{} states, {} atoms{}",
        dfa.num_states(),
        dfa.support().len(),
        if dfa.is_empty() { ", empty language" } else { "" }
    );
    emit(args.dot.as_deref(), &to_dot(dfa))?;
    Ok(EXIT_CLEAN)
}

/// The property selected by `args`, with the documented defaults.
pub fn property(args: &PropertyArgs) -> Result<QuantifiedFormula, CliError> {
    let (mut sources, mut targets) = default_flow(args.kind);
    let is_mux = matches!(args.kind, CircuitKind::MuxComb | CircuitKind::MuxSeq);
    if is_mux {
        let outs = args.kind.outputs();
        targets = outs
            .into_iter()
            .filter(|o| match args.observe {
                MuxObserve::Out1 => o.starts_with("out1"),
                MuxObserve::Out2 => o.starts_with("out2"),
                MuxObserve::Both => true,
            })
            .collect();
        if args.secret_sel {
            sources.push("sel".into());
        }
    } else if args.observe != MuxObserve::Out1 || args.secret_sel {
        return Err(CliError::Usage("--observe and --secret-sel apply to the mux circuits only".into()));
    }
    if !args.source.is_empty() {
        sources = args.source.clone();
    }
    if !args.target.is_empty() {
        targets = args.target.clone();
    }
    let dedup = |v: Vec<String>| v.into_iter().collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>();
    Ok(independence_property(args.kind, &dedup(sources), &dedup(targets))?)
}

fn cmd_property(args: &PropertyArgs) -> Result<i32, CliError> {
    emit(None, &format!("{}\n", property(args)?))?;
    Ok(EXIT_CLEAN)
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Monitor(a) => cmd_monitor(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Gen(a) => cmd_gen(a),
        Command::Template(a) => cmd_template(a),
        Command::Property(a) => cmd_property(a),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        e.exit_code()
    })
}
