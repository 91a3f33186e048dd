//! Command-line harness: generate update streams, run them through a
//! colouring engine, and validate materialised colourings.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dyncol::dispatcher::EngineChoice;
use dyncol::gen::{gen_workload, GenParams, WorkloadKind};
use dyncol::runner::RunConfig;
use dyncol::stream::{run_ops, StreamError, StreamOp, UpdateStream};

#[derive(Parser)]
#[command(name = "dyncol", version, about = "Implicit dynamic graph colouring harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute an update stream, answering queries and honouring validate
    /// directives.
    Run(RunArgs),
    /// Generate a deterministic workload stream.
    Gen(GenArgs),
    /// Execute a stream and run a full validation at the end, printing the
    /// report.
    Validate(RunArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Colouring engine: det, rand-simple, rand-better or auto-min.
    #[arg(long, default_value = "auto-min", value_parser = parse_engine)]
    engine: EngineChoice,
    /// Global seed for every randomised choice.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Slack parameter of the two-level engine (at least 3).
    #[arg(long, default_value_t = 3)]
    delta: u32,
    /// Out-degree below which the two-level engine delegates
    /// (default: ceil(log2 n)^2).
    #[arg(long)]
    base_threshold: Option<u64>,
    /// Updates between forced orientation rebuilds (default: m/2).
    #[arg(long)]
    rebuild_period: Option<u64>,
    /// Arboricity estimate at or below which queries run directly on the
    /// whole graph (default: ceil(log2 n)).
    #[arg(long)]
    direct_threshold: Option<u64>,
    /// Updates per partition-seed generation (default: n^2).
    #[arg(long)]
    repartition_period: Option<u64>,
}

impl EngineArgs {
    fn run_config(&self, verbose_labels: bool) -> RunConfig {
        RunConfig {
            engine: self.engine,
            seed: self.seed,
            delta: self.delta,
            base_threshold: self.base_threshold,
            rebuild_period: self.rebuild_period,
            direct_threshold: self.direct_threshold,
            repartition_period: self.repartition_period,
            verbose_labels,
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Update stream file.
    #[arg(long)]
    stream: PathBuf,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the stats document here instead of stdout.
    #[arg(long)]
    stats_out: Option<PathBuf>,
    /// Also print the structured label path for every answered query.
    #[arg(long)]
    verbose_labels: bool,
}

#[derive(Args)]
struct GenArgs {
    /// Workload kind: gnm, planar-like, star-burst or clique-blocks.
    #[arg(long, value_parser = parse_kind)]
    kind: WorkloadKind,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    updates: u64,
    #[arg(long, default_value_t = 100)]
    queries: u64,
    /// Emit a validate directive every this many updates (0 = never).
    #[arg(long, default_value_t = 0)]
    validate_every: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge-count target (gnm).
    #[arg(long)]
    m_target: Option<usize>,
    /// Block count (clique-blocks).
    #[arg(long)]
    blocks: Option<u32>,
    /// Block size (clique-blocks).
    #[arg(long)]
    block_size: Option<u32>,
    /// Hub count (star-burst).
    #[arg(long)]
    hubs: Option<u32>,
    /// Output stream file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_engine(s: &str) -> Result<EngineChoice, String> {
    EngineChoice::parse(s).ok_or_else(|| format!("unknown engine '{s}'"))
}

fn parse_kind(s: &str) -> Result<WorkloadKind, String> {
    WorkloadKind::parse(s).ok_or_else(|| format!("unknown workload kind '{s}'"))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(args) => run(args, false),
        Command::Gen(args) => gen(args),
        Command::Validate(args) => run(args, true),
    }
}

fn run(args: RunArgs, validate_at_end: bool) -> ExitCode {
    let cfg = args.engine.run_config(args.verbose_labels);
    let stream = match UpdateStream::read_file(&args.stream) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let mut stream = stream;
    if validate_at_end && !matches!(stream.ops.last(), Some(StreamOp::Validate)) {
        stream.ops.push(StreamOp::Validate);
    }
    let out = match run_ops(&stream, &cfg) {
        Ok(out) => out,
        Err(e) => return fail(e),
    };
    for (v, label) in &out.answers {
        if args.verbose_labels {
            println!("{v} {} {label}", label.value);
        } else {
            println!("{v} {}", label.value);
        }
    }
    let mut stats = out.stats;
    stats.push("stream", args.stream.display());
    match args.stats_out {
        Some(path) => {
            if let Err(e) = std::fs::write(&path, stats.to_text()) {
                return fail(StreamError::Io(e));
            }
        }
        None => print!("{}", stats.to_text()),
    }
    ExitCode::SUCCESS
}

fn gen(args: GenArgs) -> ExitCode {
    let mut params = GenParams::new(args.kind, args.n, args.updates, args.seed);
    params.queries = args.queries;
    params.validate_every = args.validate_every;
    if let Some(m) = args.m_target {
        params.m_target = m;
    }
    if let Some(b) = args.blocks {
        params.blocks = b;
    }
    if let Some(k) = args.block_size {
        params.block_size = k;
    }
    if let Some(h) = args.hubs {
        params.hubs = h;
    }
    let stream = match gen_workload(&params) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    match args.out {
        Some(path) => {
            if let Err(e) = stream.write_file(&path) {
                return fail(e);
            }
        }
        None => print!("{}", stream.to_text()),
    }
    ExitCode::SUCCESS
}

fn fail(e: StreamError) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::FAILURE
}
