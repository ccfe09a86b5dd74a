//! `tqc` — simulate, decode and benchmark topological cluster-state error
//! correction from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/parse error, 3 invariant
//! violation during decoding.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tqc_cli::bench::{bench_csv, run_throughput_bench};
use tqc_cli::config::ExperimentConfig;
use tqc_cli::experiment::{run_logical_experiment, summary_csv, ExperimentError};
use tqc_cli::format::{
    correction_records, sha256_hex, write_corrections_binary, write_corrections_text,
    write_stream,
};
use tqc_cli::rate::{data_rate, parse_decimal};
use tqc_cli::replay::{replay_stream, ReplayError};
use tqc_core::lattice::{BoundaryMode, CellClass};
use tqc_core::noise::{reduce_to_z, sample_errors};
use tqc_core::pipeline::{decode_batch, verify, DecodeWindowConfig};
use tqc_core::syndrome::synthesize_detector_stream;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INVARIANT: u8 = 3;

#[derive(Parser)]
#[command(
    name = "tqc",
    about = "Topological cluster-state error-correction simulator and decoder",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Lattice/noise flags shared by the volume-producing subcommands. Any flag
/// left unset falls back to the config file, then to defaults.
#[derive(Args, Clone, Default)]
struct CommonOpts {
    /// Config file of key=value lines; flags override its entries.
    #[arg(long)]
    config: Option<String>,
    #[arg(long)]
    lx: Option<u32>,
    #[arg(long)]
    ly: Option<u32>,
    #[arg(long)]
    lt: Option<u32>,
    /// Error probability: p_x = p_z = p, p_xz = p² (see --channel).
    #[arg(long)]
    p: Option<f64>,
    /// Noise model: "symmetric" or "pure-z".
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    /// Decode mode: "batch" or "stream".
    #[arg(long)]
    mode: Option<String>,
    /// Sliding-window size in sheets (streaming).
    #[arg(long)]
    window: Option<u32>,
    /// Commit lag in sheets (streaming).
    #[arg(long)]
    lag: Option<u32>,
    /// Boundary mode: "periodic" or "open".
    #[arg(long)]
    boundary: Option<String>,
    /// Output path (default: stdout).
    #[arg(long)]
    out: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo logical-error experiment; emits a summary CSV.
    Simulate(CommonOpts),
    /// Decode one seeded volume and emit its corrections.
    Decode {
        #[command(flatten)]
        common: CommonOpts,
        /// Correction output format: "text" or "binary".
        #[arg(long, default_value = "text")]
        format: String,
    },
    /// Throughput sweep over cross-section sizes and error rates (CSV).
    Bench {
        /// Comma-separated lattice sizes (lx = ly = size).
        #[arg(long, default_value = "8,16,32")]
        sizes: String,
        /// Comma-separated error rates.
        #[arg(long, default_value = "0.001,0.005,0.01")]
        ps: String,
        #[arg(long, default_value_t = 1)]
        lt: u32,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Classical data-rate arithmetic (exact).
    Rate {
        /// Cells per 2D cross-section, e.g. "1e9".
        #[arg(long)]
        cells: String,
        /// Raw bits per cell.
        #[arg(long, default_value = "6")]
        bits: String,
        /// Seconds to consume one cell layer, e.g. "30e-9".
        #[arg(long)]
        seconds: String,
    },
    /// Synthesize a detector stream and write it as a TQCS file.
    Record(CommonOpts),
    /// Decode a recorded TQCS stream through the sliding-window pipeline.
    Replay {
        /// Input TQCS file.
        #[arg(long = "in")]
        input: String,
        #[arg(long, default_value_t = 16)]
        window: u32,
        #[arg(long, default_value_t = 8)]
        lag: u32,
        /// Worker threads (1 = parse and decode inline).
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: Option<String>,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: msg.into() }
    }
    fn data(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_DATA, message: msg.into() }
    }
    fn invariant(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_INVARIANT, message: msg.into() }
    }
}

fn build_config(opts: &CommonOpts) -> Result<ExperimentConfig, Failure> {
    let mut cfg = ExperimentConfig::default();
    if let Some(path) = &opts.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::data(format!("cannot read config {path}: {e}")))?;
        cfg.apply_kv(&text).map_err(|e| Failure::data(e.to_string()))?;
    }
    let mut set = |key: &str, value: Option<String>| -> Result<(), Failure> {
        if let Some(v) = value {
            cfg.set(key, &v).map_err(|e| Failure::usage(e.to_string()))?;
        }
        Ok(())
    };
    set("lx", opts.lx.map(|v| v.to_string()))?;
    set("ly", opts.ly.map(|v| v.to_string()))?;
    set("lt", opts.lt.map(|v| v.to_string()))?;
    set("p", opts.p.map(|v| v.to_string()))?;
    set("channel", opts.channel.clone())?;
    set("seed", opts.seed.map(|v| v.to_string()))?;
    set("trials", opts.trials.map(|v| v.to_string()))?;
    set("mode", opts.mode.clone())?;
    set("window", opts.window.map(|v| v.to_string()))?;
    set("lag", opts.lag.map(|v| v.to_string()))?;
    set("boundary", opts.boundary.clone())?;
    set("out", opts.out.clone())?;
    cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
    Ok(cfg)
}

fn open_output(path: &Option<String>) -> Result<Box<dyn Write>, Failure> {
    match path {
        Some(p) => {
            let f = File::create(p)
                .map_err(|e| Failure::data(format!("cannot create {p}: {e}")))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn cmd_simulate(opts: &CommonOpts) -> Result<(), Failure> {
    let cfg = build_config(opts)?;
    let summary = run_logical_experiment(&cfg).map_err(|e| match e {
        ExperimentError::Config(c) => Failure::usage(c.to_string()),
        ExperimentError::Pipeline(p) => Failure::invariant(p.to_string()),
    })?;
    let mut out = open_output(&cfg.out)?;
    out.write_all(summary_csv(&summary).as_bytes())
        .map_err(|e| Failure::data(e.to_string()))?;
    Ok(())
}

fn cmd_decode(opts: &CommonOpts, format: &str) -> Result<(), Failure> {
    let cfg = build_config(opts)?;
    let dims = cfg.dims().map_err(|e| Failure::usage(e.to_string()))?;
    let channel = cfg.noise().map_err(|e| Failure::usage(e.to_string()))?;
    let pattern = sample_errors(dims, &channel, cfg.seed)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let (pz, dz) = reduce_to_z(&pattern, dims);
    let outcome = decode_batch(&pattern, dims).map_err(|e| Failure::invariant(e.to_string()))?;
    for (z, corr, class) in [
        (&pz, &outcome.primal, CellClass::Primal),
        (&dz, &outcome.dual, CellClass::Dual),
    ] {
        let rep = verify(z, corr, class, dims).map_err(|e| Failure::invariant(e.to_string()))?;
        if !rep.residual_syndrome_empty {
            return Err(Failure::invariant(format!("{class} correction left residual syndrome")));
        }
        eprintln!(
            "{class}: {} corrections, logical_failure={}",
            corr.qubits.len(),
            rep.logical_failure()
        );
    }
    let records = correction_records(&outcome.primal, &outcome.dual);
    let mut out = open_output(&cfg.out)?;
    match format {
        "text" => write_corrections_text(&mut out, &records),
        "binary" => write_corrections_binary(&mut out, &records),
        other => return Err(Failure::usage(format!("unknown correction format {other:?}"))),
    }
    .map_err(|e| Failure::data(e.to_string()))?;
    Ok(())
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<T>()
                .map_err(|_| Failure::usage(format!("cannot parse {what} entry {part:?}")))
        })
        .collect()
}

fn cmd_bench(
    sizes: &str,
    ps: &str,
    lt: u32,
    repeats: usize,
    seed: u64,
    out: &Option<String>,
) -> Result<(), Failure> {
    let sizes: Vec<u32> = parse_list(sizes, "--sizes")?;
    let ps: Vec<f64> = parse_list(ps, "--ps")?;
    if sizes.is_empty() || ps.is_empty() || repeats == 0 {
        return Err(Failure::usage("bench needs nonempty --sizes, --ps and --repeats ≥ 1"));
    }
    let records = run_throughput_bench(&sizes, lt, &ps, repeats, seed);
    let mut w = open_output(out)?;
    w.write_all(bench_csv(&records).as_bytes()).map_err(|e| Failure::data(e.to_string()))?;
    Ok(())
}

fn cmd_rate(cells: &str, bits: &str, seconds: &str) -> Result<(), Failure> {
    let parse = |s: &str, what: &str| {
        parse_decimal(s).map_err(|e| Failure::usage(format!("{what}: {e}")))
    };
    let rate = data_rate(
        parse(cells, "--cells")?,
        parse(bits, "--bits")?,
        parse(seconds, "--seconds")?,
    )
    .map_err(|e| Failure::usage(e.to_string()))?;
    println!("{rate}");
    Ok(())
}

fn cmd_record(opts: &CommonOpts) -> Result<(), Failure> {
    let cfg = build_config(opts)?;
    let dims = cfg.dims().map_err(|e| Failure::usage(e.to_string()))?;
    if cfg.boundary == BoundaryMode::Open {
        return Err(Failure::usage("record requires periodic boundaries"));
    }
    let channel = cfg.noise().map_err(|e| Failure::usage(e.to_string()))?;
    let pattern = sample_errors(dims, &channel, cfg.seed)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let (pz, dz) = reduce_to_z(&pattern, dims);
    let all: std::collections::BTreeSet<_> = pz.union(&dz).copied().collect();
    let sheets = synthesize_detector_stream(&all, dims, cfg.seed)
        .map_err(|e| Failure::invariant(e.to_string()))?;
    let mut out = open_output(&cfg.out)?;
    write_stream(&mut out, &sheets).map_err(|e| Failure::data(e.to_string()))?;
    Ok(())
}

fn cmd_replay(
    input: &str,
    window: u32,
    lag: u32,
    threads: usize,
    out: &Option<String>,
) -> Result<(), Failure> {
    if lag >= window || window == 0 {
        return Err(Failure::usage("--lag must be below --window"));
    }
    let file = File::open(input)
        .map_err(|e| Failure::data(format!("cannot open {input}: {e}")))?;
    let src: Box<dyn Read + Send> = Box::new(BufReader::new(file));
    let cfg = DecodeWindowConfig { window_sheets: window, commit_lag: lag };
    let (primal, dual, _) = replay_stream(src, cfg, threads).map_err(|e| match e {
        ReplayError::Format(f) => Failure::data(f.to_string()),
        ReplayError::Pipeline(p) => Failure::invariant(p.to_string()),
        ReplayError::BadCrossSection { .. } => Failure::data(e.to_string()),
    })?;
    let records = correction_records(&primal, &dual);
    let mut text = Vec::new();
    write_corrections_text(&mut text, &records).map_err(|e| Failure::data(e.to_string()))?;
    eprintln!("sha256={}", sha256_hex(&text));
    let mut w = open_output(out)?;
    w.write_all(&text).map_err(|e| Failure::data(e.to_string()))?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap's default exit code for usage errors is 2; this tool
            // reserves 2 for data errors, so remap.
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { ExitCode::SUCCESS } else { ExitCode::from(EXIT_USAGE) };
        }
    };
    let result = match &cli.command {
        Command::Simulate(opts) => cmd_simulate(opts),
        Command::Decode { common, format } => cmd_decode(common, format),
        Command::Bench { sizes, ps, lt, repeats, seed, out } => {
            cmd_bench(sizes, ps, *lt, *repeats, *seed, out)
        }
        Command::Rate { cells, bits, seconds } => cmd_rate(cells, bits, seconds),
        Command::Record(opts) => cmd_record(opts),
        Command::Replay { input, window, lag, threads, out } => {
            cmd_replay(input, *window, *lag, *threads, out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
