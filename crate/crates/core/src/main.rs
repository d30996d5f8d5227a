use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use infops_core::pipeline::{run_pipeline, write_default_config, PipelineConfig, Stage, CONFIG_ENV};
use infops_core::synth::{generate, write_dataset, write_scale_corpus, SynthConfig};
use infops_core::{Error, Result};

#[derive(Parser)]
#[command(name = "infops", version, about = "Influence-campaign forensics over tweet dumps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Pipeline configuration (TOML).
    #[arg(long, env = CONFIG_ENV)]
    config: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = "infops-out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate the inputs, then print a summary.
    IngestCheck(RunArgs),
    /// Category retweet networks and interaction ego networks.
    BuildNets(RunArgs),
    /// Sampled group degrees and pairwise KS tests.
    Degstats(RunArgs),
    /// Tweet stance labels and supporter classes.
    Stance(RunArgs),
    /// Communities of the ego networks and their composition.
    Community(RunArgs),
    /// Causal networks between group activity series.
    Causal(RunArgs),
    /// Per-group category, client and original-content tables.
    Report(RunArgs),
    /// Every stage in dependency order.
    RunAll(RunArgs),
    /// Write a synthetic corpus with matching side tables and config.
    Synth(SynthArgs),
    /// Print a configuration with every default filled in.
    DefaultConfig {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 20161108)]
    seed: u64,
    #[arg(long, default_value_t = 5000)]
    tweets: usize,
    #[arg(long, default_value_t = 900)]
    users: usize,
    #[arg(long, default_value_t = 7)]
    days: u32,
    /// Stream a memory-test corpus with this many unique interactions instead.
    #[arg(long)]
    scale_edges: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

fn set_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::argument("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::argument(e.to_string()))?;
    }
    Ok(())
}

fn run(args: &RunArgs, stages: &[Stage]) -> Result<()> {
    set_threads(args.threads)?;
    let mut cfg = PipelineConfig::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.config.seed = seed;
    }
    let manifest = run_pipeline(&cfg, stages, &args.out_dir)?;
    if stages == [Stage::Ingest] {
        let path = args.out_dir.join("ingest/summary.json");
        let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        print!("{text}");
    } else {
        println!(
            "{} artifact(s) written to {}",
            manifest.artifacts.len(),
            args.out_dir.display()
        );
    }
    Ok(())
}

fn synth(args: &SynthArgs) -> Result<()> {
    set_threads(args.threads)?;
    match args.scale_edges {
        Some(edges) => {
            let s = write_scale_corpus(&args.out_dir, edges, args.seed)?;
            println!(
                "{} interactions between {} seed and {} other accounts in {}",
                s.rows,
                s.seeds,
                s.others,
                args.out_dir.display()
            );
        }
        None => {
            let cfg = SynthConfig {
                users: args.users,
                tweets: args.tweets,
                days: args.days,
                seed: args.seed,
            };
            let ds = generate(&cfg)?;
            write_dataset(&ds, args.seed, &args.out_dir)?;
            println!("{} tweets written to {}", ds.rows.len(), args.out_dir.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::IngestCheck(a) => run(a, &[Stage::Ingest]),
        Command::BuildNets(a) => run(a, &[Stage::Netbuild]),
        Command::Degstats(a) => run(a, &[Stage::Degstats]),
        Command::Stance(a) => run(a, &[Stage::Stance]),
        Command::Community(a) => run(a, &[Stage::Community]),
        Command::Causal(a) => run(a, &[Stage::Causal]),
        Command::Report(a) => run(a, &[Stage::Report]),
        Command::RunAll(a) => run(a, &Stage::ALL),
        Command::Synth(a) => synth(a),
        Command::DefaultConfig { output } => match output {
            Some(p) => write_default_config(p),
            None => PipelineConfig::default().to_toml().map(|t| print!("{t}")),
        },
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
