use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use mzrefine::config::parse_config;
use mzrefine::harness::{self, OUTPUT_ROOT_ENV};
use mzrefine::par::Execution;
use mzrefine::validation::{self, SUITES};

#[derive(Parser)]
#[command(name = "mzrefine", version, about = "Adaptive spectral refinement driven by t-model energy flux")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one config. Exit code: 0 completed, 2 band limit reached, 3 blow-up.
    Run {
        config: PathBuf,
        /// Output directory (overrides the config's `output_dir`).
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run several configs, independent runs in parallel.
    Sweep {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Run acceptance suites; nonzero exit on any failure.
    Validate {
        /// Suite name or number; all suites when omitted.
        suite: Option<String>,
        /// Where to write the JSON report.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run batches on one thread.
        #[arg(long)]
        sequential: bool,
    },
}

fn output_root() -> PathBuf {
    std::env::var_os(OUTPUT_ROOT_ENV).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

fn run(config: &Path, output: Option<PathBuf>) -> Result<u8> {
    let text = std::fs::read_to_string(config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = parse_config(&text).with_context(|| format!("in {}", config.display()))?;
    let name = config.file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    let dir = output.unwrap_or_else(|| harness::output_dir_for(&cfg, name));
    let (summary, _) = harness::run(&cfg, &dir).with_context(|| format!("writing {}", dir.display()))?;
    println!("{}", serde_json::to_string_pretty(&summary)?);
    eprintln!("outputs in {}", dir.display());
    Ok(summary.outcome.exit_code() as u8)
}

fn sweep(configs: &[PathBuf], jobs: Option<usize>) -> Result<u8> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        if n == 0 {
            bail!("--jobs must be at least 1");
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    let results = pool.install(|| harness::sweep(configs, Execution::Parallel));
    let mut code = 0u8;
    for (path, r) in results {
        match r {
            Ok((dir, s)) => {
                println!("{}\t{:?}\tM={}\tevents={}\t{}", path.display(), s.outcome, s.m_final, s.events, dir.display());
                code = code.max(s.outcome.exit_code() as u8);
            }
            Err(e) => {
                println!("{}\terror\t{e}", path.display());
                code = code.max(1);
            }
        }
    }
    Ok(code)
}

fn validate(suite: Option<String>, json: Option<PathBuf>, sequential: bool) -> Result<u8> {
    let exec = if sequential { Execution::Sequential } else { Execution::Parallel };
    let reports = match suite {
        None => validation::run_all(exec),
        Some(s) => match validation::run_suite(&s, exec) {
            Some(r) => vec![r],
            None => bail!("unknown suite {s:?}; expected 1-9 or one of {}", SUITES.join(", ")),
        },
    };
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed()).count();
    println!("{} of {} suites passed", reports.len() - failed, reports.len());
    let path = json.unwrap_or_else(|| output_root().join("validation.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&reports)?).with_context(|| format!("writing {}", path.display()))?;
    Ok(if failed == 0 { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, output } => run(&config, output),
        Command::Sweep { configs, jobs } => sweep(&configs, jobs),
        Command::Validate { suite, json, sequential } => validate(suite, json, sequential),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
