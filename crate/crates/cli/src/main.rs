//! `takagi`: exact partial sums, mesh counts and dimension estimates for
//! Takagi-class functions `f(x) = Σ c_k φ(b^k x)`.

mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{AssouadParams, Counts, VerifyParams};
use config::{CommonArgs, FileConfig, RunConfig, SequenceArgs};
use error::{CliError, CliResult};
use output::Sink;

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  1  a verification check failed
  2  usage error
  3  invalid input (bad number, x outside [0,1], invalid sequence, bad config)
  4  resource cap exceeded (--mem-cap)
  5  refused: η is infinite for this sequence
  6  i/o error
  7  insufficient data or unmet precondition

Without --out (or TAKAGI_OUT_DIR), the main CSV/SVG goes to stdout and the
JSON summary to stderr.";

#[derive(Debug, Parser)]
#[command(name = "takagi", version, about = "Takagi-class function toolkit", after_help = EXIT_CODES)]
struct Cli {
    #[command(flatten)]
    common: CommonFlags,

    #[command(flatten)]
    seq: SequenceFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonFlags {
    /// Flat `key = value` config file; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output directory (overrides TAKAGI_OUT_DIR).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, global = true, value_name = "K", value_parser = clap::value_parser!(u64).range(1..))]
    workers: Option<u64>,

    /// Largest grid (in points) any single build may allocate.
    #[arg(long, global = true, value_name = "CELLS")]
    mem_cap: Option<u64>,

    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct SequenceFlags {
    /// Base b ≥ 2 (default 2).
    #[arg(long = "b", global = true, value_name = "B")]
    base: Option<String>,

    /// geometric, signed or explicit (inferred from the other flags).
    #[arg(long, global = true)]
    kind: Option<String>,

    /// Ratio a of a geometric sequence c_k = a^k (default 1/b).
    #[arg(long = "a", global = true, value_name = "A")]
    a: Option<String>,

    /// Signs for c_k = ±b^{-k}: alternating, seeded:<u64>, or a list like 1,-1,-1.
    #[arg(long, global = true)]
    signs: Option<String>,

    /// Leading coefficients of an explicit sequence, e.g. "1, 0, 1/4".
    #[arg(long, global = true)]
    head: Option<String>,

    /// Geometric ratio continuing an explicit sequence after its head.
    #[arg(long, global = true)]
    tail_ratio: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// f(x): exact for b-adic x, a certified interval otherwise.
    Eval {
        #[arg(long)]
        x: String,
        #[arg(long, default_value = "1/1000000000000")]
        eps: String,
        #[arg(long, default_value_t = 15)]
        digits: u32,
    },
    /// H_n (or H_{n,m} with --m) sampled on its grid, as CSV.
    Psum {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        m: Option<u32>,
        #[arg(long, default_value_t = 12)]
        digits: u32,
        /// Add an exact `p/q` column.
        #[arg(long)]
        exact: bool,
    },
    /// Run every property and counting check; exit 1 if any fails.
    Verify {
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
        /// Random samples per property suite.
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        /// Largest n (and m) for the property suites.
        #[arg(long, default_value_t = 8)]
        property_max: u32,
        #[arg(long, default_value_t = 2)]
        refine: u32,
    },
    /// Box-counting dimension fit over levels n-min..=n-max.
    Boxdim {
        #[arg(long, default_value_t = 6)]
        n_min: u32,
        #[arg(long, default_value_t = 12)]
        n_max: u32,
        #[arg(long, default_value_t = 2)]
        refine: u32,
    },
    /// Localized count profile and its growth rate in m.
    Assouad {
        #[arg(long, default_value_t = 2)]
        n_min: u32,
        #[arg(long, default_value_t = 6)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        m_min: u32,
        #[arg(long, default_value_t = 6)]
        m_max: u32,
        /// Draw this many seeded centers per (n, m) instead of the full grid.
        #[arg(long)]
        sample: Option<usize>,
        #[arg(long, default_value_t = 2)]
        refine: u32,
        #[arg(long, value_enum, default_value_t = Counts::Auto)]
        counts: Counts,
    },
    /// SVG of f, H_n and its strip, plus the sampled values as CSV.
    Render {
        #[arg(long, default_value_t = 4)]
        n: u32,
        /// log2 of the number of sample intervals.
        #[arg(long, default_value_t = 12)]
        points_log2: u32,
        #[arg(long, default_value = "1/1000000")]
        eps: String,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let file = cli
        .common
        .config
        .as_deref()
        .map(FileConfig::load)
        .transpose()?;
    let seq = SequenceArgs {
        base: cli.seq.base,
        kind: cli.seq.kind,
        a: cli.seq.a,
        signs: cli.seq.signs,
        head: cli.seq.head,
        tail_ratio: cli.seq.tail_ratio,
    };
    let common = CommonArgs {
        out: cli.common.out,
        workers: cli.common.workers.map(|w| w as usize),
        mem_cap: cli.common.mem_cap,
        seed: cli.common.seed,
    };
    let cfg = RunConfig::resolve(file.as_ref(), &seq, &common)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = cfg.workers {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(&cfg, cli.command))
}

fn dispatch(cfg: &RunConfig, command: Command) -> CliResult<()> {
    let sink = || Sink::new(cfg.out.clone());
    match command {
        Command::Eval { x, eps, digits } => commands::eval(cfg, &x, &eps, digits),
        Command::Psum {
            n,
            m,
            digits,
            exact,
        } => commands::psum(cfg, &sink()?, n, m, digits, exact),
        Command::Verify {
            n_max,
            m_max,
            samples,
            property_max,
            refine,
        } => {
            let params = VerifyParams {
                n_max,
                m_max,
                samples,
                property_max,
                refine,
            };
            commands::verify(cfg, &sink()?, &params)
        }
        Command::Boxdim {
            n_min,
            n_max,
            refine,
        } => commands::boxdim(cfg, &sink()?, n_min, n_max, refine),
        Command::Assouad {
            n_min,
            n_max,
            m_min,
            m_max,
            sample,
            refine,
            counts,
        } => {
            let params = AssouadParams {
                n_min,
                n_max,
                m_min,
                m_max,
                sample,
                refine,
                counts,
            };
            commands::assouad(cfg, &sink()?, &params)
        }
        Command::Render {
            n,
            points_log2,
            eps,
        } => commands::render(cfg, &sink()?, n, points_log2, &eps),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() {
                error::exit::USAGE
            } else {
                error::exit::OK
            };
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::from(error::exit::OK as u8),
        Err(e) => {
            eprintln!("takagi: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
