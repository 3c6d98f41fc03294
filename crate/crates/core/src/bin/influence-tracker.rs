use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use chrono::{DateTime, Utc};
use clap::{Parser, Subcommand};

use influence_tracker::report::{compare_block, score_rows, write_comparisons, write_scores, OutputFormat};
use influence_tracker::{generate_synthetic, load_dataset, BuildParams, Error};

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "influence-tracker",
    version,
    about = "Score accounts and compare follower-network diffusion"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Influence metric and h-indexes for the named accounts.
    Score {
        #[arg(long)]
        dataset: PathBuf,
        /// Evaluation instant (RFC 3339); defaults to the dataset capture time.
        #[arg(long, value_parser = parse_instant)]
        as_of: Option<DateTime<Utc>>,
        #[arg(long, env = "INFLUENCE_TRACKER_FORMAT", default_value = "text")]
        format: OutputFormat,
        /// Handles (with or without `@`, any case) or account ids.
        handles: Vec<String>,
    },
    /// Total tweet transmission of the by-influence and by-followers networks.
    Compare {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        root: String,
        /// Followers fetched per node. Repeat together with --k to batch budgets.
        #[arg(long = "nf", default_value = "50")]
        n_f: Vec<usize>,
        /// Followers kept per node.
        #[arg(long, default_value = "3")]
        k: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        ttl: u32,
        #[arg(long, value_parser = parse_instant)]
        as_of: Option<DateTime<Utc>>,
        #[arg(long, env = "INFLUENCE_TRACKER_FORMAT", default_value = "text")]
        format: OutputFormat,
        /// Embed both network dumps in JSON output.
        #[arg(long)]
        dump_networks: bool,
    },
    /// Write a seeded synthetic dataset.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        accounts: usize,
        #[arg(long)]
        max_followers: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_instant(s: &str) -> Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(s)
        .map(|t| t.with_timezone(&Utc))
        .map_err(|e| format!("expected an RFC 3339 timestamp: {e}"))
}

enum Failure {
    Usage(String),
    Data(Error),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_data_error() {
            Failure::Data(e)
        } else {
            Failure::Internal(e.to_string())
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Internal(format!("writing output: {e}"))
    }
}

fn budgets(n_f: &[usize], k: &[usize], ttl: u32) -> Result<Vec<BuildParams>, Failure> {
    let pairs: Vec<(usize, usize)> = match (n_f.len(), k.len()) {
        (a, b) if a == b => n_f.iter().copied().zip(k.iter().copied()).collect(),
        (1, _) => k.iter().map(|&k| (n_f[0], k)).collect(),
        (_, 1) => n_f.iter().map(|&n| (n, k[0])).collect(),
        (a, b) => return Err(Failure::Usage(format!("--nf given {a} times but --k {b} times"))),
    };
    if ttl == 0 {
        return Err(Failure::Usage("--ttl must be at least 1".into()));
    }
    pairs
        .into_iter()
        .map(|(n, k)| {
            if k == 0 || n < k {
                Err(Failure::Usage(format!("need nf >= k >= 1, got nf={n} k={k}")))
            } else {
                Ok(BuildParams::new(n, k, ttl))
            }
        })
        .collect()
}

fn run(command: Command) -> Result<(), Failure> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Score {
            dataset,
            as_of,
            format,
            handles,
        } => {
            let ds = load_dataset(&dataset)?;
            let as_of = as_of.unwrap_or(ds.captured_at);
            let rows = score_rows(&ds, &handles, as_of)?;
            for r in rows.iter().filter(|r| r.span_clamped) {
                eprintln!(
                    "note: {} tweet window spans under one second; TCR used a one-second span",
                    r.handle
                );
            }
            write_scores(&mut out, format, &ds, as_of, &rows)?;
        }
        Command::Compare {
            dataset,
            root,
            n_f,
            k,
            ttl,
            as_of,
            format,
            dump_networks,
        } => {
            let params = budgets(&n_f, &k, ttl)?;
            let ds = load_dataset(&dataset)?;
            let as_of = as_of.unwrap_or(ds.captured_at);
            if dump_networks && format != OutputFormat::Json {
                eprintln!("warning: --dump-networks only affects JSON output");
            }
            let blocks = params
                .iter()
                .map(|&p| compare_block(&ds, &root, p, as_of, dump_networks))
                .collect::<Result<Vec<_>, _>>()?;
            if blocks.iter().any(|b| b.empty) {
                eprintln!("warning: {root} has no resolvable followers; both networks are empty");
            }
            write_comparisons(&mut out, format, &ds, as_of, &blocks)?;
        }
        Command::Gen {
            seed,
            accounts,
            max_followers,
            out: path,
        } => {
            if accounts < 2 {
                return Err(Failure::Usage("--accounts must be at least 2".into()));
            }
            let ds = generate_synthetic(seed, accounts, max_followers);
            ds.save(&path)?;
            writeln!(
                out,
                "wrote {} accounts, {} tweets to {}",
                ds.account_count(),
                ds.tweet_count(),
                path.display()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_DATA)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_INTERNAL)
        }
    }
}
