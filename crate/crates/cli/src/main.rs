//! `rte`: axiom extraction, classification and scoring over pair datasets.

mod commands;
mod dataset;
mod metrics;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use entail_core::Mode;
use serde::Serialize;

use commands::{Common, Fatal};

#[derive(Parser)]
#[command(name = "rte", version, about = "Logic-based textual entailment with axiom injection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Pairs, one JSON object per line.
    #[arg(long)]
    dataset: PathBuf,
    /// Word relations, one `source<TAB>target<TAB>kind` per line.
    #[arg(long)]
    relations: Option<PathBuf>,
    /// Stored axioms to load.
    #[arg(long)]
    axioms: Option<PathBuf>,
    /// none, w2w, p2p or w2w+p2p.
    #[arg(long, default_value = "w2w+p2p", value_parser = parse_mode)]
    mode: Mode,
    /// Worker threads; 0 uses one per core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Per-pair time limit; 0 disables it.
    #[arg(long, default_value_t = 10)]
    timeout_secs: u64,
}

#[derive(Subcommand)]
enum Command {
    /// Learn axioms from the yes and no pairs of a dataset.
    Extract {
        #[command(flatten)]
        shared: Shared,
        /// Axiom file to write.
        #[arg(long)]
        out: PathBuf,
    },
    /// Label every pair and score against gold labels when present.
    Classify {
        #[command(flatten)]
        shared: Shared,
        /// Prediction file to write.
        #[arg(long)]
        out: PathBuf,
        /// Print proof traces to standard error.
        #[arg(long)]
        trace: bool,
        /// Abduce phrase axioms during classification.
        #[arg(long)]
        abduce: bool,
    },
    /// Score a prediction file against a dataset.
    Report {
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
    },
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse()
}

impl Shared {
    fn common(self) -> Common {
        Common {
            dataset: self.dataset,
            relations: self.relations,
            axioms: self.axioms,
            mode: self.mode,
            jobs: self.jobs,
            timeout_secs: self.timeout_secs,
        }
    }
}

fn print<T: Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("summary serializes");
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: Cli) -> Result<bool, Fatal> {
    match cli.command {
        Command::Extract { shared, out } => {
            let s = commands::extract(&shared.common(), &out)?;
            print(&s.report);
            Ok(s.partial)
        }
        Command::Classify { shared, out, trace, abduce } => {
            let s = commands::classify_cmd(&shared.common(), &out, trace, abduce)?;
            print(&s.report);
            Ok(s.partial)
        }
        Command::Report { predictions, dataset } => {
            print(&commands::report(&predictions, &dataset)?);
            Ok(false)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
