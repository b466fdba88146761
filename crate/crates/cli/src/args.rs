use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "logmin",
    version,
    about = "Mine call logs into frequency, calendar, time-of-day and portability reports"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Precedence: built-in defaults, then the
/// `--config` file, then these flags.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Input log (CSV or JSON-lines, detected from content); `-` reads stdin
    #[arg(long = "in", value_name = "PATH", global = true)]
    pub input: Option<PathBuf>,
    /// Write output here instead of stdout
    #[arg(long, value_name = "PATH", global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<OutputFormat>,
    /// Flat `key = value` file; keys are flag names without dashes
    #[arg(long, value_name = "PATH", global = true)]
    pub config: Option<PathBuf>,
    /// Seed for k-means and for `gen`
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Cluster count
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Frequency reference time (epoch seconds); default newest call minus 30 days
    #[arg(long, value_name = "EPOCH", global = true)]
    pub tr: Option<u64>,
    /// Boundary look-back window
    #[arg(long, value_name = "SECS", global = true)]
    pub tp: Option<u64>,
    /// Boundary look-ahead window
    #[arg(long, value_name = "SECS", global = true)]
    pub tf: Option<u64>,
    /// Conference start/end tolerance
    #[arg(long, value_name = "SECS", global = true)]
    pub epsilon: Option<u64>,
    /// Call-count weight in the portability index
    #[arg(long, value_name = "R", global = true)]
    pub lambda: Option<f64>,
    /// Portability advice threshold
    #[arg(long, value_name = "R", global = true)]
    pub threshold: Option<f64>,
    /// `prefix,provider` CSV
    #[arg(long, value_name = "PATH", global = true)]
    pub provider_table: Option<PathBuf>,
    #[arg(long, value_name = "NAME", global = true)]
    pub current_provider: Option<String>,
    /// Country codes stripped from `+` numbers before prefix lookup, comma-separated
    #[arg(long, value_name = "CODES", global = true)]
    pub country_codes: Option<String>,
    #[arg(long, value_name = "MIN", global = true, allow_hyphen_values = true)]
    pub utc_offset: Option<i32>,
    /// Morning, afternoon, evening start hours, comma-separated
    #[arg(long, value_name = "H,H,H", global = true)]
    pub tod_boundaries: Option<String>,
    /// Pin the report timestamp (epoch seconds)
    #[arg(long, value_name = "EPOCH", global = true, allow_hyphen_values = true)]
    pub now: Option<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a log and echo it normalized (JSON-lines, or CSV with --format text)
    Ingest,
    /// Dump the mined per-call parameters
    Mine,
    #[command(subcommand)]
    Report(ReportCommand),
    /// Generate a seeded synthetic log (CSV, or JSON-lines for .jsonl or --format json)
    Gen(GenArgs),
    /// Summarize relevance sessions (`session_id,cri,pri,cii` CSV)
    EvalRelevance,
}

#[derive(Debug, Subcommand)]
pub enum ReportCommand {
    /// Calls per contact since the reference time
    Freq {
        #[arg(long, value_enum, default_value = "count")]
        mode: FreqMode,
    },
    /// Calls per month, ISO week or day
    Calendar {
        #[arg(long, value_enum, default_value = "dv")]
        view: View,
    },
    /// Morning, afternoon and evening reports
    Tod {
        #[arg(long, value_enum)]
        band: Option<Band>,
    },
    /// Number-portability advice
    Mnp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FreqMode {
    Count,
    Cluster,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum View {
    Mv,
    Wv,
    Dv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Band {
    Mr,
    Ar,
    Er,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Total calls (ignored with --clusters)
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[arg(long, default_value_t = 50)]
    pub contacts: usize,
    /// Planted per-contact call counts as `center:spread` pairs, e.g. `2:2,20:2,60:2`
    #[arg(long)]
    pub clusters: Option<String>,
    #[arg(long, default_value_t = 0.02)]
    pub conference_rate: f64,
    #[arg(long, default_value_t = 0.1)]
    pub missed_rate: f64,
    #[arg(long, default_value_t = 0.4)]
    pub outgoing_rate: f64,
    /// First possible call start (epoch seconds)
    #[arg(long)]
    pub span_start: Option<u64>,
    #[arg(long)]
    pub span_days: Option<u64>,
}
