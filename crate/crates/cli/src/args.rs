use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hcr_core::indicators::DEFAULT_AGGREGATION_THRESHOLD;
use hcr_core::ingest::DEFAULT_WINDOW_YEARS;
use hcr_core::rank::{DEFAULT_CLUSTER_EPSILON, DEFAULT_TOP_PER_FIELD};
use hcr_core::ratio::DEFAULT_DATA_DENOMINATOR;
use hcr_core::OutputFormat;

#[derive(Debug, Parser)]
#[command(
    name = "hcr",
    version,
    about = "Field-normalized ranking of highly cited researchers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Total-citation (T) and top-researcher (H) ratios plus the divisor table.
    Ratios(Opts),
    /// H ratios and the aggregated top-k vectors behind them.
    Hratios(Opts),
    /// Power-law and two-thirds fits of H against T.
    Fit(Opts),
    /// Merged multidisciplinary list and its leader summary.
    Rank(Opts),
    /// Per-researcher CPP, h-index, CPMP and aggregation flag.
    Indicators(Opts),
    /// Every output above plus a manifest, written to --out.
    Report(Opts),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ratios(_) => "ratios",
            Command::Hratios(_) => "hratios",
            Command::Fit(_) => "fit",
            Command::Rank(_) => "rank",
            Command::Indicators(_) => "indicators",
            Command::Report(_) => "report",
        }
    }

    pub fn opts(&self) -> &Opts {
        match self {
            Command::Ratios(o)
            | Command::Hratios(o)
            | Command::Fit(o)
            | Command::Rank(o)
            | Command::Indicators(o)
            | Command::Report(o) => o,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Markdown,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Markdown => OutputFormat::Markdown,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CpmpModeArg {
    HIndex,
    Threshold,
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    /// Monthly top-k snapshots (date,esi_field,rank,name,papers,citations).
    #[arg(long)]
    pub snapshots: Option<PathBuf>,
    /// Yearly broad-field citation totals (year,nsf_field,total_citations).
    #[arg(long)]
    pub totals: Option<PathBuf>,
    /// Fine-to-broad field mapping (esi_field,nsf_field). Defaults to the bundled mapping.
    #[arg(long)]
    pub mapping: Option<PathBuf>,
    /// Explicit divisor table (esi_field,divisor_num,divisor_den); overrides --preset.
    #[arg(long, conflicts_with = "preset")]
    pub divisors: Option<PathBuf>,
    /// Per-field lists in the published list's layout.
    #[arg(long)]
    pub fixture: Option<PathBuf>,
    /// Per-paper citation counts (name,paper_id,citations).
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// (T, H) pairs to fit (field,T,H).
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Use the bundled data for every input not given explicitly.
    #[arg(long)]
    pub bundled: bool,

    /// Divisor preset: table2, two_thirds, appendix or data.
    #[arg(long)]
    pub preset: Option<String>,
    /// Denominator the `data` preset snaps divisors to.
    #[arg(long, default_value_t = DEFAULT_DATA_DENOMINATOR)]
    pub data_denominator: u64,
    /// Truncate every per-field list (and every snapshot list) to this many entries.
    #[arg(long)]
    pub top_k: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_TOP_PER_FIELD)]
    pub top_per_field: usize,
    /// Relative score gap that starts a new cluster.
    #[arg(long, default_value_t = DEFAULT_CLUSTER_EPSILON)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = CpmpModeArg::HIndex)]
    pub cpmp_mode: CpmpModeArg,
    /// Citation threshold for `--cpmp-mode threshold`.
    #[arg(long)]
    pub cpmp_threshold: Option<f64>,
    /// Papers per year at or above which a name is flagged as aggregated.
    #[arg(long, default_value_t = DEFAULT_AGGREGATION_THRESHOLD)]
    pub agg_threshold: f64,
    /// Length in years of the citation window each snapshot covers.
    #[arg(long, default_value_t = DEFAULT_WINDOW_YEARS)]
    pub window_years: f64,

    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    pub format: FormatArg,
    /// Output directory. Without it the primary table goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
