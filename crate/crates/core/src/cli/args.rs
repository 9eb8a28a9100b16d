//! Command-line flags. Every flag can also be set from a TOML config file
//! using the long flag name as key; flags win over the file.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "artindex",
    version,
    about = "Price indexes for paintings and monotonicity audits"
)]
pub struct Cli {
    /// TOML file whose keys mirror the long flag names.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute an index series.
    Index(IndexArgs),
    /// Fit the hedonic log-price regression.
    Fit(FitArgs),
    /// Split a two-period time-dummy index into price ratio and θ.
    Decompose(DecomposeArgs),
    /// Audit an index method for monotonicity violations.
    Monotonicity(MonotonicityArgs),
    /// Rebuild the bundled example's tables and figure data and check them.
    Reproduce(ReproduceArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Index(_) => "index",
            Command::Fit(_) => "fit",
            Command::Decompose(_) => "decompose",
            Command::Monotonicity(_) => "monotonicity",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodArg {
    Npgm,
    Hpm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Table,
    Json,
    Plot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Single,
    Grid,
    Random,
}

macro_rules! merge_options {
    ($lhs:expr, $rhs:expr; $($field:ident),+ $(,)?) => {
        $( if $lhs.$field.is_none() { $lhs.$field = $rhs.$field.clone(); } )+
    };
}

/// Input file and its column layout. Without `--data` the bundled fixture is used.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct DataArgs {
    /// Sale-record CSV file.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub id_col: Option<String>,
    #[arg(long)]
    pub period_col: Option<String>,
    #[arg(long)]
    pub price_col: Option<String>,
    #[arg(long, conflicts_with_all = ["height_col", "width_col"])]
    pub area_col: Option<String>,
    #[arg(long, requires = "width_col")]
    pub height_col: Option<String>,
    #[arg(long, requires = "height_col")]
    pub width_col: Option<String>,
    /// Aspect-ratio column; computed as height/width when omitted with dimensions.
    #[arg(long)]
    pub ratio_col: Option<String>,
    /// Additional numeric characteristic columns.
    #[arg(long, value_delimiter = ',')]
    pub extra_cols: Option<Vec<String>>,
    #[arg(long)]
    pub delimiter: Option<char>,
    #[arg(long)]
    pub decimal_separator: Option<char>,
    /// Input has no header row; columns are addressed by 0-based position.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub no_header: Option<bool>,
    /// Explicit period ordering, e.g. `A,B`.
    #[arg(long, value_delimiter = ',')]
    pub period_order: Option<Vec<String>>,
}

impl DataArgs {
    pub fn merge(&mut self, other: &Self) {
        merge_options!(self, other; data, id_col, period_col, price_col, area_col, height_col,
            width_col, ratio_col, extra_cols, delimiter, decimal_separator, no_header, period_order);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    pub output: Option<PathBuf>,
}

impl OutputArgs {
    pub fn merge(&mut self, other: &Self) {
        merge_options!(self, other; format, output);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct IndexArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    /// Base period; defaults to the first period.
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long)]
    pub base_value: Option<f64>,
    /// Hedonic regressors for `--method hpm`.
    #[arg(long, value_delimiter = ',')]
    pub regressors: Option<Vec<String>>,
}

impl IndexArgs {
    pub fn merge(&mut self, other: &Self) {
        self.data.merge(&other.data);
        self.out.merge(&other.out);
        merge_options!(self, other; method, base, base_value, regressors);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct FitArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_delimiter = ',')]
    pub regressors: Option<Vec<String>>,
    /// Reference period whose dummy is omitted; defaults to the first period.
    #[arg(long)]
    pub reference: Option<String>,
}

impl FitArgs {
    pub fn merge(&mut self, other: &Self) {
        self.data.merge(&other.data);
        self.out.merge(&other.out);
        merge_options!(self, other; regressors, reference);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct DecomposeArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_delimiter = ',')]
    pub regressors: Option<Vec<String>>,
    #[arg(long)]
    pub period0: Option<String>,
    #[arg(long)]
    pub period1: Option<String>,
}

impl DecomposeArgs {
    pub fn merge(&mut self, other: &Self) {
        self.data.merge(&other.data);
        self.out.merge(&other.out);
        merge_options!(self, other; regressors, period0, period1);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct MonotonicityArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputArgs,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    #[arg(long)]
    pub base: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub regressors: Option<Vec<String>>,
    /// Observation to scale in single mode.
    #[arg(long)]
    pub obs: Option<String>,
    /// Price multiplier in single mode.
    #[arg(long)]
    pub multiplier: Option<f64>,
    /// Multipliers for grid mode; defaults to 1.1,1.2,…,3.0.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Required in random mode.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Also report the period/characteristic correlation for this characteristic.
    #[arg(long, value_name = "CHARACTERISTIC")]
    pub melser: Option<String>,
}

impl MonotonicityArgs {
    pub fn merge(&mut self, other: &Self) {
        self.data.merge(&other.data);
        self.out.merge(&other.out);
        merge_options!(self, other; method, mode, base, regressors, obs, multiplier, grid,
            trials, seed, melser);
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", default)]
pub struct ReproduceArgs {
    /// Directory receiving tables, figure data and the summary.
    #[arg(long, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// Replacement for the bundled A/B fixture (same layout).
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
}

impl ReproduceArgs {
    pub fn merge(&mut self, other: &Self) {
        merge_options!(self, other; out_dir, data, format);
    }
}
