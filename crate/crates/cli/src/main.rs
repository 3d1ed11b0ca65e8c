use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hoeffding::harness::prequential::DEFAULT_WINDOW;
use hoeffding::tree::params::{
    DEFAULT_DELTA, DEFAULT_LAMBDA, DEFAULT_MAX_NODES, DEFAULT_N_MIN, DEFAULT_N_PT,
    DEFAULT_N_QUANTILES, DEFAULT_TAU,
};
use hoeffding::{ColumnRef, CsvSchema, DatasetSpec, Hyperparams, Scalar};

mod commands;

/// Streaming Hoeffding tree: data generation, prequential runs, bundle
/// processing and model-size tables.
#[derive(Debug, Parser)]
#[command(name = "htree", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a Gaussian-cluster dataset as CSV (features, then label).
    Gen(GenArgs),
    /// Infer-then-train evaluation over a synthetic or CSV stream.
    Run(RunArgs),
    /// Feed a CSV through a saved tree in bundles and print one prediction per row.
    Process(ProcessArgs),
    /// Serialized model size over a grid of arena sizes, dims and classes.
    Mem(MemArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    #[value(name = "32")]
    F32,
    #[value(name = "64")]
    F64,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    /// Number of clusters (= classes).
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long)]
    pub dims: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Per-axis standard deviation of each cluster.
    #[arg(long)]
    pub spread: Option<f64>,
    /// Centers are drawn uniformly from [-box, box] per axis.
    #[arg(long = "box")]
    pub center_box: Option<f64>,
}

impl ClusterArgs {
    fn any_set(&self) -> bool {
        self.clusters.is_some()
            || self.dims.is_some()
            || self.samples.is_some()
            || self.spread.is_some()
            || self.center_box.is_some()
    }

    /// Fills unset fields from `fallback` (clusters, dims).
    pub fn spec(&self, seed: u64, fallback: (usize, usize)) -> DatasetSpec {
        let mut spec = DatasetSpec::new(
            self.clusters.unwrap_or(fallback.0),
            self.dims.unwrap_or(fallback.1),
            self.samples.unwrap_or(10_000),
            seed,
        );
        if let Some(s) = self.spread {
            spec.cluster_spread = s;
        }
        if let Some(b) = self.center_box {
            spec.center_box = b;
        }
        spec
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "32")]
    pub precision: Precision,
}

#[derive(Debug, Args)]
pub struct CsvArgs {
    /// Read samples from this CSV file instead of generating them.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Label column, by zero-based index or header name. Defaults to the last column.
    #[arg(long)]
    pub label: Option<String>,
    /// Feature columns (comma separated). Defaults to every other column.
    #[arg(long, value_delimiter = ',')]
    pub features: Vec<String>,
    /// Feature columns to code by first appearance (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
    /// The first row holds column names.
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value = ",")]
    pub delimiter: char,
    /// Labels are integer class codes rather than names.
    #[arg(long)]
    pub numeric_labels: bool,
    /// Number of classes the tree is built for. Defaults to the labels seen.
    #[arg(long)]
    pub classes: Option<usize>,
}

impl CsvArgs {
    fn any_schema_set(&self) -> bool {
        self.label.is_some()
            || !self.features.is_empty()
            || !self.categorical.is_empty()
            || self.header
            || self.delimiter != ','
            || self.numeric_labels
    }

    pub fn schema(&self) -> anyhow::Result<CsvSchema> {
        let label = match &self.label {
            Some(l) => l.parse().expect("infallible"),
            None => ColumnRef::Last,
        };
        let mut schema = CsvSchema::new(label);
        schema.has_header = self.header;
        schema.delimiter = u8::try_from(self.delimiter)
            .ok()
            .filter(u8::is_ascii)
            .ok_or_else(|| {
                usage(format!(
                    "delimiter {:?} is not a single ASCII byte",
                    self.delimiter
                ))
            })?;
        schema.features = self
            .features
            .iter()
            .map(|c| c.parse().expect("infallible"))
            .collect();
        schema.categorical = self
            .categorical
            .iter()
            .map(|c| c.parse().expect("infallible"))
            .collect();
        schema.max_classes = self.classes;
        schema.numeric_labels = self.numeric_labels;
        Ok(schema)
    }
}

/// Unset flags take the reference defaults, or the snapshot's values when
/// continuing from one (setting them together with a snapshot is an error).
#[derive(Debug, Args)]
pub struct HyperArgs {
    /// Split confidence [default: 0.001]
    #[arg(long)]
    pub delta: Option<f64>,
    /// Quantile sketch step [default: 0.01]
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Tie-break threshold [default: 0.05]
    #[arg(long)]
    pub tau: Option<f64>,
    /// Samples between split attempts [default: 200]
    #[arg(long)]
    pub n_min: Option<usize>,
    /// Candidate thresholds per attribute [default: 10]
    #[arg(long)]
    pub n_pt: Option<usize>,
    /// Quantiles per sketch [default: 16]
    #[arg(long)]
    pub n_quantiles: Option<usize>,
    /// Node arena capacity [default: 2047]
    #[arg(long)]
    pub max_nodes: Option<usize>,
}

impl HyperArgs {
    fn any_set(&self) -> bool {
        self.delta.is_some()
            || self.lambda.is_some()
            || self.tau.is_some()
            || self.n_min.is_some()
            || self.n_pt.is_some()
            || self.n_quantiles.is_some()
            || self.max_nodes.is_some()
    }

    pub fn params<F: Scalar>(&self, dims: usize, classes: usize) -> Hyperparams<F> {
        Hyperparams {
            delta: F::of(self.delta.unwrap_or(DEFAULT_DELTA)),
            lambda: F::of(self.lambda.unwrap_or(DEFAULT_LAMBDA)),
            tau: F::of(self.tau.unwrap_or(DEFAULT_TAU)),
            n_min: self.n_min.unwrap_or(DEFAULT_N_MIN),
            n_pt: self.n_pt.unwrap_or(DEFAULT_N_PT),
            n_quantiles: self.n_quantiles.unwrap_or(DEFAULT_N_QUANTILES),
            max_nodes: self.max_nodes.unwrap_or(DEFAULT_MAX_NODES),
            dims,
            classes,
        }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub cluster: ClusterArgs,
    #[command(flatten)]
    pub csv: CsvArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    pub window: usize,
    /// Seed for the synthetic stream.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the report as JSON to this file.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Print the JSON report on stdout instead of the table.
    #[arg(long)]
    pub json: bool,
    /// Continue from a saved tree; its hyperparameters take precedence.
    #[arg(long)]
    pub snapshot_in: Option<PathBuf>,
    #[arg(long)]
    pub snapshot_out: Option<PathBuf>,
    /// Scalar width of a fresh tree; a snapshot brings its own.
    #[arg(long, value_enum, default_value = "32")]
    pub precision: Precision,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Predict, then learn from every row.
    Train,
    /// Predict only; the tree is left unchanged.
    Infer,
}

#[derive(Debug, Args)]
pub struct ProcessArgs {
    #[command(flatten)]
    pub csv: CsvArgs,
    #[arg(long)]
    pub snapshot_in: PathBuf,
    #[arg(long)]
    pub snapshot_out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "infer")]
    pub mode: Mode,
    /// Rows per bundle.
    #[arg(long, default_value_t = 256)]
    pub bundle_size: usize,
    /// Write predictions here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct MemArgs {
    /// Arena sizes (comma separated). Defaults to 1,2,4,...,128.
    #[arg(long, value_delimiter = ',')]
    pub max_nodes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [3, 100])]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [5, 10])]
    pub classes: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_N_QUANTILES)]
    pub n_quantiles: usize,
    #[arg(long, value_enum, default_value = "table")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "32")]
    pub precision: Precision,
}

/// Bad flag combination: exit code 1, like a parse failure.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(&a),
        Command::Run(a) => {
            if a.csv.csv.is_some() && a.cluster.any_set() {
                Err(usage(
                    "--csv cannot be combined with synthetic dataset flags",
                ))
            } else if a.snapshot_in.is_some() && a.hyper.any_set() {
                Err(usage(
                    "hyperparameter flags cannot be combined with --snapshot-in",
                ))
            } else if a.csv.csv.is_none() && (a.csv.any_schema_set() || a.csv.classes.is_some()) {
                Err(usage("CSV schema flags need --csv"))
            } else {
                commands::run(&a)
            }
        }
        Command::Process(a) => match a.csv.csv {
            None => Err(usage("process needs --csv")),
            Some(_) => commands::process(&a),
        },
        Command::Mem(a) => commands::mem(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<UsageError>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}
