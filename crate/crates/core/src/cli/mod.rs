//! Command-line surface: argument definitions, config-file merging, exit codes.
//!
//! Exit codes: 0 success, 2 usage, 3 input parse, 4 numeric failure.

mod commands;
mod roster;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use roster::{parse_roster, RosterEntry, RosterKind};

use crate::baselines::BaselineError;
use crate::descriptors::{MatrixError, ScalerError};
use crate::dmpnn::MpnnError;
use crate::embed::EmbedError;
use crate::molgraph::CorpusError;
use crate::stats::StatsError;
use crate::tensor::TensorError;
use crate::train::{Task, TrainError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERIC: i32 = 4;

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "MOLFM_WORKERS";

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn input(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERIC,
            message: message.into(),
        }
    }

    /// Prefixes the message with a file or row location.
    pub fn context(self, at: impl std::fmt::Display) -> Self {
        CliError {
            code: self.code,
            message: format!("{at}: {}", self.message),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<TensorError> for CliError {
    fn from(e: TensorError) -> Self {
        CliError::numeric(e.to_string())
    }
}

impl From<MpnnError> for CliError {
    fn from(e: MpnnError) -> Self {
        match e {
            MpnnError::Config(_) => CliError::usage(e.to_string()),
            MpnnError::Params(_) => CliError::input(e.to_string()),
            MpnnError::Tensor(t) => t.into(),
        }
    }
}

impl From<TrainError> for CliError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::NonFinite(_) => CliError::numeric(e.to_string()),
            TrainError::Config(_) => CliError::usage(e.to_string()),
            TrainError::Mpnn(m) => m.into(),
            TrainError::Tensor(t) => t.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Train(t) => t.into(),
            _ => CliError::input(e.to_string()),
        }
    }
}

impl From<ScalerError> for CliError {
    fn from(e: ScalerError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<MatrixError> for CliError {
    fn from(e: MatrixError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        CliError::input(e.to_string())
    }
}

impl From<StatsError> for CliError {
    fn from(e: StatsError) -> Self {
        match e {
            StatsError::NoConvergence(_) | StatsError::Replicate { .. } => {
                CliError::numeric(e.to_string())
            }
            StatsError::Invalid(_) | StatsError::Format(_) | StatsError::Io(_) => {
                CliError::input(e.to_string())
            }
        }
    }
}

impl From<EmbedError> for CliError {
    fn from(e: EmbedError) -> Self {
        match e {
            EmbedError::NonFinite(_) => CliError::numeric(e.to_string()),
            EmbedError::Invalid(_) => CliError::usage(e.to_string()),
            EmbedError::Format(_) | EmbedError::Io(_) => CliError::input(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "molfm",
    version,
    about = "Descriptor pre-training, fine-tuning and benchmarking for molecular D-MPNNs"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute descriptors for a SMILES corpus into a CHMD matrix.
    Featurize(FeaturizeArgs),
    /// Pre-train a D-MPNN on standardized descriptors.
    Pretrain(PretrainArgs),
    /// Fine-tune a checkpoint (or a fresh network) on a labeled CSV.
    Finetune(FinetuneArgs),
    /// Predict with a fine-tuned checkpoint.
    Predict(PredictArgs),
    /// Run every (benchmark, model, seed) replicate of a suite.
    Benchmark(BenchmarkArgs),
    /// Tukey HSD winners, win rates and cliff consistency from a results CSV.
    Report(ReportArgs),
    /// Write learned or Morgan fingerprints as CSV.
    Fingerprint(FingerprintArgs),
    /// Sort chemical series by cosine distance and project embeddings with t-SNE.
    Project(ProjectArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum TaskArg {
    Regression,
    BinaryClassification,
}

impl From<TaskArg> for Task {
    fn from(t: TaskArg) -> Task {
        match t {
            TaskArg::Regression => Task::Regression,
            TaskArg::BinaryClassification => Task::BinaryClassification,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitArg {
    Pca,
    Random,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FeaturizeArgs {
    /// SMILES corpus, one molecule per line with an optional id.
    #[arg(long)]
    pub input: PathBuf,
    /// CHMD output path.
    #[arg(long)]
    pub output: PathBuf,
    /// Also write the matrix as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also fit a scaler+PCA bundle on the matrix (for the PCA+MLP baseline).
    #[arg(long)]
    pub pca: Option<PathBuf>,
    /// Cumulative explained variance the PCA keeps.
    #[arg(long, default_value_t = 0.95)]
    pub variance_threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PretrainArgs {
    /// SMILES corpus.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Descriptor matrix aligned with the corpus; computed when omitted.
    #[arg(long)]
    pub descriptors: Option<PathBuf>,
    /// CHMC output path.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON file whose keys override defaults (flags given on the command line win).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value_t = 128)]
    pub hidden_size: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 3)]
    pub ffn_layers: usize,
    #[arg(long, default_value_t = 128)]
    pub ffn_hidden: usize,
    #[arg(long, default_value_t = 30)]
    pub epochs: usize,
    #[arg(long, default_value_t = 50)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr: f64,
    #[arg(long, default_value_t = 0.15)]
    pub mask_fraction: f64,
    /// Train invalid descriptor cells towards 0 instead of masking them.
    #[arg(long)]
    pub no_validity_mask: bool,
    /// Use every valid cell in every step.
    #[arg(long)]
    pub no_random_mask: bool,
    #[arg(long, default_value_t = 0.1)]
    pub val_fraction: f64,
    #[arg(long, default_value_t = 2)]
    pub warmup_epochs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FinetuneArgs {
    /// Labeled CSV (`smiles,target[,split]`); rows marked `test` are not used.
    #[arg(long)]
    pub data: PathBuf,
    /// Pre-trained CHMC; a fresh network is initialized when omitted.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Fitted CHMC output path.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON file whose keys override defaults (flags given on the command line win).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TaskArg::Regression)]
    pub task: TaskArg,
    #[arg(long, default_value_t = 100)]
    pub epochs: usize,
    #[arg(long, default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub lr_head: f64,
    /// Message-passing learning rate (defaults to lr_head / 10).
    #[arg(long)]
    pub lr_mp: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub val_fraction: f64,
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long)]
    pub freeze_mp: bool,
    #[arg(long, default_value_t = 2)]
    pub warmup_epochs: usize,
    /// Architecture for a fresh network (ignored with --checkpoint).
    #[arg(long, default_value_t = 128)]
    pub hidden_size: usize,
    #[arg(long, default_value_t = 3)]
    pub depth: usize,
    #[arg(long, default_value_t = 3)]
    pub ffn_layers: usize,
    #[arg(long, default_value_t = 128)]
    pub ffn_hidden: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PredictArgs {
    /// Fine-tuned CHMC.
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// SMILES corpus, or a CSV with a `smiles` column (by `.csv` extension).
    #[arg(long)]
    pub input: PathBuf,
    /// Prediction CSV `id,smiles,prediction`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchmarkArgs {
    /// Suite JSON listing benchmarks.
    #[arg(long)]
    pub suite: PathBuf,
    /// Roster JSON listing models.
    #[arg(long)]
    pub roster: PathBuf,
    /// Results CSV output path.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON file whose keys override defaults (flags given on the command line win).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Replicates per (benchmark, model); seeds run 1..=n.
    #[arg(long, default_value_t = 5)]
    pub replicates: u64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReportArgs {
    /// Results CSV from `benchmark`.
    #[arg(long)]
    pub results: PathBuf,
    /// Directory for report files.
    #[arg(long)]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct FingerprintArgs {
    /// SMILES corpus.
    #[arg(long)]
    pub input: PathBuf,
    /// Embedding CSV `id,f0,f1,...`.
    #[arg(long)]
    pub output: PathBuf,
    /// CHMC whose encoder produces learned fingerprints.
    #[arg(long, conflicts_with = "morgan", required_unless_present = "morgan")]
    pub checkpoint: Option<PathBuf>,
    /// Morgan count fingerprints instead of learned ones.
    #[arg(long)]
    pub morgan: bool,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 2048)]
    pub width: usize,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ProjectArgs {
    /// Series JSON `[{name?, lead, members}]`; embedded with --checkpoint or --morgan.
    #[arg(
        long,
        conflicts_with = "embeddings",
        required_unless_present = "embeddings"
    )]
    pub series: Option<PathBuf>,
    /// Embedding CSV from `fingerprint` (no series labels).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// CHMC whose encoder embeds the series.
    #[arg(long, conflicts_with = "morgan")]
    pub checkpoint: Option<PathBuf>,
    /// Embed the series with Morgan count fingerprints.
    #[arg(long)]
    pub morgan: bool,
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value_t = 2048)]
    pub width: usize,
    /// Projection CSV `id,x,y,series_label`.
    #[arg(long)]
    pub output: PathBuf,
    /// JSON file whose keys override defaults (flags given on the command line win).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Effective neighbour count; must be below the number of points.
    #[arg(long, default_value_t = 30.0)]
    pub perplexity: f64,
    #[arg(long, default_value_t = 1000)]
    pub iterations: usize,
    #[arg(long, default_value_t = 200.0)]
    pub learning_rate: f64,
    /// Factor applied to P during the first 250 iterations.
    #[arg(long, default_value_t = 12.0)]
    pub early_exaggeration: f64,
    #[arg(long, value_enum, default_value_t = InitArg::Pca)]
    pub init: InitArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Overlays keys from a JSON config file onto parsed arguments, except those
/// given explicitly on the command line or through the environment.
fn merge_config<T: Serialize + DeserializeOwned>(
    args: T,
    matches: &ArgMatches,
    config: Option<&Path>,
) -> CliResult<T> {
    let Some(path) = config else { return Ok(args) };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let file: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let mut current = match serde_json::to_value(&args).expect("arguments serialize") {
        serde_json::Value::Object(m) => m,
        _ => unreachable!("argument structs serialize to objects"),
    };
    for (key, value) in file {
        if !current.contains_key(&key) {
            return Err(CliError::usage(format!(
                "{}: unknown key '{key}'",
                path.display()
            )));
        }
        let explicit = matches!(
            matches.value_source(&key),
            Some(ValueSource::CommandLine | ValueSource::EnvVariable)
        );
        if !explicit {
            current.insert(key, value);
        }
    }
    serde_json::from_value(serde_json::Value::Object(current))
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Writes `<output>.config.json` with the fully resolved arguments.
pub(crate) fn echo_config<T: Serialize>(
    output: &Path,
    command: &str,
    args: &T,
    workers: usize,
) -> CliResult<()> {
    let mut name = output.as_os_str().to_owned();
    name.push(".config.json");
    let value = serde_json::json!({ "command": command, "workers": workers, "args": args });
    let text = serde_json::to_string_pretty(&value).expect("config serializes");
    write_file(Path::new(&name), text.as_bytes())
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code. Errors are printed to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    let sub = matches
        .subcommand()
        .map(|(_, m)| m)
        .expect("subcommand is required");
    match dispatch(cli, sub) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

fn dispatch(cli: Cli, sub: &ArgMatches) -> CliResult<()> {
    let workers = match cli.workers {
        Some(0) => return Err(CliError::usage("--workers must be at least 1")),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build_global();
    match cli.command {
        Command::Featurize(a) => commands::featurize(a, workers),
        Command::Pretrain(a) => {
            let cfg = a.config.clone();
            commands::pretrain(merge_config(a, sub, cfg.as_deref())?, workers)
        }
        Command::Finetune(a) => {
            let cfg = a.config.clone();
            commands::finetune(merge_config(a, sub, cfg.as_deref())?, workers)
        }
        Command::Predict(a) => commands::predict(a, workers),
        Command::Benchmark(a) => {
            let cfg = a.config.clone();
            commands::benchmark(merge_config(a, sub, cfg.as_deref())?, workers)
        }
        Command::Report(a) => commands::report(a, workers),
        Command::Fingerprint(a) => commands::fingerprint(a, workers),
        Command::Project(a) => {
            let cfg = a.config.clone();
            commands::project(merge_config(a, sub, cfg.as_deref())?, workers)
        }
    }
}
