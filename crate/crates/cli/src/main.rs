//! `readcompat`: readability compatibility cross-runs from the command line.

mod commands;
mod heatmap;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use readcompat_core::Error;

#[derive(Parser, Debug)]
#[command(
    name = "readcompat",
    version,
    about = "Cross-corpus readability compatibility toolkit"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Seed for every random choice; printed on each run.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Overwrite existing output files.
    #[arg(long, global = true)]
    pub force: bool,
    /// Histogram bins for RJSD.
    #[arg(long, global = true, default_value_t = readcompat_core::compat::DEFAULT_BINS)]
    pub bins: usize,
    /// Easy-word list (one word per line) replacing the embedded list.
    #[arg(long, global = true)]
    pub easy_words: Option<PathBuf>,
    /// Word embeddings in GloVe text format; required for D and ALL features.
    #[arg(long, global = true)]
    pub embeddings: Option<PathBuf>,
    /// A sentence with more words than this counts as long.
    #[arg(long, global = true, default_value_t = readcompat_core::features::DEFAULT_LONG_SENTENCE_THRESHOLD)]
    pub long_sentence_threshold: usize,
    /// Tagger lexicon (word<TAB>TAG lines) replacing the embedded one.
    #[arg(long, global = true)]
    pub lexicon: Option<PathBuf>,
    /// Abbreviation list replacing the embedded one.
    #[arg(long, global = true)]
    pub abbreviations: Option<PathBuf>,
    /// Corpus layout: auto, jsonl or leveled-dirs.
    #[arg(long, global = true, default_value = "auto")]
    pub format: String,
}

#[derive(Args, Debug, Clone)]
pub struct PipelineArgs {
    /// Feature set: L, D or ALL.
    #[arg(long, default_value = "L")]
    pub features: String,
    /// Learner: softmax or gbdt.
    #[arg(long, default_value = "softmax")]
    pub model: String,
    /// softmax: step size.
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// softmax: passes over the data.
    #[arg(long)]
    pub epochs: Option<usize>,
    /// softmax: L2 penalty.
    #[arg(long)]
    pub l2: Option<f64>,
    /// softmax: mini-batch size.
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// gbdt: boosting rounds.
    #[arg(long)]
    pub trees: Option<usize>,
    /// gbdt: maximum tree depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// gbdt: shrinkage applied to each tree.
    #[arg(long)]
    pub shrinkage: Option<f64>,
    /// gbdt: maximum histogram bins per feature.
    #[arg(long)]
    pub max_bins: Option<usize>,
    /// gbdt: L2 penalty on leaf values.
    #[arg(long)]
    pub lambda: Option<f64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Readability formula profile and per-level quartiles of a corpus.
    Formulas {
        corpus: PathBuf,
        /// Restrict the distribution files to these formulas.
        #[arg(long = "formula")]
        formulas: Vec<String>,
    },
    /// Write the feature matrix of a corpus.
    Features {
        corpus: PathBuf,
        /// Feature set: L, D or ALL.
        #[arg(long, default_value = "L")]
        features: String,
    },
    /// Fit a model on a corpus and save it.
    Train {
        corpus: PathBuf,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Also run stratified k-fold cross-validation.
        #[arg(long)]
        cv_folds: Option<usize>,
    },
    /// Score a saved model on a corpus.
    Eval { model: PathBuf, corpus: PathBuf },
    /// Train on every corpus, predict every corpus, and score all pairs.
    Crossrun {
        #[arg(required = true, num_args = 2..)]
        corpora: Vec<PathBuf>,
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Leave source = target cells out of the metric correlation.
        #[arg(long)]
        exclude_diagonal: bool,
        /// Shuffles for correlation p-values.
        #[arg(long, default_value_t = readcompat_core::compat::DEFAULT_PERMUTATIONS)]
        permutations: usize,
    },
    /// Correlate the metrics of one or more compatibility reports.
    Correlate {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        exclude_diagonal: bool,
        #[arg(long, default_value_t = readcompat_core::compat::DEFAULT_PERMUTATIONS)]
        permutations: usize,
    },
    /// Generate a synthetic leveled corpus.
    Synth {
        #[arg(long, default_value = "synth")]
        name: String,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 50)]
        per_level: usize,
        /// Comma-separated documents per level, overriding --per-level.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<usize>>,
        /// Permute levels (no level keeps its texts) for a negative control.
        #[arg(long)]
        shuffle_labels: bool,
    },
    /// Render SVG heatmaps from a compatibility report.
    Heatmap {
        report: PathBuf,
        /// rjsd, rrnss or ndcg; all three when omitted.
        #[arg(long)]
        metric: Option<String>,
    },
    /// Train toy word embeddings on one or more corpora.
    Embed {
        #[arg(required = true)]
        corpora: Vec<PathBuf>,
        #[arg(long, default_value_t = 50)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value_t = 25)]
        epochs: usize,
        #[arg(long, default_value_t = 0.05)]
        learning_rate: f64,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 2,
        Error::Validation(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
