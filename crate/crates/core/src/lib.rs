//! Cross-corpus readability compatibility.
//!
//! The crate analyzes texts, extracts linguistic and embedding features,
//! trains difficulty classifiers on one corpus, predicts another, and
//! scores how well the two difficulty systems agree.

/// Version of this library, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod compat;
pub mod corpus;
pub mod embeddings;
pub mod error;
pub mod features;
pub mod formulas;
pub mod models;
pub mod pipeline;
pub mod synth;
pub mod textproc;

pub use compat::{CompatCell, CompatMatrix, Metric};
pub use corpus::{load_corpus, Corpus, CorpusFormat, Document, LabelScheme};
pub use error::{Error, Result};
pub use formulas::{EasyWords, FormulaId, TextStats};
pub use models::{EvalReport, Learner, Model, ModelSpec};
pub use pipeline::{FeaturePipeline, Resources};
pub use textproc::{DocAnalysis, TextAnalyzer};
