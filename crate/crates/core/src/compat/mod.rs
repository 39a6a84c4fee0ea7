//! Agreement between difficulty systems across corpora.

mod correlation;
mod matrix;
mod metrics;

pub use correlation::{metric_correlation, pearson, pearson_test, CorrelationTable, DEFAULT_PERMUTATIONS};
pub use matrix::{compat_cell, compat_matrix, score_cell, CompatCell, CompatMatrix, Metric, Predictor, Trainer};
pub use metrics::{
    label_histogram, ndcg, normalize_level, relevance_in_predicted_order, rjsd, rrnss, to_ranks, Distribution,
    DEFAULT_BINS,
};
