//! Labelled-copy counting in fixed tournaments and expected counts under
//! the block-randomised tournament.

mod brute;
mod copies;
mod expectation;

use thiserror::Error;

use crate::sampler::SamplerError;

pub use brute::{count_hamilton_cycles, count_hamilton_paths, count_labeled_copies, BRUTE_FORCE_MAX_N, DP_MAX_N};
pub use copies::{claim_one_probability, scaled_ratio, CopyBlockStats, CopyEvaluator, DEFAULT_INJECTION_BUDGET};
pub use expectation::{
    atypical_bound, baseline, capture_window, empirical_block_averages, estimate_expected_copies, exact_expected_copies,
    exact_summary, for_each_permutation, log2_rational, pure_design_average, BlockAverages, EstimateReport, ExactSummary,
    EXACT_MAX_N,
};

#[derive(Debug, Error)]
pub enum CountingError {
    #[error("pattern has {pattern} vertices but the other input has {other}")]
    SizeMismatch { pattern: usize, other: usize },
    #[error("brute-force counting supports n <= {max}, got {n}; use the Hamilton DP or the estimator")]
    BruteForceBudget { n: usize, max: usize },
    #[error("subset DP supports n <= {max}, got {n}")]
    DpBudget { n: usize, max: usize },
    #[error("exact expectation sums n! terms and supports n <= {max}, got {n}; use the estimator")]
    ExactBudget { n: usize, max: usize },
    #[error("block {block} needs {injections} injections, budget is {budget}")]
    InjectionBudget { block: usize, injections: u64, budget: u64 },
    #[error("placement is not a permutation of the vertex set")]
    NotAPermutation,
    #[error("at least one sample is required")]
    NoSamples,
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}
