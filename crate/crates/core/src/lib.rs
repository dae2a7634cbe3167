//! Statistical comparison of several algorithms over several datasets.
//!
//! The crate ranks a performance matrix column by column, runs the Friedman
//! omnibus test and follows up with pairwise post-hoc tests (mean-ranks, sign,
//! Wilcoxon signed-rank) under a family-wise correction. It also estimates
//! power and family-wise error by Monte Carlo, and measures how the verdict on
//! one pair moves when the surrounding pool of algorithms changes.
//!
//! Everything numeric is generic over [`Scalar`] (`f64` and `f32`); the
//! aliases below pin the common `f64` instantiations.

pub mod distributions;
pub mod error;
pub mod io;
pub mod montecarlo;
pub mod omnibus;
pub mod posthoc;
pub mod ranking;
pub mod report;
pub mod reproduce;
pub mod scalar;
pub mod stability;

pub use error::{Error, Result};
pub use montecarlo::{estimate_fwer, estimate_power, Generator};
pub use omnibus::{friedman, DecisionRule, Method};
pub use posthoc::{
    mean_ranks_statistic, mean_ranks_test, pairwise_report, sign_test, wilcoxon_signed_rank,
    CorrectionKind, CorrectionPolicy, PosthocTest, SignMode,
};
pub use ranking::{rank_columns, Direction};
pub use scalar::Scalar;
pub use stability::subset_stability;

pub type PerformanceMatrix = ranking::PerformanceMatrix<f64>;
pub type PerformanceMatrixF32 = ranking::PerformanceMatrix<f32>;
pub type RankMatrix = ranking::RankMatrix<f64>;
pub type RankMatrixF32 = ranking::RankMatrix<f32>;
pub type TestOutcome = omnibus::TestOutcome<f64>;
pub type PosthocReport = posthoc::PosthocReport<f64>;
pub type PairEntry = posthoc::PairEntry<f64>;
pub type PowerScenario = montecarlo::PowerScenario<f64>;
pub type PowerEstimate = montecarlo::PowerEstimate<f64>;
pub type StabilityReport = stability::StabilityReport<f64>;
