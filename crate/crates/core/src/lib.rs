//! Streaming time-series classification against a governing pattern of
//! per-class principal curves.
//!
//! A pattern is fitted offline from labelled data ([`clpc`]); each incoming
//! window is then aligned to it by a rigid time shift ([`matching`]),
//! classified by the nearest curve ([`classifier`]), and a deterministic,
//! budgeted policy decides whether to ask for the true label
//! ([`sampling`]). Revealed labels move the curves online.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod clpc;
pub mod harness;
pub mod matching;
pub mod metrics;
pub mod model;
pub mod sampling;

pub use classifier::{online_update, predict_label, LearningConfig, PredictionOutcome};
pub use clpc::{fit_clpc, fit_governing_pattern, prune_low_angle, FitConfig};
pub use matching::{match_offset, similarity_score, MatchConfig, MatchResult, Window};
pub use model::{
    project_nearest, project_onto_curve, project_onto_segment, CurvePoint, GoverningPattern,
    PrincipalCurve, Projection, TimedSample,
};
pub use sampling::{
    calibrate_threshold, decide_query, noise_trigger_rate, BudgetState, QueryConfig, QueryStrategy,
    SimilarityHistory,
};
