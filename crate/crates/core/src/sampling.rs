//! Deterministic label-query decisions driven by the similarity history,
//! capped by a per-window query budget.
//!
//! Both strategies only compare consecutive history values, so they are fed
//! `similarity = -score`: a decrease means the stream fits the pattern worse.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplingError {
    #[error("threshold {0} must be finite and >= 0")]
    InvalidThreshold(f64),
    #[error("history capacity must be at least 2, got {0}")]
    InvalidCapacity(usize),
    #[error("invalid budget: {budget} queries per {window_size} samples")]
    InvalidBudget { budget: usize, window_size: usize },
}

/// Bounded history of similarity values, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityHistory {
    values: VecDeque<f64>,
    capacity: usize,
}

impl SimilarityHistory {
    pub fn new(capacity: usize) -> Self {
        Self {
            values: VecDeque::with_capacity(capacity),
            capacity,
        }
    }

    pub fn from_values(values: &[f64], capacity: usize) -> Self {
        let mut h = Self::new(capacity);
        for &v in values {
            h.push(v);
        }
        h
    }

    pub fn push(&mut self, value: f64) {
        if self.values.len() == self.capacity {
            self.values.pop_front();
        }
        self.values.push_back(value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn values(&self) -> Vec<f64> {
        self.values.iter().copied().collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &f64> {
        self.values.iter()
    }
}

/// Counts decreases: `q = 1 + #{i : s[i] < s[i-1]}`, query when `q / L >= threshold`.
pub fn linear_query(history: &[f64], threshold: f64) -> bool {
    let len = history.len();
    if len < 2 {
        return false;
    }
    let q = 1 + history.windows(2).filter(|w| w[1] < w[0]).count();
    q as f64 / len as f64 >= threshold
}

/// Normalised penalty of the exponential strategy, `q / 2^(L-1)`.
///
/// A running coefficient `c` starts at 1, multiplies into `q` at every step,
/// then doubles after a decrease and halves otherwise. Histories shorter
/// than 2 score 0.
///
/// The score is not capped at 1: an all-decreasing history of length `L`
/// scores `2^((L-1)(L-4)/2)`, so thresholds above 1 are meaningful for
/// `L >= 5`.
pub fn exponential_score(history: &[f64]) -> f64 {
    let len = history.len();
    if len < 2 {
        return 0.0;
    }
    let mut c = 1.0f64;
    let mut q = 1.0f64;
    for w in history.windows(2) {
        q *= c;
        if w[1] < w[0] {
            c *= 2.0;
        } else {
            c /= 2.0;
        }
    }
    q / 2f64.powi(len as i32 - 1)
}

pub fn exponential_query(history: &[f64], threshold: f64) -> bool {
    if history.len() < 2 {
        return false;
    }
    exponential_score(history) >= threshold
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryStrategy {
    Linear,
    Exponential,
    /// Baseline that ignores the history and asks every
    /// `window_size / budget` samples.
    FixedPeriod,
}

impl QueryStrategy {
    /// Linear 0.6, exponential 0.5. On a 10-step history these fire for
    /// about half and a third of signal-free histories respectively, which
    /// exhausts a 30/100 budget; [`calibrate_threshold`] picks a quieter one.
    pub fn default_threshold(self) -> f64 {
        match self {
            QueryStrategy::Linear => 0.6,
            QueryStrategy::Exponential => 0.5,
            QueryStrategy::FixedPeriod => 0.0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            QueryStrategy::Linear => "linear",
            QueryStrategy::Exponential => "exponential",
            QueryStrategy::FixedPeriod => "fixed-period",
        }
    }
}

impl std::str::FromStr for QueryStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "linear" => Ok(QueryStrategy::Linear),
            "exponential" => Ok(QueryStrategy::Exponential),
            "fixed-period" => Ok(QueryStrategy::FixedPeriod),
            other => Err(format!("unknown query strategy `{other}`")),
        }
    }
}

/// Longest history for which the noise calibration enumerates every
/// sign pattern.
pub const MAX_CALIBRATION_LENGTH: usize = 24;

fn strategy_score(strategy: QueryStrategy, history: &[f64]) -> Option<f64> {
    match strategy {
        QueryStrategy::Linear => {
            let q = 1 + history.windows(2).filter(|w| w[1] < w[0]).count();
            Some(q as f64 / history.len() as f64)
        }
        QueryStrategy::Exponential => Some(exponential_score(history)),
        QueryStrategy::FixedPeriod => None,
    }
}

/// Scores of all `2^(L-1)` histories whose steps are independent fair
/// up/down moves, i.e. a similarity that carries no signal.
fn noise_scores(strategy: QueryStrategy, length: usize) -> Option<Vec<f64>> {
    if !(2..=MAX_CALIBRATION_LENGTH).contains(&length) {
        return None;
    }
    let steps = length - 1;
    let mut history = vec![0.0; length];
    (0..1u32 << steps)
        .map(|mask| {
            for i in 1..length {
                let down = mask >> (i - 1) & 1 == 1;
                history[i] = history[i - 1] + if down { -1.0 } else { 1.0 };
            }
            strategy_score(strategy, &history)
        })
        .collect()
}

/// Probability that `strategy` asks for a label when the similarity moves
/// up or down at random. `None` for the fixed-period baseline or a length
/// outside `2..=MAX_CALIBRATION_LENGTH`.
pub fn noise_trigger_rate(strategy: QueryStrategy, threshold: f64, length: usize) -> Option<f64> {
    let scores = noise_scores(strategy, length)?;
    let hits = scores.iter().filter(|&&s| s >= threshold).count();
    Some(hits as f64 / scores.len() as f64)
}

/// Smallest threshold whose [`noise_trigger_rate`] is at most `max_rate`.
pub fn calibrate_threshold(strategy: QueryStrategy, length: usize, max_rate: f64) -> Option<f64> {
    let mut scores = noise_scores(strategy, length)?;
    scores.sort_by(f64::total_cmp);
    let n = scores.len();
    // scores[i..] are the histories that trigger at threshold scores[i].
    let mut i = 0;
    while i < n {
        let v = scores[i];
        if (n - i) as f64 / n as f64 <= max_rate {
            return Some(v);
        }
        while i < n && scores[i] == v {
            i += 1;
        }
    }
    // Only a threshold above every score stays quiet.
    Some(scores[n - 1] * 2.0 + 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryConfig {
    pub strategy: QueryStrategy,
    pub threshold: f64,
    pub history_capacity: usize,
}

impl QueryConfig {
    pub fn new(strategy: QueryStrategy) -> Self {
        Self {
            strategy,
            threshold: strategy.default_threshold(),
            history_capacity: 10,
        }
    }

    pub fn validate(&self) -> Result<(), SamplingError> {
        if !(self.threshold >= 0.0 && self.threshold.is_finite()) {
            return Err(SamplingError::InvalidThreshold(self.threshold));
        }
        if self.history_capacity < 2 {
            return Err(SamplingError::InvalidCapacity(self.history_capacity));
        }
        Ok(())
    }
}

impl Default for QueryConfig {
    fn default() -> Self {
        Self::new(QueryStrategy::Linear)
    }
}

/// Query allowance: at most `budget` grants among any `window_size`
/// consecutive samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BudgetState {
    window_size: usize,
    budget: usize,
    /// Index of the next sample to be decided.
    position: usize,
    /// Granted sample indices still inside the window.
    recent: VecDeque<usize>,
}

impl BudgetState {
    pub fn new(budget: usize, window_size: usize) -> Result<Self, SamplingError> {
        if window_size == 0 || budget > window_size {
            return Err(SamplingError::InvalidBudget {
                budget,
                window_size,
            });
        }
        Ok(Self {
            window_size,
            budget,
            position: 0,
            recent: VecDeque::with_capacity(budget),
        })
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    /// Samples decided so far.
    pub fn position(&self) -> usize {
        self.position
    }

    /// Grants among the last `window_size` decided samples.
    pub fn grants_in_window(&self) -> usize {
        let p = self.position;
        self.recent.iter().filter(|&&i| i + self.window_size >= p).count()
    }

    fn expire(&mut self) {
        while self.recent.front().is_some_and(|&i| i + self.window_size <= self.position) {
            self.recent.pop_front();
        }
    }

    /// Whether the sample about to be decided may still be granted.
    pub fn has_allowance(&self) -> bool {
        let live = self
            .recent
            .iter()
            .filter(|&&i| i + self.window_size > self.position)
            .count();
        live < self.budget
    }

    fn record(&mut self, granted: bool) {
        self.expire();
        if granted {
            self.recent.push_back(self.position);
        }
        self.position += 1;
    }
}

/// What the strategy alone would do for the current sample.
pub fn strategy_wants(history: &SimilarityHistory, cfg: &QueryConfig, budget: &BudgetState) -> bool {
    let values = history.values();
    match cfg.strategy {
        QueryStrategy::Linear => linear_query(&values, cfg.threshold),
        QueryStrategy::Exponential => exponential_query(&values, cfg.threshold),
        QueryStrategy::FixedPeriod => {
            let period = (budget.window_size / budget.budget.max(1)).max(1);
            budget.budget > 0 && budget.position.is_multiple_of(period)
        }
    }
}

/// Combines the strategy with the budget and moves the budget on by one
/// sample.
pub fn decide_query(history: &SimilarityHistory, cfg: &QueryConfig, budget: &mut BudgetState) -> bool {
    let granted = strategy_wants(history, cfg, budget) && budget.has_allowance();
    budget.record(granted);
    granted
}
