use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::ingest::{ingest_csv, ColumnSpec, IngestedStream};
use super::pattern_io::PatternFile;
use super::resample::{resample, split_chronological, RateMode, Standardizer};
use super::HarnessError;
use crate::classifier::{online_update, predict_label, LearningConfig};
use crate::clpc::{fit_governing_pattern, FitConfig};
use crate::matching::{MatchConfig, Window};
use crate::metrics::{ConfusionMatrix, MetricsReport, QueryQuality};
use crate::model::{GoverningPattern, TimedSample};
use crate::sampling::{decide_query, BudgetState, QueryConfig, SimilarityHistory};

pub const REPORT_VERSION: u32 = 1;

/// Where a labelled stream comes from and how it is thinned and split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamSpec {
    pub source: PathBuf,
    #[serde(flatten)]
    pub columns: ColumnSpec,
    pub split_fraction: f64,
    pub rate: RateMode,
}

impl StreamSpec {
    pub fn new(source: impl Into<PathBuf>) -> Self {
        Self {
            source: source.into(),
            columns: ColumnSpec::default(),
            split_fraction: 0.6,
            rate: RateMode::Fixed(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub fit: FitConfig,
    pub matching: MatchConfig,
    pub learning: LearningConfig,
    pub query: QueryConfig,
    pub budget: usize,
    pub budget_window: usize,
    /// Number of most recent samples matched against the pattern.
    pub history_length: usize,
    pub repetitions: usize,
    /// Drives random resampling only.
    pub seed: u64,
    pub beta: f64,
    pub standardize: bool,
    /// Adds wall-clock time to reports, which makes them non-reproducible.
    pub record_runtime: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            fit: FitConfig::default(),
            matching: MatchConfig::default(),
            learning: LearningConfig::default(),
            query: QueryConfig::default(),
            budget: 30,
            budget_window: 100,
            history_length: 10,
            repetitions: 1,
            seed: 0,
            beta: 1.0,
            standardize: false,
            record_runtime: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: &str| Err(HarnessError::InvalidConfig(m.to_string()));
        if self.history_length < 1 {
            return bad("history_length must be >= 1");
        }
        if self.repetitions < 1 {
            return bad("repetitions must be >= 1");
        }
        if !(self.learning.alpha >= 0.0) {
            return bad("alpha must be >= 0");
        }
        if !(self.beta > 0.0) {
            return bad("beta must be > 0");
        }
        self.fit.validate()?;
        self.matching
            .validate()
            .map_err(|e| HarnessError::InvalidConfig(e.to_string()))?;
        self.query.validate()?;
        BudgetState::new(self.budget, self.budget_window)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryLogEntry {
    /// Position in the test stream.
    pub index: usize,
    pub queried: bool,
    /// Whether the revealed label contradicted the prediction; only set for
    /// granted queries.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apt: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionOutcome {
    pub metrics: MetricsReport,
    pub confusion: ConfusionMatrix,
    pub predictions: Vec<usize>,
    pub query_log: Vec<QueryLogEntry>,
    /// Highest number of granted queries inside one budget window.
    pub max_window_queries: usize,
    pub pattern: GoverningPattern,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

/// Test labels kept apart from the features so the replay loop can only
/// see one through [`HiddenLabels::reveal`].
struct HiddenLabels {
    labels: Vec<usize>,
    revealed: usize,
}

impl HiddenLabels {
    fn split(test: &[TimedSample]) -> Result<(Vec<TimedSample>, Self), HarnessError> {
        let mut labels = Vec::with_capacity(test.len());
        let mut features = Vec::with_capacity(test.len());
        for (index, s) in test.iter().enumerate() {
            labels.push(s.label.ok_or(HarnessError::MissingLabel { index })?);
            features.push(TimedSample::new(s.t, s.x.clone()));
        }
        Ok((features, Self { labels, revealed: 0 }))
    }

    fn reveal(&mut self, index: usize) -> usize {
        self.revealed += 1;
        self.labels[index]
    }

    fn into_all(self) -> Vec<usize> {
        self.labels
    }
}

/// Fits the pattern on `train` and replays `test` one sample at a time.
///
/// `num_classes` sizes the confusion matrix so classes missing from the
/// training split still show up in the scores.
pub fn run_session(
    train: &[TimedSample],
    test: &[TimedSample],
    num_classes: usize,
    cfg: &RunConfig,
) -> Result<SessionOutcome, HarnessError> {
    cfg.validate()?;
    let started = Instant::now();
    let mut pattern = fit_governing_pattern(train, &cfg.fit)?;
    let (stream, mut hidden) = HiddenLabels::split(test)?;

    let h = cfg.history_length;
    let mut history = SimilarityHistory::new(cfg.query.history_capacity);
    let mut budget = BudgetState::new(cfg.budget, cfg.budget_window)?;
    let mut queries = QueryQuality::default();
    let mut predictions = Vec::with_capacity(stream.len());
    let mut query_log = Vec::with_capacity(stream.len());
    let mut max_window_queries = 0usize;

    for i in 0..stream.len() {
        let lo = (i + 1).saturating_sub(h);
        let window = Window::new(stream[lo..=i].to_vec()).map_err(crate::classifier::ClassifierError::from)?;
        let outcome = predict_label(&window, &pattern, &cfg.matching)?;
        predictions.push(outcome.predicted_class);
        history.push(-outcome.match_result.score);

        let granted = decide_query(&history, &cfg.query, &mut budget);
        let mut apt = None;
        if granted {
            max_window_queries = max_window_queries.max(budget.grants_in_window());
            let truth = hidden.reveal(i);
            queries.record(outcome.predicted_class, truth);
            apt = Some(outcome.predicted_class != truth);
            pattern = online_update(&pattern, &outcome, truth, &cfg.learning)?;
        }
        query_log.push(QueryLogEntry {
            index: i,
            queried: granted,
            apt,
        });
    }

    debug_assert_eq!(hidden.revealed as u64, queries.total());
    let mut confusion = ConfusionMatrix::new(num_classes);
    for (truth, pred) in hidden.into_all().into_iter().zip(&predictions) {
        confusion.record(truth, *pred);
    }
    let metrics = MetricsReport::from_parts(&confusion, &queries, cfg.beta);
    Ok(SessionOutcome {
        metrics,
        confusion,
        predictions,
        query_log,
        max_window_queries,
        pattern,
        runtime_seconds: cfg.record_runtime.then(|| started.elapsed().as_secs_f64()),
    })
}

/// Thins the whole stream, splits it chronologically and optionally
/// standardizes both halves with training statistics.
pub(crate) fn prepare_split(
    samples: &[TimedSample],
    split_fraction: f64,
    rate: RateMode,
    seed: u64,
    standardize: bool,
) -> Result<(Vec<TimedSample>, Vec<TimedSample>), HarnessError> {
    rate.validate()?;
    let thinned = resample(samples, rate, seed);
    let (train, test) = split_chronological(&thinned, split_fraction)?;
    if standardize {
        let z = Standardizer::fit(&train);
        Ok((z.apply(&train), z.apply(&test)))
    } else {
        Ok((train, test))
    }
}

/// Everything a single `run` writes out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub config: RunConfig,
    pub rate: RateMode,
    pub split_fraction: f64,
    pub class_names: Vec<String>,
    pub feature_names: Vec<String>,
    pub train_samples: usize,
    pub test_samples: usize,
    pub curve_points: Vec<usize>,
    pub metrics: MetricsReport,
    pub confusion_matrix: Vec<Vec<u64>>,
    pub max_window_queries: usize,
    pub query_log: Vec<QueryLogEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_seconds: Option<f64>,
}

impl RunReport {
    pub const CSV_HEADER: &'static str =
        "rate,strategy,budget,budget_window,test_samples,accuracy,f_score,g_score,apt_queries,inapt_queries,apt_ratio";

    /// One flat CSV line matching [`RunReport::CSV_HEADER`].
    pub fn summary_row(&self) -> String {
        let m = &self.metrics;
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.rate,
            self.config.query.strategy.name(),
            self.config.budget,
            self.config.budget_window,
            self.test_samples,
            m.accuracy,
            m.f_score,
            m.g_score,
            m.apt_queries,
            m.inapt_queries,
            m.apt_ratio.map_or(String::new(), |r| r.to_string()),
        )
    }
}

pub fn run_on_stream(
    stream: &IngestedStream,
    split_fraction: f64,
    rate: RateMode,
    cfg: &RunConfig,
) -> Result<RunReport, HarnessError> {
    let (train, test) = prepare_split(&stream.samples, split_fraction, rate, cfg.seed, cfg.standardize)?;
    let out = run_session(&train, &test, stream.class_names.len(), cfg)?;
    Ok(RunReport {
        version: REPORT_VERSION,
        config: cfg.clone(),
        rate,
        split_fraction,
        class_names: stream.class_names.clone(),
        feature_names: stream.feature_names.clone(),
        train_samples: train.len(),
        test_samples: test.len(),
        curve_points: out.pattern.curves().iter().map(|c| c.len()).collect(),
        metrics: out.metrics,
        confusion_matrix: out.confusion.rows().to_vec(),
        max_window_queries: out.max_window_queries,
        query_log: out.query_log,
        runtime_seconds: out.runtime_seconds,
    })
}

pub fn run_from_spec(spec: &StreamSpec, cfg: &RunConfig) -> Result<RunReport, HarnessError> {
    let stream = ingest_csv(&spec.source, &spec.columns)?;
    run_on_stream(&stream, spec.split_fraction, spec.rate, cfg)
}

/// Fits a pattern on the training split of the stream described by `spec`.
pub fn fit_from_spec(spec: &StreamSpec, cfg: &RunConfig) -> Result<PatternFile, HarnessError> {
    cfg.fit.validate()?;
    let stream = ingest_csv(&spec.source, &spec.columns)?;
    let (train, _) = prepare_split(&stream.samples, spec.split_fraction, spec.rate, cfg.seed, cfg.standardize)?;
    let pattern = fit_governing_pattern(&train, &cfg.fit)?;
    Ok(PatternFile::new(pattern, stream.feature_names, stream.class_names))
}
