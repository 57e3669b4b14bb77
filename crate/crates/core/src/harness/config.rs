use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use super::ingest::ColumnSpec;
use super::resample::RateMode;
use super::session::{RunConfig, StreamSpec};
use super::HarnessError;
use crate::matching::ScoreNorm;
use crate::sampling::{QueryConfig, QueryStrategy};

/// Flat run settings shared by the config file and the command line.
/// Every field is optional; unset fields fall back to library defaults.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    /// Input CSV file.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub time_column: Option<String>,
    #[arg(long)]
    pub label_column: Option<String>,
    /// Feature columns; defaults to every other column.
    #[arg(long, value_delimiter = ',')]
    pub features: Option<Vec<String>>,
    #[arg(long)]
    pub split_fraction: Option<f64>,
    /// `fixed:C` or `random:MIN:MAX`.
    #[arg(long)]
    pub rate: Option<RateMode>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub history_length: Option<usize>,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub budget_window: Option<usize>,
    /// `linear`, `exponential` or `fixed-period`.
    #[arg(long)]
    pub strategy: Option<QueryStrategy>,
    #[arg(long)]
    pub threshold: Option<f64>,
    #[arg(long)]
    pub similarity_history: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub learning: Option<bool>,
    #[arg(long)]
    pub error_threshold: Option<f64>,
    #[arg(long)]
    pub bar_width: Option<f64>,
    #[arg(long)]
    pub initial_radius: Option<f64>,
    #[arg(long)]
    pub angle_threshold: Option<f64>,
    #[arg(long)]
    pub potential_threshold: Option<f64>,
    #[arg(long)]
    pub grid_step: Option<f64>,
    #[arg(long)]
    pub refine_halfwidth: Option<f64>,
    #[arg(long)]
    pub prune: Option<bool>,
    /// `full` or `features`.
    #[arg(long)]
    pub score_norm: Option<ScoreNorm>,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub standardize: Option<bool>,
    #[arg(long)]
    pub record_runtime: Option<bool>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($f:ident),* $(,)?) => {
        $( if $src.$f.is_some() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Settings {
    pub fn from_toml_file(path: &Path) -> Result<Self, HarnessError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn from_toml(text: &str) -> Result<Self, HarnessError> {
        Ok(toml::from_str(text)?)
    }

    /// Fields set in `other` replace the ones here.
    pub fn overridden_by(mut self, other: &Settings) -> Self {
        overlay!(
            self, other, data, time_column, label_column, features, split_fraction, rate, seed,
            history_length, budget, budget_window, strategy, threshold, similarity_history, alpha,
            learning, error_threshold, bar_width, initial_radius, angle_threshold,
            potential_threshold, grid_step, refine_halfwidth, prune, score_norm, repetitions, beta,
            standardize, record_runtime,
        );
        self
    }

    pub fn stream_spec(&self) -> Result<StreamSpec, HarnessError> {
        let source = self
            .data
            .clone()
            .ok_or_else(|| HarnessError::InvalidConfig("no input data given".into()))?;
        let defaults = ColumnSpec::default();
        let spec = StreamSpec {
            source,
            columns: ColumnSpec {
                time_column: self.time_column.clone().unwrap_or(defaults.time_column),
                label_column: self.label_column.clone().unwrap_or(defaults.label_column),
                feature_columns: self.features.clone().unwrap_or_default(),
            },
            split_fraction: self.split_fraction.unwrap_or(0.6),
            rate: self.rate.unwrap_or_default(),
        };
        spec.rate.validate()?;
        Ok(spec)
    }

    pub fn run_config(&self) -> Result<RunConfig, HarnessError> {
        let mut cfg = RunConfig::default();
        if let Some(s) = self.strategy {
            cfg.query = QueryConfig::new(s);
        }
        let q = &mut cfg.query;
        q.threshold = self.threshold.unwrap_or(q.threshold);
        q.history_capacity = self.similarity_history.unwrap_or(q.history_capacity);

        let f = &mut cfg.fit;
        f.error_threshold = self.error_threshold.unwrap_or(f.error_threshold);
        f.bar_width = self.bar_width.unwrap_or(f.bar_width);
        f.initial_radius = self.initial_radius.or(f.initial_radius);
        f.angle_threshold_deg = self.angle_threshold.unwrap_or(f.angle_threshold_deg);

        let m = &mut cfg.matching;
        m.potential_rel_threshold = self.potential_threshold.unwrap_or(m.potential_rel_threshold);
        m.grid_step = self.grid_step.or(m.grid_step);
        m.refine_halfwidth = self.refine_halfwidth.or(m.refine_halfwidth);
        m.prune_enabled = self.prune.unwrap_or(m.prune_enabled);
        m.score_norm = self.score_norm.unwrap_or(m.score_norm);

        cfg.learning.alpha = self.alpha.unwrap_or(cfg.learning.alpha);
        cfg.learning.enabled = self.learning.unwrap_or(cfg.learning.enabled);
        cfg.budget = self.budget.unwrap_or(cfg.budget);
        cfg.budget_window = self.budget_window.unwrap_or(cfg.budget_window);
        cfg.history_length = self.history_length.unwrap_or(cfg.history_length);
        cfg.repetitions = self.repetitions.unwrap_or(cfg.repetitions);
        cfg.seed = self.seed.unwrap_or(cfg.seed);
        cfg.beta = self.beta.unwrap_or(cfg.beta);
        cfg.standardize = self.standardize.unwrap_or(cfg.standardize);
        cfg.record_runtime = self.record_runtime.unwrap_or(cfg.record_runtime);
        cfg.validate()?;
        Ok(cfg)
    }
}
