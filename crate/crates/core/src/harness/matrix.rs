use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ingest::IngestedStream;
use super::resample::RateMode;
use super::session::{prepare_split, run_session, RunConfig};
use super::HarnessError;
use crate::sampling::{QueryConfig, QueryStrategy};

/// Grid axes; every combination becomes one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub rates: Vec<RateMode>,
    pub strategies: Vec<QueryStrategy>,
    /// `(budget, window)` pairs.
    pub budgets: Vec<(usize, usize)>,
    pub split_fraction: f64,
}

impl Default for MatrixSpec {
    fn default() -> Self {
        Self {
            rates: vec![RateMode::Fixed(1)],
            strategies: vec![QueryStrategy::Linear],
            budgets: vec![(30, 100)],
            split_fraction: 0.6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatPair {
    pub mean: f64,
    /// Population variance over repetitions.
    pub variance: f64,
}

impl StatPair {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        if values.iter().all(|&v| v == values[0]) {
            return Some(Self {
                mean: values[0],
                variance: 0.0,
            });
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self { mean, variance })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRow {
    pub repetition: usize,
    pub seed: u64,
    pub accuracy: f64,
    pub f_score: f64,
    pub g_score: f64,
    pub queries: u64,
    pub apt_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub rate: RateMode,
    pub strategy: QueryStrategy,
    pub threshold: f64,
    pub budget: usize,
    pub budget_window: usize,
    pub reps: Vec<RepRow>,
    pub accuracy: Option<StatPair>,
    pub f_score: Option<StatPair>,
    pub g_score: Option<StatPair>,
    /// Over repetitions that issued at least one query.
    pub apt_ratio: Option<StatPair>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixReport {
    pub repetitions: usize,
    pub base_seed: u64,
    pub cells: Vec<CellReport>,
}

fn fmt_stat(s: &Option<StatPair>) -> (String, String) {
    s.map_or((String::new(), String::new()), |s| {
        (s.mean.to_string(), s.variance.to_string())
    })
}

impl MatrixReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "rate,strategy,threshold,budget,budget_window,repetitions,accuracy_mean,accuracy_var,\
             f_score_mean,f_score_var,g_score_mean,g_score_var,apt_ratio_mean,apt_ratio_var,error\n",
        );
        for c in &self.cells {
            let (am, av) = fmt_stat(&c.accuracy);
            let (fm, fv) = fmt_stat(&c.f_score);
            let (gm, gv) = fmt_stat(&c.g_score);
            let (pm, pv) = fmt_stat(&c.apt_ratio);
            let err = c.error.as_deref().unwrap_or("").replace([',', '\n'], ";");
            out.push_str(&format!(
                "{},{},{},{},{},{},{am},{av},{fm},{fv},{gm},{gv},{pm},{pv},{err}\n",
                c.rate,
                c.strategy.name(),
                c.threshold,
                c.budget,
                c.budget_window,
                c.reps.len(),
            ));
        }
        out
    }
}

fn run_rep(
    stream: &IngestedStream,
    split_fraction: f64,
    rate: RateMode,
    cfg: &RunConfig,
    repetition: usize,
) -> Result<RepRow, HarnessError> {
    let (train, test) = prepare_split(&stream.samples, split_fraction, rate, cfg.seed, cfg.standardize)?;
    let out = run_session(&train, &test, stream.class_names.len(), cfg)?;
    Ok(RepRow {
        repetition,
        seed: cfg.seed,
        accuracy: out.metrics.accuracy,
        f_score: out.metrics.f_score,
        g_score: out.metrics.g_score,
        queries: out.metrics.apt_queries + out.metrics.inapt_queries,
        apt_ratio: out.metrics.apt_ratio,
    })
}

/// Runs `base.repetitions` sessions per grid cell, repetition `r` using
/// seed `base.seed + r`. A failing cell records its error and the rest of
/// the grid carries on.
///
/// Strategies other than the one in `base.query` use their default
/// threshold.
pub fn run_matrix(stream: &IngestedStream, grid: &MatrixSpec, base: &RunConfig) -> MatrixReport {
    let mut cells = Vec::new();
    for &rate in &grid.rates {
        for &strategy in &grid.strategies {
            for &(budget, budget_window) in &grid.budgets {
                let threshold = if strategy == base.query.strategy {
                    base.query.threshold
                } else {
                    strategy.default_threshold()
                };
                cells.push((rate, strategy, threshold, budget, budget_window));
            }
        }
    }

    let cells = cells
        .into_par_iter()
        .map(|(rate, strategy, threshold, budget, budget_window)| {
            let reps: Result<Vec<RepRow>, HarnessError> = (0..base.repetitions.max(1))
                .into_par_iter()
                .map(|r| {
                    let cfg = RunConfig {
                        query: QueryConfig {
                            strategy,
                            threshold,
                            ..base.query
                        },
                        budget,
                        budget_window,
                        seed: base.seed.wrapping_add(r as u64),
                        ..base.clone()
                    };
                    run_rep(stream, grid.split_fraction, rate, &cfg, r)
                })
                .collect();
            let (reps, error) = match reps {
                Ok(r) => (r, None),
                Err(e) => (Vec::new(), Some(e.to_string())),
            };
            let col = |f: fn(&RepRow) -> Option<f64>| {
                StatPair::of(&reps.iter().filter_map(f).collect::<Vec<_>>())
            };
            CellReport {
                rate,
                strategy,
                threshold,
                budget,
                budget_window,
                accuracy: col(|r| Some(r.accuracy)),
                f_score: col(|r| Some(r.f_score)),
                g_score: col(|r| Some(r.g_score)),
                apt_ratio: col(|r| r.apt_ratio),
                reps,
                error,
            }
        })
        .collect();

    MatrixReport {
        repetitions: base.repetitions.max(1),
        base_seed: base.seed,
        cells,
    }
}
