//! Rigid time-shift matching of the recent input window against the
//! governing pattern.
//!
//! The window is moved to the time origin, then shifted by candidate offsets
//! `t_o`; each placement is scored with a KL-style projection score
//! (lower is more similar) and the best offset wins.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{foot_coord, nearest_in_pattern, GoverningPattern, TimedSample};

/// Clamp for both logarithm arguments of the score.
pub const SCORE_EPSILON: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatchError {
    #[error("window is empty")]
    EmptyWindow,
    #[error("window times must be strictly increasing (violated at sample {index})")]
    NonMonotoneTime { index: usize },
    #[error("window sample {index} has {found} features, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("governing pattern is empty")]
    EmptyPattern,
    #[error("offset {offset} outside [0, {t_end}]")]
    OffsetOutOfRange { offset: f64, t_end: f64 },
    #[error("invalid match config: {0}")]
    InvalidConfig(String),
}

/// The last `H` samples of a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    samples: Vec<TimedSample>,
    normalized: bool,
}

impl Window {
    pub fn new(samples: Vec<TimedSample>) -> Result<Self, MatchError> {
        if samples.is_empty() {
            return Err(MatchError::EmptyWindow);
        }
        let d = samples[0].dim();
        for (i, s) in samples.iter().enumerate() {
            if s.dim() != d {
                return Err(MatchError::DimensionMismatch {
                    index: i,
                    expected: d,
                    found: s.dim(),
                });
            }
            if i > 0 && !(samples[i - 1].t < s.t) {
                return Err(MatchError::NonMonotoneTime { index: i });
            }
        }
        Ok(Self {
            samples,
            normalized: false,
        })
    }

    pub fn samples(&self) -> &[TimedSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn dim(&self) -> usize {
        self.samples[0].dim()
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].t - self.samples[0].t
    }

    pub fn newest(&self) -> &TimedSample {
        &self.samples[self.samples.len() - 1]
    }

    /// Mean feature vector (time excluded).
    pub fn feature_mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim()];
        for s in &self.samples {
            for (a, b) in m.iter_mut().zip(&s.x) {
                *a += b;
            }
        }
        let n = self.samples.len() as f64;
        m.iter_mut().for_each(|a| *a /= n);
        m
    }
}

/// Subtracts the first sample's time from every sample.
pub fn normalize_window(w: &Window) -> Window {
    let t0 = w.samples[0].t;
    Window {
        samples: w
            .samples
            .iter()
            .map(|s| TimedSample {
                t: s.t - t0,
                x: s.x.clone(),
                label: s.label,
            })
            .collect(),
        normalized: true,
    }
}

/// Which coordinates enter the `||F||` weight of the score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScoreNorm {
    /// Time and features.
    #[default]
    Full,
    /// Features only.
    Features,
}

impl std::str::FromStr for ScoreNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "full" => Ok(ScoreNorm::Full),
            "features" => Ok(ScoreNorm::Features),
            other => Err(format!("unknown score norm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConfig {
    pub potential_rel_threshold: f64,
    /// Offset grid spacing; `None` means `t_end / 500`.
    pub grid_step: Option<f64>,
    /// Half-width of the offset interval around each potential point;
    /// `None` means the window duration.
    pub refine_halfwidth: Option<f64>,
    pub prune_enabled: bool,
    pub score_norm: ScoreNorm,
}

impl Default for MatchConfig {
    fn default() -> Self {
        Self {
            potential_rel_threshold: 0.2,
            grid_step: None,
            refine_halfwidth: None,
            prune_enabled: true,
            score_norm: ScoreNorm::Full,
        }
    }
}

pub const DEFAULT_GRID_DIVISIONS: f64 = 500.0;

impl MatchConfig {
    pub fn validate(&self) -> Result<(), MatchError> {
        if !(self.potential_rel_threshold > 0.0) {
            return Err(MatchError::InvalidConfig(
                "potential_rel_threshold must be > 0".into(),
            ));
        }
        if let Some(g) = self.grid_step {
            if !(g > 0.0) {
                return Err(MatchError::InvalidConfig("grid_step must be > 0".into()));
            }
        }
        if let Some(h) = self.refine_halfwidth {
            if !(h >= 0.0) {
                return Err(MatchError::InvalidConfig(
                    "refine_halfwidth must be >= 0".into(),
                ));
            }
        }
        Ok(())
    }
}

/// Offsets `k * step` for `k = 0..count`, covering `[0, t_end]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetGrid {
    pub step: f64,
    pub count: usize,
}

impl OffsetGrid {
    pub fn new(t_end: f64, step: f64) -> Self {
        let span = t_end.max(0.0);
        let count = (span / step + 1e-9).floor() as usize + 1;
        Self { step, count }
    }

    pub fn for_pattern(pattern: &GoverningPattern, cfg: &MatchConfig) -> Self {
        let t_end = pattern.t_end().max(0.0);
        let step = cfg.grid_step.unwrap_or_else(|| {
            if t_end > 0.0 {
                t_end / DEFAULT_GRID_DIVISIONS
            } else {
                1.0
            }
        });
        Self::new(t_end, step)
    }

    #[inline]
    pub fn offset(&self, k: usize) -> f64 {
        k as f64 * self.step
    }

    pub fn offsets(&self) -> Vec<f64> {
        (0..self.count).map(|k| self.offset(k)).collect()
    }
}

/// Sum over the window of `||F|| * ln(max(||F - X||, eps) / max(||F||, eps))`,
/// where `X` is a sample shifted to `t_rel + t_o` and `F` its projection on
/// the nearest curve. Sample times are taken relative to the window start.
pub fn similarity_score(
    w: &Window,
    pattern: &GoverningPattern,
    t_o: f64,
    norm: ScoreNorm,
) -> Result<f64, MatchError> {
    let t_end = pattern.t_end().max(0.0);
    if !(0.0..=t_end).contains(&t_o) {
        return Err(MatchError::OffsetOutOfRange { offset: t_o, t_end });
    }
    check_window_dim(w, pattern)?;
    let mut buf = vec![0.0; w.dim() + 1];
    Ok(score_unchecked(w, pattern, t_o, norm, &mut buf))
}

fn check_window_dim(w: &Window, pattern: &GoverningPattern) -> Result<(), MatchError> {
    if pattern.curves().is_empty() {
        return Err(MatchError::EmptyPattern);
    }
    if w.dim() != pattern.dim() {
        return Err(MatchError::DimensionMismatch {
            index: 0,
            expected: pattern.dim(),
            found: w.dim(),
        });
    }
    Ok(())
}

fn score_unchecked(
    w: &Window,
    pattern: &GoverningPattern,
    t_o: f64,
    norm: ScoreNorm,
    buf: &mut [f64],
) -> f64 {
    let t0 = w.samples[0].t;
    let mut total = 0.0;
    for s in &w.samples {
        buf[0] = (s.t - t0) + t_o;
        buf[1..].copy_from_slice(&s.x);
        let (ci, seg, param, dist) = nearest_in_pattern(buf, pattern);
        let pts = pattern.curves()[ci].points();
        let (a, b) = (&pts[seg], &pts[seg + 1]);
        let mut f2 = 0.0;
        if norm == ScoreNorm::Full {
            let ft = foot_coord(a.t, b.t, param);
            f2 += ft * ft;
        }
        for k in 0..a.y.len() {
            let fk = foot_coord(a.y[k], b.y[k], param);
            f2 += fk * fk;
        }
        let fnorm = f2.sqrt();
        total += fnorm * (dist.max(SCORE_EPSILON) / fnorm.max(SCORE_EPSILON)).ln();
    }
    total
}

/// Curve points whose features lie within `rel` relative distance of `mean`.
pub fn potential_points(
    mean: &[f64],
    pattern: &GoverningPattern,
    rel: f64,
) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for c in pattern.curves() {
        for (i, p) in c.points().iter().enumerate() {
            let num: f64 = p
                .y
                .iter()
                .zip(mean)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let den = p.y.iter().map(|v| v * v).sum::<f64>().sqrt();
            if num / den.max(SCORE_EPSILON) <= rel {
                out.push((c.class_id(), i));
            }
        }
    }
    out
}

/// Candidate offsets (ascending, all on the full grid) for a window.
///
/// Every potential point contributes the grid offsets within
/// `refine_halfwidth` of its time plus the grid offset nearest to it.
/// With no potential points the whole grid is returned.
pub fn potential_offsets(
    w: &Window,
    pattern: &GoverningPattern,
    cfg: &MatchConfig,
) -> Vec<f64> {
    let grid = OffsetGrid::for_pattern(pattern, cfg);
    potential_grid_indices(w, pattern, cfg, &grid)
        .map(|ks| ks.into_iter().map(|k| grid.offset(k)).collect())
        .unwrap_or_else(|| grid.offsets())
}

fn potential_grid_indices(
    w: &Window,
    pattern: &GoverningPattern,
    cfg: &MatchConfig,
    grid: &OffsetGrid,
) -> Option<BTreeSet<usize>> {
    let points = potential_points(&w.feature_mean(), pattern, cfg.potential_rel_threshold);
    if points.is_empty() {
        return None;
    }
    let hw = cfg.refine_halfwidth.unwrap_or_else(|| w.duration());
    let last = grid.count - 1;
    let mut ks = BTreeSet::new();
    for (class_id, i) in points {
        let t = pattern.curve_for_class(class_id).expect("class from pattern").points()[i].t;
        let nearest = (t / grid.step).round().clamp(0.0, last as f64) as usize;
        ks.insert(nearest);
        let lo = ((t - hw) / grid.step).ceil().max(0.0);
        let hi = ((t + hw) / grid.step).floor().min(last as f64);
        if lo <= hi {
            ks.extend(lo as usize..=hi as usize);
        }
    }
    Some(ks)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub t_offset: f64,
    pub score: f64,
    pub candidates_evaluated: usize,
}

/// Finds the offset with the lowest score; ties go to the smaller offset.
pub fn match_offset(
    w: &Window,
    pattern: &GoverningPattern,
    cfg: &MatchConfig,
) -> Result<MatchResult, MatchError> {
    cfg.validate()?;
    check_window_dim(w, pattern)?;
    let w = normalize_window(w);
    let grid = OffsetGrid::for_pattern(pattern, cfg);
    let candidates: Vec<usize> = if cfg.prune_enabled {
        potential_grid_indices(&w, pattern, cfg, &grid)
            .map(|ks| ks.into_iter().collect())
            .unwrap_or_else(|| (0..grid.count).collect())
    } else {
        (0..grid.count).collect()
    };
    let mut buf = vec![0.0; w.dim() + 1];
    let mut best = MatchResult {
        t_offset: 0.0,
        score: f64::INFINITY,
        candidates_evaluated: candidates.len(),
    };
    for k in candidates {
        let t_o = grid.offset(k);
        let score = score_unchecked(&w, pattern, t_o, cfg.score_norm, &mut buf);
        if score < best.score {
            best.score = score;
            best.t_offset = t_o;
        }
    }
    Ok(best)
}
