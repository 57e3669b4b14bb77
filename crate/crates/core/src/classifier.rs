//! Label prediction from the matched offset and online curve updates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matching::{match_offset, MatchConfig, MatchError, MatchResult, Window};
use crate::model::{nearest_on_curve, project_onto_curve, GoverningPattern, Projection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassifierError {
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error("class {0} is not part of the governing pattern")]
    InvalidClass(usize),
    #[error("outcome does not belong to this pattern: {0}")]
    ForeignOutcome(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LearningConfig {
    pub alpha: f64,
    pub enabled: bool,
}

impl Default for LearningConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            enabled: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionOutcome {
    pub predicted_class: usize,
    #[serde(rename = "match")]
    pub match_result: MatchResult,
    /// Projection of the shifted newest sample on the predicted curve.
    pub projection: Projection,
    /// The newest sample as `[t_rel + t_o, x..]`.
    pub query_point: Vec<f64>,
}

/// Matches the window, then assigns the newest sample to the curve nearest
/// to it at the matched offset (lowest class id on ties).
pub fn predict_label(
    w: &Window,
    pattern: &GoverningPattern,
    cfg: &MatchConfig,
) -> Result<PredictionOutcome, ClassifierError> {
    let m = match_offset(w, pattern, cfg)?;
    let newest = w.newest();
    let mut q = Vec::with_capacity(newest.dim() + 1);
    q.push((newest.t - w.samples()[0].t) + m.t_offset);
    q.extend_from_slice(&newest.x);

    let mut best = (0, f64::INFINITY);
    for (ci, c) in pattern.curves().iter().enumerate() {
        let (_, _, dist) = nearest_on_curve(&q, c);
        if dist < best.1 {
            best = (ci, dist);
        }
    }
    let curve = &pattern.curves()[best.0];
    let projection = project_onto_curve(&q, curve).expect("dimension checked by matching");
    Ok(PredictionOutcome {
        predicted_class: curve.class_id(),
        match_result: m,
        projection,
        query_point: q,
    })
}

/// Relative margin kept between a moved point and its untouched neighbours.
const TIME_CLAMP_MARGIN: f64 = 1e-9;

/// Moves the two endpoints of the segment holding the projection foot along
/// `alpha * (X - F)` when the prediction was right, against it when wrong.
///
/// Both points share one time shift, limited so they stay strictly inside
/// their outer neighbours. Only the predicted class's curve changes.
pub fn online_update(
    pattern: &GoverningPattern,
    outcome: &PredictionOutcome,
    true_class: usize,
    cfg: &LearningConfig,
) -> Result<GoverningPattern, ClassifierError> {
    if !cfg.enabled {
        return Ok(pattern.clone());
    }
    let ci = pattern
        .curve_index(outcome.predicted_class)
        .ok_or(ClassifierError::InvalidClass(outcome.predicted_class))?;
    let seg = outcome.projection.segment_index;
    let curve = &pattern.curves()[ci];
    if seg + 1 >= curve.len() || outcome.query_point.len() != curve.dim() + 1 {
        return Err(ClassifierError::ForeignOutcome(format!(
            "segment {seg} / point dimension {}",
            outcome.query_point.len()
        )));
    }
    let sign = if outcome.predicted_class == true_class {
        1.0
    } else {
        -1.0
    };
    let foot = outcome.projection.point.to_vector();
    let delta: Vec<f64> = outcome
        .query_point
        .iter()
        .zip(&foot)
        .map(|(x, f)| sign * cfg.alpha * (x - f))
        .collect();

    let pts = curve.points();
    let k = pts.len();
    let (t_a, t_b) = (pts[seg].t, pts[seg + 1].t);
    let mut dt = delta[0];
    if seg > 0 {
        let gap = t_a - pts[seg - 1].t;
        dt = dt.max(-gap * (1.0 - TIME_CLAMP_MARGIN));
    }
    if seg + 2 < k {
        let gap = pts[seg + 2].t - t_b;
        dt = dt.min(gap * (1.0 - TIME_CLAMP_MARGIN));
    }
    // Repeated clamping shrinks gaps until rounding can close them; then
    // the time coordinate stays put.
    let (na, nb) = (t_a + dt, t_b + dt);
    let ordered = na < nb
        && (seg == 0 || pts[seg - 1].t < na)
        && (seg + 2 >= k || nb < pts[seg + 2].t);
    if !ordered {
        dt = 0.0;
    }

    let mut updated = pattern.clone();
    let points = updated.curve_mut(ci).points_mut();
    for p in &mut points[seg..=seg + 1] {
        p.t += dt;
        for (y, d) in p.y.iter_mut().zip(&delta[1..]) {
            *y += d;
        }
    }
    updated.refresh_bounds();
    Ok(updated)
}
