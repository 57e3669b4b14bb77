//! Constraint-local principal curve (CLPC) extraction per class, low-angle
//! vertex pruning, and assembly of the time-anchored governing pattern.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    segment_param_distance, CurvePoint, GoverningPattern, ModelError, PrincipalCurve, TimedSample,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("need at least 2 samples to fit a curve, got {0}")]
    TooFewSamples(usize),
    #[error("sample times must be strictly increasing (violated at sample {index})")]
    NonMonotoneTime { index: usize },
    #[error("sample {index} has {found} features, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid fit config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Largest admissible mean projection error of consumed samples.
    pub error_threshold: f64,
    /// Half-width of the annulus band as a fraction of the search radius.
    pub bar_width: f64,
    /// Radius of the first search circle. `None` uses the distance from the
    /// first sample to its 5th nearest neighbour.
    pub initial_radius: Option<f64>,
    pub angle_threshold_deg: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            error_threshold: 1.0,
            bar_width: 0.1,
            initial_radius: None,
            angle_threshold_deg: 5.0,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        let bad = |what: &str| Err(FitError::InvalidConfig(what.to_string()));
        if !(self.error_threshold > 0.0) {
            return bad("error_threshold must be > 0");
        }
        if !(self.bar_width > 0.0) {
            return bad("bar_width must be > 0");
        }
        if let Some(r) = self.initial_radius {
            if !(r > 0.0) {
                return bad("initial_radius must be > 0");
            }
        }
        if !(self.angle_threshold_deg > 0.0 && self.angle_threshold_deg < 180.0) {
            return bad("angle_threshold_deg must lie in (0, 180)");
        }
        Ok(())
    }
}

const DEFAULT_RADIUS_NEIGHBOUR: usize = 5;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn default_radius(points: &[Vec<f64>]) -> f64 {
    let mut d: Vec<f64> = points[1..].iter().map(|q| dist(&points[0], q)).collect();
    d.sort_by(f64::total_cmp);
    let k = DEFAULT_RADIUS_NEIGHBOUR.min(d.len());
    d[k - 1]
}

/// Fits one principal curve through a single class's samples.
///
/// The first and last samples are the curve's endpoints. Interior points are
/// grown from the first one: each is the mean of the not-yet-consumed samples
/// lying in a band of half-width `bar_width * r` around a circle of radius `r`
/// centred on the current last point, where `r` is the length of the previous
/// segment (`initial_radius` for the first step). Samples whose projection
/// onto a newly accepted segment falls before its far end are consumed and
/// never revisited. Growth stops on an empty band, a candidate that does not
/// advance in time, or a candidate that lifts the mean projection error of the
/// consumed samples above `error_threshold`.
pub fn fit_clpc(
    data: &[TimedSample],
    class_id: usize,
    cfg: &FitConfig,
) -> Result<PrincipalCurve, FitError> {
    cfg.validate()?;
    let n = data.len();
    if n < 2 {
        return Err(FitError::TooFewSamples(n));
    }
    let d = data[0].dim();
    for (i, s) in data.iter().enumerate() {
        if s.dim() != d {
            return Err(FitError::DimensionMismatch {
                index: i,
                expected: d,
                found: s.dim(),
            });
        }
        if i > 0 && !(data[i - 1].t < s.t) {
            return Err(FitError::NonMonotoneTime { index: i });
        }
    }
    let pts: Vec<Vec<f64>> = data.iter().map(TimedSample::to_vector).collect();
    let first = CurvePoint::from_vector(&pts[0]);
    let last = CurvePoint::from_vector(&pts[n - 1]);
    if n == 2 {
        return Ok(PrincipalCurve::new(vec![first, last], class_id)?);
    }

    let mut curve = vec![first];
    // Interior samples only; the endpoints are already curve points.
    let mut remaining: Vec<usize> = (1..n - 1).collect();
    // Consumed samples with their current distance to the accepted prefix.
    let mut consumed: Vec<(usize, f64)> = vec![(0, 0.0)];
    let mut radius = cfg.initial_radius.unwrap_or_else(|| default_radius(&pts));

    for _ in 0..n {
        let prev = curve.last().expect("curve is never empty").clone();
        let center = prev.to_vector();
        let band = cfg.bar_width * radius;
        let members: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| (dist(&pts[i], &center) - radius).abs() <= band)
            .collect();
        if members.is_empty() {
            break;
        }
        let mut mean = vec![0.0; d + 1];
        for &i in &members {
            for (m, v) in mean.iter_mut().zip(&pts[i]) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= members.len() as f64;
        }
        if !(mean[0] > prev.t && mean[0] < last.t) {
            break;
        }
        let cand = CurvePoint::from_vector(&mean);

        let updated: Vec<(usize, f64)> = consumed
            .iter()
            .map(|&(i, dk)| (i, dk.min(segment_param_distance(&pts[i], &prev, &cand).1)))
            .collect();
        let mut newly: Vec<(usize, f64)> = Vec::new();
        let mut kept: Vec<usize> = Vec::with_capacity(remaining.len());
        for &i in &remaining {
            let (s, _) = segment_param_distance(&pts[i], &prev, &cand);
            if s < 1.0 {
                newly.push((i, distance_to_polyline(&pts[i], &curve, &cand)));
            } else {
                kept.push(i);
            }
        }
        let total: f64 = updated.iter().chain(&newly).map(|&(_, dk)| dk).sum();
        let error = total / (updated.len() + newly.len()) as f64;
        if error > cfg.error_threshold {
            break;
        }
        radius = dist(&mean, &center);
        consumed = updated;
        consumed.extend(newly);
        remaining = kept;
        curve.push(cand);
    }
    curve.push(last);
    Ok(PrincipalCurve::new(curve, class_id)?)
}

fn distance_to_polyline(p: &[f64], prefix: &[CurvePoint], tail: &CurvePoint) -> f64 {
    let mut best = f64::INFINITY;
    for w in prefix.windows(2) {
        best = best.min(segment_param_distance(p, &w[0], &w[1]).1);
    }
    best.min(segment_param_distance(p, &prefix[prefix.len() - 1], tail).1)
}

/// Turning angle at `b` in degrees: 0 for collinear, 90 for a right corner.
pub fn deviation_deg(a: &CurvePoint, b: &CurvePoint, c: &CurvePoint) -> f64 {
    let dims = b.y.len() + 1;
    let u: Vec<f64> = (0..dims).map(|k| b.coord(k) - a.coord(k)).collect();
    let v: Vec<f64> = (0..dims).map(|k| c.coord(k) - b.coord(k)).collect();
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    // Half-angle form stays accurate near 0 and 180 degrees, unlike acos.
    let (mut diff, mut sum) = (0.0, 0.0);
    for (x, y) in u.iter().zip(&v) {
        let (p, q) = (x / nu, y / nv);
        diff += (p - q) * (p - q);
        sum += (p + q) * (p + q);
    }
    (2.0 * diff.sqrt().atan2(sum.sqrt())).to_degrees()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PruneStep {
    /// Index of the removed vertex in the input curve.
    pub original_index: usize,
    /// Its turning angle at the moment of removal.
    pub deviation_deg: f64,
}

/// Removes near-straight interior vertices, recording each removal.
///
/// The interior vertex with the smallest turning angle is dropped while that
/// angle is below `angle_threshold_deg` (lowest index on ties); angles of its
/// neighbours are then re-evaluated. Endpoints are always kept.
pub fn prune_low_angle_traced(
    curve: &PrincipalCurve,
    angle_threshold_deg: f64,
) -> (PrincipalCurve, Vec<PruneStep>) {
    let mut idx: Vec<usize> = (0..curve.len()).collect();
    let pts = curve.points();
    let mut steps = Vec::new();
    while idx.len() > 2 {
        let mut best: Option<(usize, f64)> = None;
        for j in 1..idx.len() - 1 {
            let dev = deviation_deg(&pts[idx[j - 1]], &pts[idx[j]], &pts[idx[j + 1]]);
            if best.is_none_or(|(_, b)| dev < b) {
                best = Some((j, dev));
            }
        }
        match best {
            Some((j, dev)) if dev < angle_threshold_deg => {
                steps.push(PruneStep {
                    original_index: idx[j],
                    deviation_deg: dev,
                });
                idx.remove(j);
            }
            _ => break,
        }
    }
    let kept = idx.iter().map(|&i| pts[i].clone()).collect();
    let pruned = PrincipalCurve::new(kept, curve.class_id())
        .expect("a subsequence of a valid curve keeping both endpoints is valid");
    (pruned, steps)
}

pub fn prune_low_angle(curve: &PrincipalCurve, angle_threshold_deg: f64) -> PrincipalCurve {
    prune_low_angle_traced(curve, angle_threshold_deg).0
}

/// Shifts all curves so the earliest curve point sits at time 0 and orders
/// them by class id.
pub fn build_governing_pattern(curves: Vec<PrincipalCurve>) -> Result<GoverningPattern, FitError> {
    if curves.is_empty() {
        return Err(ModelError::EmptyPattern.into());
    }
    let t0 = curves
        .iter()
        .map(PrincipalCurve::t_first)
        .fold(f64::INFINITY, f64::min);
    let shifted = curves.iter().map(|c| c.shifted(-t0)).collect();
    Ok(GoverningPattern::new(shifted)?)
}

/// Fits, prunes and assembles a pattern from labelled samples in time order.
///
/// Each class's samples, taken together across all of its runs, feed one
/// CLPC fit. Unlabelled samples are ignored.
pub fn fit_governing_pattern(
    samples: &[TimedSample],
    cfg: &FitConfig,
) -> Result<GoverningPattern, FitError> {
    use rayon::prelude::*;
    use std::collections::BTreeMap;

    cfg.validate()?;
    let mut by_class: BTreeMap<usize, Vec<TimedSample>> = BTreeMap::new();
    for s in samples {
        if let Some(label) = s.label {
            by_class.entry(label).or_default().push(s.clone());
        }
    }
    let classes: Vec<(usize, Vec<TimedSample>)> = by_class.into_iter().collect();
    let curves = classes
        .par_iter()
        .map(|(class_id, data)| {
            let raw = fit_clpc(data, *class_id, cfg)?;
            Ok(prune_low_angle(&raw, cfg.angle_threshold_deg))
        })
        .collect::<Result<Vec<_>, FitError>>()?;
    build_governing_pattern(curves)
}
