//! Samples, principal curves, the governing pattern, and point-to-polyline
//! projection in the joint (time × feature) space.
//!
//! A query point is always passed as a flat slice `[t, x_1, .., x_d]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("degenerate segment: endpoints coincide")]
    DegenerateSegment,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("a principal curve needs at least 2 points, got {0}")]
    TooFewCurvePoints(usize),
    #[error("curve times must be strictly increasing (violated at point {index})")]
    NonMonotoneCurve { index: usize },
    #[error("class {0} appears more than once in the pattern")]
    DuplicateClass(usize),
    #[error("governing pattern has no curves")]
    EmptyPattern,
}

/// One observation of a stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimedSample {
    pub t: f64,
    pub x: Vec<f64>,
    pub label: Option<usize>,
}

impl TimedSample {
    pub fn new(t: f64, x: Vec<f64>) -> Self {
        Self { t, x, label: None }
    }

    pub fn labeled(t: f64, x: Vec<f64>, label: usize) -> Self {
        Self {
            t,
            x,
            label: Some(label),
        }
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// The sample as a `(d+1)`-vector with time first.
    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.x.len() + 1);
        v.push(self.t);
        v.extend_from_slice(&self.x);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub t: f64,
    pub y: Vec<f64>,
}

impl CurvePoint {
    pub fn new(t: f64, y: Vec<f64>) -> Self {
        Self { t, y }
    }

    pub fn from_vector(v: &[f64]) -> Self {
        Self {
            t: v[0],
            y: v[1..].to_vec(),
        }
    }

    pub fn to_vector(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.y.len() + 1);
        v.push(self.t);
        v.extend_from_slice(&self.y);
        v
    }

    /// Coordinate `k` of the joint vector (0 is time).
    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        if k == 0 {
            self.t
        } else {
            self.y[k - 1]
        }
    }

    /// Euclidean norm of the joint vector.
    pub fn norm(&self) -> f64 {
        (self.t * self.t + self.y.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    pub fn distance_to(&self, p: &[f64]) -> f64 {
        let dt = p[0] - self.t;
        let mut acc = dt * dt;
        for (a, b) in p[1..].iter().zip(&self.y) {
            let d = a - b;
            acc += d * d;
        }
        acc.sqrt()
    }
}

/// Ordered polyline representing one class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCurve", into = "RawCurve")]
pub struct PrincipalCurve {
    points: Vec<CurvePoint>,
    class_id: usize,
}

#[derive(Serialize, Deserialize)]
struct RawCurve {
    class_id: usize,
    points: Vec<Vec<f64>>,
}

impl TryFrom<RawCurve> for PrincipalCurve {
    type Error = ModelError;

    fn try_from(raw: RawCurve) -> Result<Self, ModelError> {
        if raw.points.iter().any(|p| p.is_empty()) {
            return Err(ModelError::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        let points = raw.points.iter().map(|p| CurvePoint::from_vector(p)).collect();
        PrincipalCurve::new(points, raw.class_id)
    }
}

impl From<PrincipalCurve> for RawCurve {
    fn from(c: PrincipalCurve) -> Self {
        RawCurve {
            class_id: c.class_id,
            points: c.points.iter().map(CurvePoint::to_vector).collect(),
        }
    }
}

impl PrincipalCurve {
    pub fn new(points: Vec<CurvePoint>, class_id: usize) -> Result<Self, ModelError> {
        if points.len() < 2 {
            return Err(ModelError::TooFewCurvePoints(points.len()));
        }
        let d = points[0].y.len();
        for (i, p) in points.iter().enumerate() {
            if p.y.len() != d {
                return Err(ModelError::DimensionMismatch {
                    expected: d,
                    found: p.y.len(),
                });
            }
            if i > 0 && !(points[i - 1].t < p.t) {
                return Err(ModelError::NonMonotoneCurve { index: i });
            }
        }
        Ok(Self { points, class_id })
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub(crate) fn points_mut(&mut self) -> &mut [CurvePoint] {
        &mut self.points
    }

    pub fn class_id(&self) -> usize {
        self.class_id
    }

    /// Feature dimension `d`.
    pub fn dim(&self) -> usize {
        self.points[0].y.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn segment_count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn t_first(&self) -> f64 {
        self.points[0].t
    }

    pub fn t_last(&self) -> f64 {
        self.points[self.points.len() - 1].t
    }

    pub(crate) fn shifted(&self, dt: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| CurvePoint::new(p.t + dt, p.y.clone()))
                .collect(),
            class_id: self.class_id,
        }
    }
}

/// All per-class curves of a model, sorted by class id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPattern", into = "RawPattern")]
pub struct GoverningPattern {
    curves: Vec<PrincipalCurve>,
    t_start: f64,
    t_end: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPattern {
    curves: Vec<PrincipalCurve>,
}

impl TryFrom<RawPattern> for GoverningPattern {
    type Error = ModelError;

    fn try_from(raw: RawPattern) -> Result<Self, ModelError> {
        GoverningPattern::new(raw.curves)
    }
}

impl From<GoverningPattern> for RawPattern {
    fn from(p: GoverningPattern) -> Self {
        RawPattern { curves: p.curves }
    }
}

impl GoverningPattern {
    /// Validates the curve set and records its time bounds. No time shift
    /// is applied; see [`crate::clpc::build_governing_pattern`] for that.
    pub fn new(mut curves: Vec<PrincipalCurve>) -> Result<Self, ModelError> {
        if curves.is_empty() {
            return Err(ModelError::EmptyPattern);
        }
        curves.sort_by_key(|c| c.class_id);
        let d = curves[0].dim();
        for w in curves.windows(2) {
            if w[0].class_id == w[1].class_id {
                return Err(ModelError::DuplicateClass(w[0].class_id));
            }
        }
        for c in &curves {
            if c.dim() != d {
                return Err(ModelError::DimensionMismatch {
                    expected: d,
                    found: c.dim(),
                });
            }
        }
        let (t_start, t_end) = time_bounds(&curves);
        Ok(Self {
            curves,
            t_start,
            t_end,
        })
    }

    pub fn curves(&self) -> &[PrincipalCurve] {
        &self.curves
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn dim(&self) -> usize {
        self.curves[0].dim()
    }

    pub fn class_ids(&self) -> Vec<usize> {
        self.curves.iter().map(|c| c.class_id).collect()
    }

    pub fn curve_for_class(&self, class_id: usize) -> Option<&PrincipalCurve> {
        self.curves.iter().find(|c| c.class_id == class_id)
    }

    pub(crate) fn curve_index(&self, class_id: usize) -> Option<usize> {
        self.curves.iter().position(|c| c.class_id == class_id)
    }

    /// Mutable access to one curve; bounds are refreshed by the caller via
    /// [`GoverningPattern::refresh_bounds`].
    pub(crate) fn curve_mut(&mut self, index: usize) -> &mut PrincipalCurve {
        &mut self.curves[index]
    }

    pub(crate) fn refresh_bounds(&mut self) {
        let (s, e) = time_bounds(&self.curves);
        self.t_start = s;
        self.t_end = e;
    }

    pub fn point_count(&self) -> usize {
        self.curves.iter().map(PrincipalCurve::len).sum()
    }
}

fn time_bounds(curves: &[PrincipalCurve]) -> (f64, f64) {
    let start = curves
        .iter()
        .map(PrincipalCurve::t_first)
        .fold(f64::INFINITY, f64::min);
    let end = curves
        .iter()
        .map(PrincipalCurve::t_last)
        .fold(f64::NEG_INFINITY, f64::max);
    (start, end)
}

/// Foot of a point on one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentProjection {
    pub foot: CurvePoint,
    pub arc_position: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    pub point: CurvePoint,
    pub class_id: usize,
    pub segment_index: usize,
    pub distance: f64,
    pub arc_position: f64,
}

/// Clamped segment parameter and distance from `p` to segment `a`-`b`.
///
/// This is the single arithmetic path for every projection in the crate;
/// `len2` must be nonzero. At `s == 0` / `s == 1` the foot is exactly `a` / `b`.
#[inline]
pub(crate) fn segment_param_distance(p: &[f64], a: &CurvePoint, b: &CurvePoint) -> (f64, f64) {
    let dt = b.t - a.t;
    let mut len2 = dt * dt;
    let mut dot = (p[0] - a.t) * dt;
    for k in 0..a.y.len() {
        let dk = b.y[k] - a.y[k];
        len2 += dk * dk;
        dot += (p[k + 1] - a.y[k]) * dk;
    }
    let s = (dot / len2).clamp(0.0, 1.0);
    let foot_t = foot_coord(a.t, b.t, s);
    let r = p[0] - foot_t;
    let mut acc = r * r;
    for k in 0..a.y.len() {
        let r = p[k + 1] - foot_coord(a.y[k], b.y[k], s);
        acc += r * r;
    }
    (s, acc.sqrt())
}

#[inline]
pub(crate) fn foot_coord(a: f64, b: f64, s: f64) -> f64 {
    if s == 0.0 {
        a
    } else if s == 1.0 {
        b
    } else {
        a + s * (b - a)
    }
}

pub(crate) fn foot_point(a: &CurvePoint, b: &CurvePoint, s: f64) -> CurvePoint {
    CurvePoint {
        t: foot_coord(a.t, b.t, s),
        y: a
            .y
            .iter()
            .zip(&b.y)
            .map(|(&ak, &bk)| foot_coord(ak, bk, s))
            .collect(),
    }
}

fn check_dim(p: &[f64], d: usize) -> Result<(), ModelError> {
    if p.len() != d + 1 {
        return Err(ModelError::DimensionMismatch {
            expected: d + 1,
            found: p.len(),
        });
    }
    Ok(())
}

pub fn project_onto_segment(
    p: &[f64],
    a: &CurvePoint,
    b: &CurvePoint,
) -> Result<SegmentProjection, ModelError> {
    if a.y.len() != b.y.len() {
        return Err(ModelError::DimensionMismatch {
            expected: a.y.len(),
            found: b.y.len(),
        });
    }
    check_dim(p, a.y.len())?;
    if a == b {
        return Err(ModelError::DegenerateSegment);
    }
    let (s, distance) = segment_param_distance(p, a, b);
    Ok(SegmentProjection {
        foot: foot_point(a, b, s),
        arc_position: s,
        distance,
    })
}

/// Best (segment, parameter, distance) on one curve; ties keep the lowest segment.
#[inline]
pub(crate) fn nearest_on_curve(p: &[f64], curve: &PrincipalCurve) -> (usize, f64, f64) {
    let pts = &curve.points;
    let mut best = (0, 0.0, f64::INFINITY);
    for i in 0..pts.len() - 1 {
        let (s, dist) = segment_param_distance(p, &pts[i], &pts[i + 1]);
        if dist < best.2 {
            best = (i, s, dist);
        }
    }
    best
}

fn make_projection(curve: &PrincipalCurve, seg: usize, s: f64, distance: f64) -> Projection {
    Projection {
        point: foot_point(&curve.points[seg], &curve.points[seg + 1], s),
        class_id: curve.class_id,
        segment_index: seg,
        distance,
        arc_position: s,
    }
}

pub fn project_onto_curve(p: &[f64], curve: &PrincipalCurve) -> Result<Projection, ModelError> {
    check_dim(p, curve.dim())?;
    let (seg, s, dist) = nearest_on_curve(p, curve);
    Ok(make_projection(curve, seg, s, dist))
}

/// Index of the nearest curve plus its (segment, parameter, distance).
#[inline]
pub(crate) fn nearest_in_pattern(p: &[f64], pattern: &GoverningPattern) -> (usize, usize, f64, f64) {
    let mut best = (0, 0, 0.0, f64::INFINITY);
    for (ci, curve) in pattern.curves.iter().enumerate() {
        let (seg, s, dist) = nearest_on_curve(p, curve);
        if dist < best.3 {
            best = (ci, seg, s, dist);
        }
    }
    best
}

pub fn project_nearest(p: &[f64], pattern: &GoverningPattern) -> Result<Projection, ModelError> {
    check_dim(p, pattern.dim())?;
    let (ci, seg, s, dist) = nearest_in_pattern(p, pattern);
    Ok(make_projection(&pattern.curves[ci], seg, s, dist))
}
