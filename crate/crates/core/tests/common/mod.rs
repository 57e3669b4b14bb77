//! Independent reference implementations used by the integration and
//! acceptance tests. None of them call into the library's geometry or
//! scoring code.
#![allow(dead_code)]

use governing_pattern::{CurvePoint, GoverningPattern, PrincipalCurve};
use rand::Rng;

pub type Poly = Vec<Vec<f64>>;

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn lerp(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * (y - x)).collect()
}

/// Distance from `p` to a polyline sampled at `samples` points spread
/// uniformly by arc length (vertices included), refined by a ternary search
/// next to the best sample.
pub fn dense_distance(p: &[f64], poly: &[Vec<f64>], samples: usize) -> f64 {
    let lens: Vec<f64> = poly.windows(2).map(|w| dist(&w[0], &w[1])).collect();
    let total: f64 = lens.iter().sum();
    let mut best = (f64::INFINITY, 0usize, 0.0f64, 0.0f64);
    for (k, w) in poly.windows(2).enumerate() {
        let n = ((samples as f64 * lens[k] / total).ceil() as usize).max(1);
        for j in 0..=n {
            let s = j as f64 / n as f64;
            let d = dist(p, &lerp(&w[0], &w[1], s));
            if d < best.0 {
                best = (d, k, s, 1.0 / n as f64);
            }
        }
    }
    let (_, k, s, h) = best;
    let f = |u: f64| dist(p, &lerp(&poly[k], &poly[k + 1], u));
    let (mut lo, mut hi) = ((s - h).max(0.0), (s + h).min(1.0));
    for _ in 0..200 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best.0.min(f(0.5 * (lo + hi)))
}

/// Nearest point on segment `a`–`b`: `(distance, foot)`.
pub fn segment_foot(p: &[f64], a: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let ab: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let ap: Vec<f64> = a.iter().zip(p).map(|(x, y)| y - x).collect();
    let len2: f64 = ab.iter().map(|v| v * v).sum();
    let s = (ap.iter().zip(&ab).map(|(u, v)| u * v).sum::<f64>() / len2).clamp(0.0, 1.0);
    let foot = lerp(a, b, s);
    (dist(p, &foot), foot)
}

/// Curves as plain `(t, y..)` vertex lists, in the pattern's order.
pub fn polylines(pattern: &GoverningPattern) -> Vec<Poly> {
    pattern
        .curves()
        .iter()
        .map(|c| c.points().iter().map(|q| q.to_vector()).collect())
        .collect()
}

/// Foot on the nearest segment over all curves; first strict minimum wins.
pub fn nearest_foot(p: &[f64], curves: &[Poly]) -> (f64, Vec<f64>) {
    let mut best = (f64::INFINITY, Vec::new());
    for c in curves {
        for w in c.windows(2) {
            let (d, f) = segment_foot(p, &w[0], &w[1]);
            if d < best.0 {
                best = (d, f);
            }
        }
    }
    best
}

/// Exhaustive scan of offsets `k * step`, `k = 0..count`, returning the
/// first offset with the lowest score and that score.
pub fn brute_force_match(
    window: &[(f64, Vec<f64>)],
    curves: &[Poly],
    step: f64,
    count: usize,
    include_time: bool,
) -> (f64, f64) {
    let eps = 1e-12;
    let t0 = window[0].0;
    let mut best = (0.0, f64::INFINITY);
    for k in 0..count {
        let off = k as f64 * step;
        let mut score = 0.0;
        for (t, x) in window {
            let mut p = vec![t - t0 + off];
            p.extend_from_slice(x);
            let (d, foot) = nearest_foot(&p, curves);
            let skip = if include_time { 0 } else { 1 };
            let norm = foot[skip..].iter().map(|v| v * v).sum::<f64>().sqrt();
            score += norm * (d.max(eps) / norm.max(eps)).ln();
        }
        if score < best.1 {
            best = (off, score);
        }
    }
    best
}

/// Linear strategy traced by hand: start at 1, add 1 per decrease.
pub fn linear_trace(h: &[f64], threshold: f64) -> bool {
    if h.len() < 2 {
        return false;
    }
    let mut q = 1usize;
    for i in 1..h.len() {
        if h[i] < h[i - 1] {
            q += 1;
        }
    }
    q as f64 / h.len() as f64 >= threshold
}

/// Exponential strategy traced in powers of two: `c = 2^ec`, `q = 2^eq`.
pub fn exponential_trace_score(h: &[f64]) -> f64 {
    let mut ec: i32 = 0;
    let mut eq: i32 = 0;
    for i in 1..h.len() {
        eq += ec;
        ec += if h[i] < h[i - 1] { 1 } else { -1 };
    }
    2f64.powi(eq - (h.len() as i32 - 1))
}

pub fn exponential_trace(h: &[f64], threshold: f64) -> bool {
    h.len() >= 2 && exponential_trace_score(h) >= threshold
}

/// Random time-monotone polyline with `k` vertices in `1 + dim` coordinates.
pub fn random_poly<R: Rng>(rng: &mut R, k: usize, dim: usize, t0: f64) -> Poly {
    let mut t = t0;
    (0..k)
        .map(|_| {
            t += rng.random_range(0.5..10.0);
            let mut v = vec![t];
            v.extend((0..dim).map(|_| rng.random_range(-10.0..10.0)));
            v
        })
        .collect()
}

pub fn to_curve(poly: &Poly, class_id: usize) -> PrincipalCurve {
    PrincipalCurve::new(poly.iter().map(|v| CurvePoint::from_vector(v)).collect(), class_id)
        .expect("valid polyline")
}
