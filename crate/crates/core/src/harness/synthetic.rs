//! Seeded synthetic 3-class streams. Each class has its own piecewise
//! linear trajectory that repeats with a fixed period in global time; the
//! active class switches after random dwell times and Gaussian noise is
//! added per feature.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::ingest::IngestedStream;
use super::HarnessError;
use crate::model::TimedSample;

/// Per-class knots `(phase, [x0, x1])` over one period. The classes sit at
/// roughly equal distance from the origin.
const TEMPLATES: [[(f64, [f64; 2]); 4]; 3] = [
    [(0.0, [20.0, 0.0]), (0.3, [24.0, 3.0]), (0.6, [21.0, 5.0]), (1.0, [20.0, 0.0])],
    [(0.0, [-10.0, 17.0]), (0.4, [-6.0, 21.0]), (0.7, [-11.0, 19.0]), (1.0, [-10.0, 17.0])],
    [(0.0, [-10.0, -17.0]), (0.2, [-6.0, -14.0]), (0.5, [-11.0, -13.0]), (1.0, [-10.0, -17.0])],
];

/// Additive feature shift applied to samples `start..start + length`.
/// It grows linearly over the first `ramp` samples (0 means abrupt), holds,
/// and disappears at the end of the segment. With `class` set, only that
/// class's samples move.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DriftSpec {
    pub start: usize,
    pub length: usize,
    pub ramp: usize,
    pub shift: [f64; 2],
    pub class: Option<usize>,
}

impl DriftSpec {
    fn factor(&self, i: usize, class: usize) -> f64 {
        if self.class.is_some_and(|c| c != class) || i < self.start || i >= self.start + self.length {
            0.0
        } else if i - self.start < self.ramp {
            (i - self.start + 1) as f64 / self.ramp as f64
        } else {
            1.0
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub samples: usize,
    /// Time between consecutive samples.
    pub dt: f64,
    /// Trajectory period, in samples.
    pub period: usize,
    /// Inclusive range of consecutive samples spent in one class.
    pub dwell: (usize, usize),
    /// Noise standard deviation as a fraction of each feature's range.
    pub noise_fraction: f64,
    pub seed: u64,
    pub drift: Vec<DriftSpec>,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            samples: 3000,
            dt: 0.1,
            period: 300,
            dwell: (5, 30),
            noise_fraction: 0.05,
            seed: 7,
            drift: Vec::new(),
        }
    }
}

/// Noise-free position of `class` at `phase` in `[0, 1)`.
pub fn template_at(class: usize, phase: f64) -> [f64; 2] {
    let knots = &TEMPLATES[class];
    let k = (0..knots.len() - 1)
        .find(|&k| phase <= knots[k + 1].0)
        .unwrap_or(knots.len() - 2);
    let (p0, a) = knots[k];
    let (p1, b) = knots[k + 1];
    let u = ((phase - p0) / (p1 - p0)).clamp(0.0, 1.0);
    [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
}

fn feature_ranges() -> [f64; 2] {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for knots in &TEMPLATES {
        for (_, x) in knots {
            for k in 0..2 {
                lo[k] = lo[k].min(x[k]);
                hi[k] = hi[k].max(x[k]);
            }
        }
    }
    [hi[0] - lo[0], hi[1] - lo[1]]
}

pub fn generate(spec: &SyntheticSpec) -> IngestedStream {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let period = spec.period.max(1);
    let (dwell_lo, dwell_hi) = (spec.dwell.0.max(1), spec.dwell.1.max(spec.dwell.0.max(1)));
    let noise: Vec<Option<Normal<f64>>> = feature_ranges()
        .iter()
        .map(|r| {
            let sd = spec.noise_fraction * r;
            (sd > 0.0).then(|| Normal::new(0.0, sd).expect("finite positive sd"))
        })
        .collect();

    let classes = TEMPLATES.len();
    let mut class = 0;
    let mut remaining = rng.random_range(dwell_lo..=dwell_hi);
    let mut samples = Vec::with_capacity(spec.samples);
    for i in 0..spec.samples {
        if remaining == 0 {
            class = (class + rng.random_range(1..classes)) % classes;
            remaining = rng.random_range(dwell_lo..=dwell_hi);
        }
        remaining -= 1;
        let phase = (i % period) as f64 / period as f64;
        let mut x = template_at(class, phase);
        for d in &spec.drift {
            let f = d.factor(i, class);
            x[0] += f * d.shift[0];
            x[1] += f * d.shift[1];
        }
        for (v, n) in x.iter_mut().zip(&noise) {
            if let Some(n) = n {
                *v += n.sample(&mut rng);
            }
        }
        samples.push(TimedSample::labeled(i as f64 * spec.dt, x.to_vec(), class));
    }

    IngestedStream {
        samples,
        class_names: (0..classes).map(|c| format!("c{c}")).collect(),
        feature_names: vec!["x0".into(), "x1".into()],
    }
}

/// Writes `t,<features>,label` with labels rendered through `class_names`.
pub fn write_csv(stream: &IngestedStream, path: &Path) -> Result<(), HarnessError> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(out, "t,{},label", stream.feature_names.join(","))?;
    for s in &stream.samples {
        let label = s.label.map_or("", |l| stream.class_names[l].as_str());
        let xs: Vec<String> = s.x.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{},{},{}", s.t, xs.join(","), label)?;
    }
    out.flush()?;
    Ok(())
}
