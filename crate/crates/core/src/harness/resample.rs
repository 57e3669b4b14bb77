use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::HarnessError;
use crate::model::TimedSample;

/// Simulated sampling rate: keep the first of every `c` consecutive samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RateMode {
    Fixed(usize),
    /// A fresh `c` is drawn uniformly from `[min, max]` after each kept sample.
    RandomUniform { min: usize, max: usize },
}

impl RateMode {
    pub fn validate(&self) -> Result<(), HarnessError> {
        match *self {
            RateMode::Fixed(c) if c >= 1 => Ok(()),
            RateMode::RandomUniform { min, max } if min >= 1 && min <= max => Ok(()),
            other => Err(HarnessError::InvalidConfig(format!("bad rate {other}"))),
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, RateMode::RandomUniform { min, max } if min != max)
    }
}

impl Default for RateMode {
    fn default() -> Self {
        RateMode::Fixed(1)
    }
}

impl fmt::Display for RateMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateMode::Fixed(c) => write!(f, "fixed:{c}"),
            RateMode::RandomUniform { min, max } => write!(f, "random:{min}:{max}"),
        }
    }
}

impl FromStr for RateMode {
    type Err = String;

    /// Accepts `fixed:C` or `random:MIN:MAX`.
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| format!("bad rate number `{p}` in `{s}`"))
        };
        let mode = match parts.as_slice() {
            ["fixed", c] => RateMode::Fixed(num(c)?),
            ["random", a, b] => RateMode::RandomUniform {
                min: num(a)?,
                max: num(b)?,
            },
            _ => return Err(format!("unknown rate `{s}`; expected fixed:C or random:MIN:MAX")),
        };
        mode.validate().map_err(|e| e.to_string())?;
        Ok(mode)
    }
}

impl Serialize for RateMode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RateMode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Thins the stream without touching timestamps.
pub fn resample(stream: &[TimedSample], rate: RateMode, seed: u64) -> Vec<TimedSample> {
    match rate {
        RateMode::Fixed(c) => stream.iter().step_by(c.max(1)).cloned().collect(),
        RateMode::RandomUniform { min, max } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::new();
            let mut i = 0;
            while i < stream.len() {
                out.push(stream[i].clone());
                i += rng.random_range(min.max(1)..=max.max(min).max(1));
            }
            out
        }
    }
}

/// First `fraction` of the stream for training, the rest for testing.
pub fn split_chronological(
    stream: &[TimedSample],
    fraction: f64,
) -> Result<(Vec<TimedSample>, Vec<TimedSample>), HarnessError> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(HarnessError::InvalidConfig(format!(
            "split fraction {fraction} outside (0, 1)"
        )));
    }
    let cut = (stream.len() as f64 * fraction).round() as usize;
    if cut == 0 || cut >= stream.len() {
        return Err(HarnessError::EmptySplit(format!(
            "{} samples, fraction {fraction}",
            stream.len()
        )));
    }
    Ok((stream[..cut].to_vec(), stream[cut..].to_vec()))
}

/// Per-feature mean and standard deviation estimated on the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(samples: &[TimedSample]) -> Self {
        let d = samples.first().map_or(0, |s| s.dim());
        let n = samples.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for s in samples {
            for (m, x) in mean.iter_mut().zip(&s.x) {
                *m += x;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![0.0; d];
        for s in samples {
            for ((v, x), m) in var.iter_mut().zip(&s.x).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        // Constant features keep unit scale rather than dividing by zero.
        let std = var
            .iter()
            .map(|v| (v / n).sqrt())
            .map(|s| if s > 0.0 { s } else { 1.0 })
            .collect();
        Self { mean, std }
    }

    pub fn apply(&self, samples: &[TimedSample]) -> Vec<TimedSample> {
        samples
            .iter()
            .map(|s| {
                let mut out = s.clone();
                for ((x, m), sd) in out.x.iter_mut().zip(&self.mean).zip(&self.std) {
                    *x = (*x - m) / sd;
                }
                out
            })
            .collect()
    }
}
