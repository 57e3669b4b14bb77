//! Thin the stream by fixed and random sampling rates and compare accuracy
//! against the full-rate run.

use governing_pattern::harness::synthetic::{generate, SyntheticSpec};
use governing_pattern::harness::{run_on_stream, RateMode, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stream = generate(&SyntheticSpec::default());
    let cfg = RunConfig::default();
    let rates = [
        RateMode::Fixed(1),
        RateMode::Fixed(10),
        RateMode::RandomUniform { min: 1, max: 10 },
    ];
    for rate in rates {
        let r = run_on_stream(&stream, 0.6, rate, &cfg)?;
        println!(
            "{rate:<14} train {:>5} test {:>5} accuracy {:.4} F {:.4}",
            r.train_samples, r.test_samples, r.metrics.accuracy, r.metrics.f_score
        );
    }
    Ok(())
}
