//! Inject a drift into one class and compare how often each query strategy
//! spends its budget on samples that were misclassified.

use governing_pattern::harness::synthetic::{generate, DriftSpec, SyntheticSpec};
use governing_pattern::harness::{run_on_stream, RateMode, RunConfig};
use governing_pattern::{calibrate_threshold, QueryConfig, QueryStrategy};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let strategies = [QueryStrategy::Linear, QueryStrategy::Exponential, QueryStrategy::FixedPeriod];
    let mut pooled = [(0u64, 0u64); 3];
    for seed in 0..10 {
        let stream = generate(&SyntheticSpec {
            seed,
            drift: vec![DriftSpec {
                start: 1900,
                length: 100,
                ramp: 0,
                shift: [-18.0, 11.0],
                class: Some(0),
            }],
            ..SyntheticSpec::default()
        });
        let mut line = format!("seed {seed}:");
        for (k, s) in strategies.into_iter().enumerate() {
            let mut cfg = RunConfig {
                query: QueryConfig::new(s),
                ..RunConfig::default()
            };
            // Fire on at most half the budgeted rate when similarity is pure noise.
            let rate = cfg.budget as f64 / cfg.budget_window as f64 / 2.0;
            if let Some(t) = calibrate_threshold(s, cfg.query.history_capacity, rate) {
                cfg.query.threshold = t;
            }
            let m = run_on_stream(&stream, 0.6, RateMode::Fixed(1), &cfg)?.metrics;
            pooled[k].0 += m.apt_queries;
            pooled[k].1 += m.apt_queries + m.inapt_queries;
            line += &format!("  {} {}/{}", s.name(), m.apt_queries, m.apt_queries + m.inapt_queries);
        }
        println!("{line}");
    }
    for (s, (apt, total)) in strategies.iter().zip(pooled) {
        println!("{:<13} apt ratio {:.4} ({apt}/{total})", s.name(), apt as f64 / total as f64);
    }
    Ok(())
}
