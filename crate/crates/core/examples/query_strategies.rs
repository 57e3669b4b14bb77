//! Query decisions on hand-made similarity histories, threshold
//! calibration against a signal-free history, and budget capping.

use governing_pattern::sampling::{exponential_score, linear_query};
use governing_pattern::{
    calibrate_threshold, decide_query, noise_trigger_rate, BudgetState, QueryConfig,
    QueryStrategy, SimilarityHistory,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let histories: [&[f64]; 4] = [
        &[1.0, 2.0, 3.0, 4.0],
        &[4.0, 3.0, 2.0, 1.0],
        &[1.0, 0.5, 0.8, 0.2],
        &[5.0, 4.0, 4.5, 3.0, 2.0, 1.0],
    ];
    for h in histories {
        println!(
            "{h:?}: linear(0.6) {} exponential score {:.4}",
            linear_query(h, 0.6),
            exponential_score(h)
        );
    }

    for s in [QueryStrategy::Linear, QueryStrategy::Exponential] {
        let d = s.default_threshold();
        let t = calibrate_threshold(s, 10, 0.15).expect("history length in range");
        println!(
            "{}: default {d} fires on {:.1}% of random histories; {t} fires on {:.1}%",
            s.name(),
            100.0 * noise_trigger_rate(s, d, 10).unwrap(),
            100.0 * noise_trigger_rate(s, t, 10).unwrap()
        );
    }

    // A steadily falling similarity wants a label at every step.
    let cfg = QueryConfig::new(QueryStrategy::Linear);
    let mut history = SimilarityHistory::new(cfg.history_capacity);
    let mut budget = BudgetState::new(3, 10)?;
    let mut granted = Vec::new();
    for i in 0..25 {
        history.push(-(i as f64));
        if decide_query(&history, &cfg, &mut budget) {
            granted.push(i);
        }
    }
    println!("at most 3 per 10 consecutive samples: granted at {granted:?}");
    Ok(())
}
