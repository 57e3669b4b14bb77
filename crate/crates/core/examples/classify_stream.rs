//! Classify a held-out stream sample by sample, asking for labels under a
//! budget and adapting the pattern online.

use governing_pattern::harness::synthetic::{generate, SyntheticSpec};
use governing_pattern::harness::{run_session, split_chronological, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stream = generate(&SyntheticSpec::default());
    let (train, test) = split_chronological(&stream.samples, 0.6)?;
    let cfg = RunConfig::default();
    let out = run_session(&train, &test, stream.class_names.len(), &cfg)?;

    let m = &out.metrics;
    println!("train {} / test {} samples", train.len(), test.len());
    println!("accuracy {:.4}  F {:.4}  G {:.4}", m.accuracy, m.f_score, m.g_score);
    println!(
        "queries granted {} (most in one window: {}), apt {} inapt {}",
        m.apt_queries + m.inapt_queries,
        out.max_window_queries,
        m.apt_queries,
        m.inapt_queries
    );
    println!("confusion (rows = truth):");
    for row in out.confusion.rows() {
        println!("  {row:?}");
    }
    Ok(())
}
