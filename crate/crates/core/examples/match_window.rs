//! Recover the time offset of a window cut from a known curve, with and
//! without candidate pruning, under both score weightings.
//!
//! With the full norm the weight `||F||` grows with time, so a loose fit at
//! a late offset can outscore a close one early in the pattern.

use governing_pattern::matching::ScoreNorm;
use governing_pattern::{
    match_offset, CurvePoint, GoverningPattern, MatchConfig, PrincipalCurve, TimedSample, Window,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let knots = [(0.0, 0.0), (10.0, 8.0), (20.0, 2.0), (30.0, 9.0), (40.0, 1.0)];
    let curve = PrincipalCurve::new(
        knots.iter().map(|&(t, x)| CurvePoint::new(t, vec![x])).collect(),
        0,
    )?;
    let pattern = GoverningPattern::new(vec![curve])?;
    let value_at = |t: f64| {
        let k = knots.windows(2).position(|w| t <= w[1].0).unwrap_or(knots.len() - 2);
        let ((t0, x0), (t1, x1)) = (knots[k], knots[k + 1]);
        x0 + (t - t0) / (t1 - t0) * (x1 - x0)
    };

    for true_offset in [3.0, 14.0, 27.5] {
        // Stream times are arbitrary; only spacing matters.
        let samples = (0..8)
            .map(|i| {
                let dt = i as f64 * 0.5;
                TimedSample::new(1000.0 + dt, vec![value_at(true_offset + dt)])
            })
            .collect();
        let w = Window::new(samples)?;
        for norm in [ScoreNorm::Full, ScoreNorm::Features] {
            let cfg = MatchConfig {
                score_norm: norm,
                ..MatchConfig::default()
            };
            let pruned = match_offset(&w, &pattern, &cfg)?;
            let full = match_offset(
                &w,
                &pattern,
                &MatchConfig {
                    prune_enabled: false,
                    ..cfg
                },
            )?;
            println!(
                "true {true_offset:>5} {norm:?}: pruned {:.2} ({} candidates), exhaustive {:.2} ({} candidates)",
                pruned.t_offset, pruned.candidates_evaluated, full.t_offset, full.candidates_evaluated
            );
        }
    }
    Ok(())
}
