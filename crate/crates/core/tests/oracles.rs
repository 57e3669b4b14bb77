mod common;

use common::*;
use governing_pattern::clpc::build_governing_pattern;
use governing_pattern::harness::synthetic::{generate, SyntheticSpec};
use governing_pattern::harness::{run_matrix, run_session, split_chronological, MatrixSpec, RateMode, RunConfig};
use governing_pattern::matching::{potential_offsets, similarity_score, ScoreNorm};
use governing_pattern::{
    match_offset, predict_label, MatchResult, project_onto_curve, CurvePoint, GoverningPattern, MatchConfig,
    PrincipalCurve, TimedSample, Window,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_pattern(rng: &mut ChaCha8Rng, dim: usize) -> (GoverningPattern, Vec<Poly>) {
    let n = rng.random_range(1..=3);
    let polys: Vec<Poly> = (0..n)
        .map(|_| {
            let k = rng.random_range(2..=6);
            let t0 = rng.random_range(0.0..3.0);
            random_poly(rng, k, dim, t0)
        })
        .collect();
    let curves = polys.iter().enumerate().map(|(c, p)| to_curve(p, c)).collect();
    (GoverningPattern::new(curves).unwrap(), polys)
}

fn random_window(rng: &mut ChaCha8Rng, dim: usize) -> Window {
    let mut t = rng.random_range(-20.0..20.0);
    let len = rng.random_range(1..=10);
    let samples = (0..len)
        .map(|_| {
            t += rng.random_range(0.1..2.0);
            TimedSample::new(t, (0..dim).map(|_| rng.random_range(-10.0..10.0)).collect())
        })
        .collect();
    Window::new(samples).unwrap()
}

#[test]
fn prediction_is_nearest_curve_at_matched_offset() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..300 {
        let (pattern, polys) = random_pattern(&mut rng, 2);
        let w = random_window(&mut rng, 2);
        let out = predict_label(&w, &pattern, &MatchConfig::default()).unwrap();
        let m = match_offset(&w, &pattern, &MatchConfig::default()).unwrap();
        let newest = w.newest();
        let mut q = vec![newest.t - w.samples()[0].t + m.t_offset];
        q.extend_from_slice(&newest.x);
        let dists: Vec<f64> = polys.iter().map(|p| nearest_foot(&q, std::slice::from_ref(p)).0).collect();
        let min = dists.iter().cloned().fold(f64::INFINITY, f64::min);
        // Accept any class within rounding of the minimum, preferring the first.
        let want = dists.iter().position(|&d| d <= min + 1e-12).unwrap();
        assert_eq!(out.predicted_class, want, "{dists:?}");
        assert_eq!(out.query_point, q);
    }
}

#[test]
fn shifting_to_origin_preserves_projections() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let (pattern, _) = random_pattern(&mut rng, 2);
        let built = build_governing_pattern(pattern.curves().to_vec()).unwrap();
        let shift = built.t_start() - pattern.t_start();
        for _ in 0..10 {
            let p = vec![rng.random_range(0.0..40.0), rng.random_range(-15.0..15.0), rng.random_range(-15.0..15.0)];
            let mut moved = p.clone();
            moved[0] += shift;
            for (a, b) in pattern.curves().iter().zip(built.curves()) {
                let da = project_onto_curve(&p, a).unwrap().distance;
                let db = project_onto_curve(&moved, b).unwrap().distance;
                assert!((da - db).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn pruned_search_never_beats_full_grid() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let (pattern, _) = random_pattern(&mut rng, 1);
        let w = random_window(&mut rng, 1);
        let pruned_cfg = MatchConfig::default();
        let full_cfg = MatchConfig {
            prune_enabled: false,
            ..pruned_cfg
        };
        let pruned = match_offset(&w, &pattern, &pruned_cfg).unwrap();
        let full = match_offset(&w, &pattern, &full_cfg).unwrap();
        assert!(pruned.score >= full.score);
        let grid: Vec<f64> = (0..501).map(|k| k as f64 * (pattern.t_end() / 500.0)).collect();
        let cands = potential_offsets(&w, &pattern, &pruned_cfg);
        assert!(cands.iter().all(|c| grid.contains(c)));
        assert!(cands.contains(&pruned.t_offset));
        if cands.contains(&full.t_offset) {
            assert_eq!(pruned, with_count(full, cands.len()));
        }
    }
}

fn with_count(m: MatchResult, n: usize) -> MatchResult {
    MatchResult {
        candidates_evaluated: n,
        ..m
    }
}

#[test]
fn window_cut_from_pattern_matches_its_start() {
    // Zigzag over [0, 50]; the window copies the curve over [7, 11].
    let knots: Vec<(f64, f64)> = (0..=10).map(|i| (5.0 * i as f64, if i % 2 == 0 { 0.0 } else { 6.0 + i as f64 })).collect();
    let curve = PrincipalCurve::new(knots.iter().map(|&(t, x)| CurvePoint::new(t, vec![x])).collect(), 0).unwrap();
    let pattern = GoverningPattern::new(vec![curve]).unwrap();
    let value = |t: f64| {
        let k = knots.windows(2).position(|w| t <= w[1].0).unwrap();
        let ((t0, x0), (t1, x1)) = (knots[k], knots[k + 1]);
        x0 + (t - t0) / (t1 - t0) * (x1 - x0)
    };
    let samples = (0..9).map(|i| {
        let t = 7.0 + 0.5 * i as f64;
        TimedSample::new(300.0 + t, vec![value(t)])
    });
    let w = Window::new(samples.collect()).unwrap();
    let step = 50.0 / 500.0;
    for norm in [ScoreNorm::Full, ScoreNorm::Features] {
        for prune in [true, false] {
            let cfg = MatchConfig {
                prune_enabled: prune,
                score_norm: norm,
                ..MatchConfig::default()
            };
            let m = match_offset(&w, &pattern, &cfg).unwrap();
            if norm == ScoreNorm::Features {
                assert!((m.t_offset - 7.0).abs() <= step, "{prune}: {}", m.t_offset);
            } else {
                // The time coordinate inflates ||F|| late in the pattern, where
                // a steep segment passes close to every sample in joint space.
                let plain: Vec<(f64, Vec<f64>)> = w.samples().iter().map(|s| (s.t, s.x.clone())).collect();
                let (off, _) = brute_force_match(&plain, &polylines(&pattern), step, 501, true);
                assert_eq!(m.t_offset, off);
            }
            for d in [-step, step] {
                let t = m.t_offset + d;
                if (0.0..=pattern.t_end()).contains(&t) {
                    assert!(m.score <= similarity_score(&w, &pattern, t, norm).unwrap());
                }
            }
        }
    }
}

#[test]
fn hidden_labels_do_not_influence_predictions() {
    let stream = generate(&SyntheticSpec {
        samples: 1200,
        ..SyntheticSpec::default()
    });
    let (train, test) = split_chronological(&stream.samples, 0.6).unwrap();
    let cfg = RunConfig::default();
    let base = run_session(&train, &test, 3, &cfg).unwrap();

    // Rewrite every label that was never queried; predictions and queries
    // must not change.
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let scrambled: Vec<TimedSample> = test
        .iter()
        .zip(&base.query_log)
        .map(|(s, q)| {
            let mut s = s.clone();
            if !q.queried {
                s.label = Some(rng.random_range(0..3));
            }
            s
        })
        .collect();
    let other = run_session(&train, &scrambled, 3, &cfg).unwrap();
    assert_eq!(other.predictions, base.predictions);
    assert_eq!(other.query_log, base.query_log);
    assert_eq!(other.pattern, base.pattern);
}

#[test]
fn matrix_means_match_repetition_rows() {
    let stream = generate(&SyntheticSpec {
        samples: 1500,
        ..SyntheticSpec::default()
    });
    let grid = MatrixSpec {
        rates: vec![RateMode::Fixed(1), RateMode::RandomUniform { min: 1, max: 10 }],
        ..MatrixSpec::default()
    };
    let base = RunConfig {
        repetitions: 4,
        ..RunConfig::default()
    };
    let report = run_matrix(&stream, &grid, &base);
    assert_eq!(report.cells.len(), 2);
    for cell in &report.cells {
        let acc: Vec<f64> = cell.reps.iter().map(|r| r.accuracy).collect();
        let mean = acc.iter().sum::<f64>() / acc.len() as f64;
        let var = acc.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / acc.len() as f64;
        let s = cell.accuracy.unwrap();
        assert!((s.mean - mean).abs() < 1e-12);
        assert!((s.variance - var).abs() < 1e-12);
        let seeds: Vec<u64> = cell.reps.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![0, 1, 2, 3]);
    }
    let csv = report.to_csv();
    assert!(csv.lines().nth(2).unwrap().starts_with("random:1:10,linear,"));
}
