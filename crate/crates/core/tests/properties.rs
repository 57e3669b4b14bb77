mod common;

use common::*;
use governing_pattern::clpc::{build_governing_pattern, deviation_deg, prune_low_angle_traced};
use governing_pattern::harness::{resample, RateMode};
use governing_pattern::matching::{similarity_score, ScoreNorm};
use governing_pattern::metrics::ConfusionMatrix;
use governing_pattern::sampling::{exponential_query, exponential_score, linear_query};
use governing_pattern::{
    decide_query, fit_clpc, match_offset, online_update, project_nearest, project_onto_curve,
    BudgetState, CurvePoint, FitConfig, GoverningPattern, LearningConfig, MatchConfig, MatchResult,
    PredictionOutcome, PrincipalCurve, QueryConfig, QueryStrategy, SimilarityHistory, TimedSample,
    Window,
};
use proptest::prelude::*;

fn poly_strategy(dim: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(
        (0.5f64..10.0, prop::collection::vec(-10.0f64..10.0, dim)),
        2..8,
    )
    .prop_map(|steps| {
        let mut t = 0.0;
        steps
            .into_iter()
            .map(|(dt, y)| {
                t += dt;
                let mut v = vec![t];
                v.extend(y);
                v
            })
            .collect()
    })
}

fn pattern_strategy() -> impl Strategy<Value = (GoverningPattern, Vec<Poly>)> {
    prop::collection::vec(poly_strategy(2), 1..4).prop_map(|polys| {
        let curves = polys.iter().enumerate().map(|(c, p)| to_curve(p, c)).collect();
        (GoverningPattern::new(curves).unwrap(), polys)
    })
}

fn point3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-20.0f64..60.0, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn projection_beats_every_vertex(poly in poly_strategy(2), p in point3()) {
        let curve = to_curve(&poly, 0);
        let d = project_onto_curve(&p, &curve).unwrap().distance;
        for v in &poly {
            prop_assert!(d <= dist(&p, v) + 1e-12);
        }
    }

    #[test]
    fn nearest_is_min_over_curves((pattern, _) in pattern_strategy(), p in point3()) {
        let nearest = project_nearest(&p, &pattern).unwrap();
        let per_curve: Vec<f64> = pattern
            .curves()
            .iter()
            .map(|c| project_onto_curve(&p, c).unwrap().distance)
            .collect();
        let min = per_curve.iter().cloned().fold(f64::INFINITY, f64::min);
        prop_assert_eq!(nearest.distance, min);
        let first = per_curve.iter().position(|&d| d == min).unwrap();
        prop_assert_eq!(nearest.class_id, pattern.curves()[first].class_id());
        prop_assert_eq!(project_nearest(&p, &pattern).unwrap(), nearest);
    }

    #[test]
    fn projection_is_idempotent(poly in poly_strategy(2), p in point3()) {
        let curve = to_curve(&poly, 0);
        let first = project_onto_curve(&p, &curve).unwrap();
        let again = project_onto_curve(&first.point.to_vector(), &curve).unwrap();
        prop_assert!(again.distance <= 1e-9);
        prop_assert!(dist(&again.point.to_vector(), &first.point.to_vector()) <= 1e-9);
    }

    #[test]
    fn fitted_curves_are_time_monotone(
        xs in prop::collection::vec((0.01f64..1.0, -5.0f64..5.0), 2..120),
        err in 0.1f64..5.0,
    ) {
        let mut t = 0.0;
        let data: Vec<TimedSample> = xs
            .iter()
            .map(|&(dt, x)| {
                t += dt;
                TimedSample::labeled(t, vec![x], 0)
            })
            .collect();
        let cfg = FitConfig { error_threshold: err, ..FitConfig::default() };
        let a = fit_clpc(&data, 0, &cfg).unwrap();
        prop_assert!(a.points().windows(2).all(|w| w[0].t < w[1].t));
        prop_assert_eq!(fit_clpc(&data, 0, &cfg).unwrap(), a);
    }

    #[test]
    fn pruning_replays_cleanly(poly in poly_strategy(2), threshold in 0.0f64..60.0) {
        let curve = to_curve(&poly, 0);
        let (pruned, steps) = prune_low_angle_traced(&curve, threshold);
        // Replay the removals and check each one was below the threshold at
        // its turn.
        let mut kept: Vec<usize> = (0..poly.len()).collect();
        for s in &steps {
            prop_assert!(s.deviation_deg < threshold);
            let j = kept.iter().position(|&i| i == s.original_index).unwrap();
            prop_assert!(j > 0 && j + 1 < kept.len());
            let pts = curve.points();
            let dev = deviation_deg(&pts[kept[j - 1]], &pts[kept[j]], &pts[kept[j + 1]]);
            prop_assert_eq!(dev, s.deviation_deg);
            kept.remove(j);
        }
        let pts = pruned.points();
        prop_assert_eq!(pts.len(), kept.len());
        prop_assert_eq!(&pts[0], &curve.points()[0]);
        prop_assert_eq!(pts.last(), curve.points().last());
        for j in 1..pts.len().saturating_sub(1) {
            prop_assert!(deviation_deg(&pts[j - 1], &pts[j], &pts[j + 1]) >= threshold);
        }
    }

    #[test]
    fn building_twice_changes_nothing((pattern, _) in pattern_strategy()) {
        let once = build_governing_pattern(pattern.curves().to_vec()).unwrap();
        let twice = build_governing_pattern(once.curves().to_vec()).unwrap();
        prop_assert_eq!(once.t_start(), 0.0);
        prop_assert_eq!(twice, once);
    }

    #[test]
    fn matching_ignores_time_translation(
        (pattern, _) in pattern_strategy(),
        xs in prop::collection::vec((1u32..8, prop::collection::vec(-10.0f64..10.0, 2)), 2..8),
        shift in -1000i32..1000,
        prune in any::<bool>(),
    ) {
        // Quarter-step times keep the shift exact in floating point.
        let mut t = 0.0;
        let samples: Vec<TimedSample> = xs
            .iter()
            .map(|(dt, x)| {
                t += *dt as f64 * 0.25;
                TimedSample::new(t, x.clone())
            })
            .collect();
        let moved: Vec<TimedSample> = samples
            .iter()
            .map(|s| TimedSample::new(s.t + shift as f64, s.x.clone()))
            .collect();
        let cfg = MatchConfig { prune_enabled: prune, ..MatchConfig::default() };
        let a = match_offset(&Window::new(samples).unwrap(), &pattern, &cfg).unwrap();
        let b = match_offset(&Window::new(moved).unwrap(), &pattern, &cfg).unwrap();
        prop_assert_eq!(a, b);
        prop_assert!(a.score.is_finite());
    }

    #[test]
    fn score_is_finite(
        (pattern, _) in pattern_strategy(),
        x in prop::collection::vec(-1e3f64..1e3, 2),
        frac in 0.0f64..=1.0,
    ) {
        let w = Window::new(vec![TimedSample::new(0.0, x)]).unwrap();
        for norm in [ScoreNorm::Full, ScoreNorm::Features] {
            let s = similarity_score(&w, &pattern, frac * pattern.t_end(), norm).unwrap();
            prop_assert!(s.is_finite());
        }
    }

    #[test]
    fn strategies_ignore_monotone_rescaling(
        h in prop::collection::vec(-50i32..50, 0..20),
        scale in 1i32..5,
        offset in -10i32..10,
        threshold in 0.0f64..1.0,
    ) {
        let a: Vec<f64> = h.iter().map(|&v| v as f64).collect();
        let b: Vec<f64> = h.iter().map(|&v| (scale * v + offset) as f64).collect();
        prop_assert_eq!(linear_query(&a, threshold), linear_query(&b, threshold));
        prop_assert_eq!(exponential_score(&a), exponential_score(&b));
    }

    #[test]
    fn raising_threshold_never_adds_queries(
        h in prop::collection::vec(-5i32..5, 0..20),
        t1 in 0.0f64..2.0,
        dt in 0.0f64..2.0,
    ) {
        let h: Vec<f64> = h.iter().map(|&v| v as f64).collect();
        let t2 = t1 + dt;
        prop_assert!(!linear_query(&h, t2) || linear_query(&h, t1));
        prop_assert!(!exponential_query(&h, t2) || exponential_query(&h, t1));
    }

    #[test]
    fn all_decreasing_closed_form(len in 2usize..25) {
        // c doubles every step, so q = 2^(0 + 1 + ... + (L-2)).
        let h: Vec<f64> = (0..len).rev().map(|v| v as f64).collect();
        let l = len as i32;
        prop_assert_eq!(exponential_score(&h), 2f64.powi((l - 1) * (l - 4) / 2));
        prop_assert!(linear_query(&h, 1.0));
    }

    #[test]
    fn budget_holds_in_every_window(
        demand in prop::collection::vec(any::<bool>(), 1..600),
        budget in 0usize..20,
        extra in 0usize..60,
        strategy in prop::sample::select(vec![QueryStrategy::Linear, QueryStrategy::FixedPeriod]),
    ) {
        let window = budget.max(1) + extra;
        let cfg = QueryConfig { strategy, threshold: 1.0, history_capacity: 10 };
        let yes = SimilarityHistory::from_values(&[2.0, 1.0], 10);
        let no = SimilarityHistory::from_values(&[1.0, 2.0], 10);
        let mut b = BudgetState::new(budget, window).unwrap();
        let grants: Vec<bool> = demand
            .iter()
            .map(|&d| decide_query(if d { &yes } else { &no }, &cfg, &mut b))
            .collect();
        for w in grants.windows(window.min(grants.len())) {
            prop_assert!(w.iter().filter(|&&g| g).count() <= budget);
        }
    }

    #[test]
    fn update_moves_two_points_of_one_curve(
        (pattern, _) in pattern_strategy(),
        p in point3(),
        alpha in 0.0f64..=1.0,
        correct in any::<bool>(),
    ) {
        let projection = project_nearest(&p, &pattern).unwrap();
        let class = projection.class_id;
        let seg = projection.segment_index;
        let outcome = PredictionOutcome {
            predicted_class: class,
            match_result: MatchResult { t_offset: 0.0, score: 0.0, candidates_evaluated: 0 },
            projection,
            query_point: p,
        };
        let truth = if correct { class } else { class + 1 };
        let moved = online_update(&pattern, &outcome, truth, &LearningConfig { alpha, enabled: true }).unwrap();
        for (a, b) in pattern.curves().iter().zip(moved.curves()) {
            prop_assert_eq!(a.len(), b.len());
            prop_assert!(b.points().windows(2).all(|w| w[0].t < w[1].t));
            for (i, (pa, pb)) in a.points().iter().zip(b.points()).enumerate() {
                if a.class_id() != class || (i != seg && i != seg + 1) {
                    prop_assert_eq!(pa, pb);
                }
            }
        }
    }

    #[test]
    fn confusion_diagonal_counts_correct(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..200)) {
        let mut m = ConfusionMatrix::new(4);
        for &(t, p) in &pairs {
            m.record(t, p);
        }
        let counts = m.counts();
        let correct = pairs.iter().filter(|(t, p)| t == p).count() as u64;
        prop_assert_eq!(counts.classes.iter().map(|c| c.tp).sum::<u64>(), correct);
        prop_assert_eq!(counts.accuracy(), correct as f64 / pairs.len() as f64);
    }

    #[test]
    fn resampling_keeps_order_and_times(
        n in 0usize..300,
        c in 1usize..12,
        lo in 1usize..5,
        span in 0usize..6,
        seed in any::<u64>(),
    ) {
        let stream: Vec<TimedSample> = (0..n).map(|i| TimedSample::new(i as f64 * 0.5, vec![i as f64])).collect();
        let fixed = resample(&stream, RateMode::Fixed(c), seed);
        prop_assert_eq!(fixed.len(), n.div_ceil(c));
        prop_assert!(fixed.iter().enumerate().all(|(k, s)| s == &stream[k * c]));
        let random = resample(&stream, RateMode::RandomUniform { min: lo, max: lo + span }, seed);
        prop_assert!(random.windows(2).all(|w| w[0].t < w[1].t));
        prop_assert!(random.iter().all(|s| s == &stream[s.x[0] as usize]));
    }
}

#[test]
fn collinear_pruning_moves_no_vertex() {
    let curve = PrincipalCurve::new(
        (0..6).map(|i| CurvePoint::new(i as f64, vec![2.0 * i as f64 + 1.0])).collect(),
        0,
    )
    .unwrap();
    let (pruned, _) = prune_low_angle_traced(&curve, 5.0);
    assert_eq!(pruned.len(), 2);
    for v in curve.points() {
        assert!(project_onto_curve(&v.to_vector(), &pruned).unwrap().distance < 1e-12);
    }
}
