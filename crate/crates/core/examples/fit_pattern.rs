//! Fit one principal curve per class on a synthetic stream and show what
//! low-angle pruning removes.

use governing_pattern::clpc::{fit_clpc, prune_low_angle_traced};
use governing_pattern::harness::synthetic::{generate, SyntheticSpec};
use governing_pattern::{fit_governing_pattern, FitConfig, TimedSample};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let stream = generate(&SyntheticSpec {
        samples: 1800,
        ..SyntheticSpec::default()
    });
    let cfg = FitConfig::default();

    for class in 0..stream.class_names.len() {
        let own: Vec<TimedSample> = stream
            .samples
            .iter()
            .filter(|s| s.label == Some(class))
            .cloned()
            .collect();
        let raw = fit_clpc(&own, class, &cfg)?;
        let (pruned, steps) = prune_low_angle_traced(&raw, cfg.angle_threshold_deg);
        println!(
            "{}: {} samples, {} raw points, {} after pruning",
            stream.class_names[class],
            own.len(),
            raw.len(),
            pruned.len()
        );
        for s in steps {
            println!("  dropped point {} (turn {:.2} deg)", s.original_index, s.deviation_deg);
        }
    }

    let pattern = fit_governing_pattern(&stream.samples, &cfg)?;
    println!("pattern spans t in [{}, {}]", pattern.t_start(), pattern.t_end());
    for c in pattern.curves() {
        let pts: Vec<String> = c
            .points()
            .iter()
            .map(|p| format!("({:.1}; {:.1}, {:.1})", p.t, p.y[0], p.y[1]))
            .collect();
        println!("  class {}: {}", c.class_id(), pts.join(" "));
    }
    Ok(())
}
