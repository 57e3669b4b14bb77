//! F- and G-scores from a confusion matrix, plus apt/inapt query counts.

use governing_pattern::metrics::{f_score, g_score, ConfusionMatrix, QueryQuality};

fn main() {
    let mut m = ConfusionMatrix::new(3);
    let pairs = [(0, 0), (0, 0), (0, 1), (1, 1), (1, 1), (1, 1), (2, 2), (2, 0), (2, 2), (1, 2)];
    for (truth, predicted) in pairs {
        m.record(truth, predicted);
    }
    let counts = m.counts();
    println!("accuracy {:.3}", counts.accuracy());
    for beta in [0.5, 1.0, 2.0] {
        let f = f_score(&counts, beta);
        let g = g_score(&counts, beta);
        println!("beta {beta}: F {:.4}  G {:.4}", f.macro_avg, g.macro_avg);
    }

    // A class that never occurs and is never predicted has no support.
    let mut sparse = ConfusionMatrix::new(3);
    sparse.record(0, 0);
    sparse.record(1, 0);
    let f = f_score(&sparse.counts(), 1.0);
    for (k, s) in f.per_class.iter().enumerate() {
        println!("class {k}: F {:.3} zero support {}", s.value, s.zero_support);
    }

    let mut q = QueryQuality::default();
    for (predicted, truth) in [(1, 2), (1, 1), (0, 0), (2, 0)] {
        q.record(predicted, truth);
    }
    println!("apt {} inapt {} ratio {:?}", q.apt, q.inapt, q.ratio());
}
