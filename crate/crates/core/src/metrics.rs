//! Confusion accounting, F-score / G-score and query-quality counters.

use serde::{Deserialize, Serialize};

/// One-vs-rest counts for a single class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCounts {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ClassCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }
}

/// Per-class counts plus the number of scored samples.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub classes: Vec<ClassCounts>,
    pub total: u64,
}

impl ConfusionCounts {
    pub fn correct(&self) -> u64 {
        self.classes.iter().map(|c| c.tp).sum()
    }

    pub fn accuracy(&self) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.correct() as f64 / self.total as f64
        }
    }
}

/// Square confusion matrix, rows = true class, columns = predicted class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(num_classes: usize) -> Self {
        Self {
            counts: vec![vec![0; num_classes]; num_classes],
        }
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, truth: usize, predicted: usize) {
        self.grow_to(truth.max(predicted) + 1);
        self.counts[truth][predicted] += 1;
    }

    pub fn rows(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn counts(&self) -> ConfusionCounts {
        let n = self.counts.len();
        let total = self.total();
        let classes = (0..n)
            .map(|l| {
                let tp = self.counts[l][l];
                let fn_ = self.counts[l].iter().sum::<u64>() - tp;
                let fp = (0..n).map(|r| self.counts[r][l]).sum::<u64>() - tp;
                ClassCounts {
                    tp,
                    fp,
                    fn_,
                    tn: total - tp - fp - fn_,
                }
            })
            .collect();
        ConfusionCounts { classes, total }
    }

    /// Adds another shard's counts into this one.
    pub fn merge(&mut self, other: &ConfusionMatrix) {
        self.grow_to(other.counts.len());
        for (r, row) in other.counts.iter().enumerate() {
            for (c, v) in row.iter().enumerate() {
                self.counts[r][c] += v;
            }
        }
    }

    fn grow_to(&mut self, n: usize) {
        if n <= self.counts.len() {
            return;
        }
        for row in &mut self.counts {
            row.resize(n, 0);
        }
        self.counts.resize(n, vec![0; n]);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub value: f64,
    /// Set when the score's denominator was zero and the value defaulted to 0.
    pub zero_support: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSummary {
    pub per_class: Vec<ClassScore>,
    pub macro_avg: f64,
}

fn ratio(num: f64, den: f64) -> ClassScore {
    if den == 0.0 {
        ClassScore {
            value: 0.0,
            zero_support: true,
        }
    } else {
        ClassScore {
            value: num / den,
            zero_support: false,
        }
    }
}

/// `(1+b^2) TP / ((1+b^2) TP + FP + b^2 FN)`.
pub fn f_beta(c: &ClassCounts, beta: f64) -> ClassScore {
    let b2 = beta * beta;
    let tp = c.tp as f64;
    ratio((1.0 + b2) * tp, (1.0 + b2) * tp + c.fp as f64 + b2 * c.fn_ as f64)
}

/// `TP / (TP + FP + b FN)`.
pub fn g_beta(c: &ClassCounts, beta: f64) -> ClassScore {
    let tp = c.tp as f64;
    ratio(tp, tp + c.fp as f64 + beta * c.fn_ as f64)
}

/// Weighted mean `(1/N) sum C_l s_l`; missing weights count as 1.
fn macro_average(scores: &[ClassScore], weights: Option<&[f64]>) -> f64 {
    if scores.is_empty() {
        return 0.0;
    }
    let sum: f64 = scores
        .iter()
        .enumerate()
        .map(|(i, s)| weights.and_then(|w| w.get(i).copied()).unwrap_or(1.0) * s.value)
        .sum();
    sum / scores.len() as f64
}

pub fn f_score(counts: &ConfusionCounts, beta: f64) -> ScoreSummary {
    f_score_weighted(counts, beta, None)
}

pub fn f_score_weighted(counts: &ConfusionCounts, beta: f64, weights: Option<&[f64]>) -> ScoreSummary {
    let per_class: Vec<ClassScore> = counts.classes.iter().map(|c| f_beta(c, beta)).collect();
    let macro_avg = macro_average(&per_class, weights);
    ScoreSummary {
        per_class,
        macro_avg,
    }
}

pub fn g_score(counts: &ConfusionCounts, beta: f64) -> ScoreSummary {
    g_score_weighted(counts, beta, None)
}

pub fn g_score_weighted(counts: &ConfusionCounts, beta: f64, weights: Option<&[f64]>) -> ScoreSummary {
    let per_class: Vec<ClassScore> = counts.classes.iter().map(|c| g_beta(c, beta)).collect();
    let macro_avg = macro_average(&per_class, weights);
    ScoreSummary {
        per_class,
        macro_avg,
    }
}

/// Granted queries split by whether the prediction they revealed was wrong
/// (apt) or right (inapt).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryQuality {
    pub apt: u64,
    pub inapt: u64,
}

impl QueryQuality {
    pub fn record(&mut self, predicted: usize, truth: usize) {
        if predicted != truth {
            self.apt += 1;
        } else {
            self.inapt += 1;
        }
    }

    pub fn total(&self) -> u64 {
        self.apt + self.inapt
    }

    /// `apt / (apt + inapt)`, or `None` when no query was issued.
    pub fn ratio(&self) -> Option<f64> {
        (self.total() > 0).then(|| self.apt as f64 / self.total() as f64)
    }

    pub fn merge(&mut self, other: &QueryQuality) {
        self.apt += other.apt;
        self.inapt += other.inapt;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub accuracy: f64,
    pub f_score: f64,
    pub g_score: f64,
    pub f_per_class: Vec<ClassScore>,
    pub g_per_class: Vec<ClassScore>,
    pub counts: ConfusionCounts,
    pub apt_queries: u64,
    pub inapt_queries: u64,
    pub apt_ratio: Option<f64>,
}

impl MetricsReport {
    pub fn from_parts(matrix: &ConfusionMatrix, queries: &QueryQuality, beta: f64) -> Self {
        let counts = matrix.counts();
        let f = f_score(&counts, beta);
        let g = g_score(&counts, beta);
        Self {
            accuracy: counts.accuracy(),
            f_score: f.macro_avg,
            g_score: g.macro_avg,
            f_per_class: f.per_class,
            g_per_class: g.per_class,
            counts,
            apt_queries: queries.apt,
            inapt_queries: queries.inapt,
            apt_ratio: queries.ratio(),
        }
    }

    pub fn record_query(&mut self, predicted: usize, truth: usize) {
        let mut q = QueryQuality {
            apt: self.apt_queries,
            inapt: self.inapt_queries,
        };
        q.record(predicted, truth);
        self.apt_queries = q.apt;
        self.inapt_queries = q.inapt;
        self.apt_ratio = q.ratio();
        self.inapt_queries = q.inapt;
        self.apt_ratio = q.ratio();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_class() {
        let c = ClassCounts::new(5, 0, 0, 0);
        assert_eq!(f_beta(&c, 1.0).value, 1.0);
        assert_eq!(g_beta(&c, 1.0).value, 1.0);
    }

    #[test]
    fn worked_case() {
        let c = ClassCounts::new(3, 1, 2, 0);
        assert_eq!(f_beta(&c, 1.0).value, 6.0 / 9.0);
        assert_eq!(g_beta(&c, 1.0).value, 0.5);
    }

    #[test]
    fn zero_support_flagged() {
        let c = ClassCounts::default();
        let f = f_beta(&c, 1.0);
        assert_eq!((f.value, f.zero_support), (0.0, true));
        assert!(g_beta(&c, 1.0).zero_support);
    }

    #[test]
    fn zero_support_class_pulls_macro_down() {
        let mut m = ConfusionMatrix::new(3);
        m.record(0, 0);
        m.record(1, 1);
        let f = f_score(&m.counts(), 1.0);
        assert!(f.per_class[2].zero_support);
        assert!((f.macro_avg - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn matrix_counts_are_consistent() {
        let mut m = ConfusionMatrix::new(3);
        for (t, p) in [(0, 0), (0, 1), (1, 1), (2, 1), (2, 2), (2, 2)] {
            m.record(t, p);
        }
        let c = m.counts();
        assert_eq!(c.total, 6);
        assert_eq!(c.correct(), 4);
        assert_eq!(c.classes[1], ClassCounts::new(1, 2, 0, 3));
        for cc in &c.classes {
            assert_eq!(cc.tp + cc.fp + cc.fn_ + cc.tn, c.total);
        }
    }

    #[test]
    fn matrix_grows_for_unseen_classes() {
        let mut m = ConfusionMatrix::new(1);
        m.record(2, 0);
        assert_eq!(m.num_classes(), 3);
        assert_eq!(m.total(), 1);
    }

    #[test]
    fn merge_adds_counts() {
        let mut a = ConfusionMatrix::new(2);
        a.record(0, 0);
        let mut b = ConfusionMatrix::new(3);
        b.record(2, 1);
        a.merge(&b);
        assert_eq!(a.total(), 2);
        assert_eq!(a.rows()[2][1], 1);
    }

    #[test]
    fn query_quality() {
        let mut r = MetricsReport::from_parts(&ConfusionMatrix::new(2), &QueryQuality::default(), 1.0);
        assert_eq!(r.apt_ratio, None);
        r.record_query(1, 2);
        assert_eq!((r.apt_queries, r.inapt_queries), (1, 0));
        r.record_query(1, 1);
        assert_eq!((r.apt_queries, r.inapt_queries), (1, 1));

        let q = QueryQuality { apt: 3, inapt: 7 };
        assert!((q.ratio().unwrap() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn weights_scale_macro() {
        let counts = ConfusionCounts {
            classes: vec![ClassCounts::new(1, 0, 0, 1), ClassCounts::new(0, 0, 1, 1)],
            total: 2,
        };
        let f = f_score_weighted(&counts, 1.0, Some(&[2.0, 1.0]));
        assert_eq!(f.macro_avg, 1.0);
    }

    #[test]
    fn report_records_queries() {
        let mut r = MetricsReport::from_parts(&ConfusionMatrix::new(2), &QueryQuality::default(), 1.0);
        assert_eq!(r.apt_ratio, None);
        r.record_query(1, 0);
        r.record_query(1, 1);
        assert_eq!((r.apt_queries, r.inapt_queries, r.apt_ratio), (1, 1, Some(0.5)));
    }
}
