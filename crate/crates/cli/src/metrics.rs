//! Accuracy, precision and recall over a 3×3 confusion matrix.
//!
//! Precision and recall are macro averages over the yes and no classes;
//! an unknown prediction is an abstention. A class whose denominator is zero
//! is left out of the average. If every class is left out the value is 1.0
//! and the matching `*_undefined` flag is set.

use entail_core::Label;
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Metrics {
    pub total: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    /// `confusion[gold][predicted]`, indexed yes, no, unknown.
    pub confusion: [[usize; 3]; 3],
}

fn macro_avg(parts: impl Iterator<Item = (usize, usize)>) -> (f64, bool) {
    let ratios: Vec<f64> = parts.filter(|&(_, d)| d > 0).map(|(n, d)| n as f64 / d as f64).collect();
    if ratios.is_empty() {
        (1.0, true)
    } else {
        (ratios.iter().sum::<f64>() / ratios.len() as f64, false)
    }
}

impl Metrics {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Metrics {
        let mut confusion = [[0usize; 3]; 3];
        for (gold, pred) in pairs {
            confusion[gold.index()][pred.index()] += 1;
        }
        Metrics::from_confusion(confusion)
    }

    pub fn from_confusion(confusion: [[usize; 3]; 3]) -> Metrics {
        let total: usize = confusion.iter().flatten().sum();
        let correct: usize = (0..3).map(|i| confusion[i][i]).sum();
        let decisive = [Label::Yes.index(), Label::No.index()];
        let predicted = |c: usize| (0..3).map(|g| confusion[g][c]).sum::<usize>();
        let gold = |c: usize| confusion[c].iter().sum::<usize>();
        let (precision, precision_undefined) = macro_avg(decisive.iter().map(|&c| (confusion[c][c], predicted(c))));
        let (recall, recall_undefined) = macro_avg(decisive.iter().map(|&c| (confusion[c][c], gold(c))));
        Metrics {
            total,
            correct,
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            precision,
            recall,
            precision_undefined,
            recall_undefined,
            confusion,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_correct() {
        let m = Metrics::from_pairs([(Label::Yes, Label::Yes), (Label::No, Label::No), (Label::Unknown, Label::Unknown)]);
        assert_eq!(m.accuracy, 1.0);
        assert_eq!((m.precision, m.recall), (1.0, 1.0));
        assert!(!m.precision_undefined);
    }

    #[test]
    fn abstaining_on_yes_gold() {
        let m = Metrics::from_pairs(vec![(Label::Yes, Label::Unknown); 4]);
        assert_eq!(m.recall, 0.0);
        assert_eq!(m.precision, 1.0);
        assert!(m.precision_undefined);
        assert!(!m.recall_undefined);
        assert_eq!(m.accuracy, 0.0);
    }

    #[test]
    fn eighty_four_of_a_hundred() {
        // gold yes 40: 34 yes, 6 unknown; gold no 30: 25 no, 5 unknown;
        // gold unknown 30: 25 unknown, 3 yes, 2 no.
        let c = [[34, 0, 6], [0, 25, 5], [3, 2, 25]];
        let m = Metrics::from_confusion(c);
        assert_eq!(m.total, 100);
        assert_eq!(m.correct, 84);
        assert!((m.accuracy - 0.84).abs() < 1e-12);
        let p = (34.0 / 37.0 + 25.0 / 27.0) / 2.0;
        let r = (34.0 / 40.0 + 25.0 / 30.0) / 2.0;
        assert!((m.precision - p).abs() < 1e-12);
        assert!((m.recall - r).abs() < 1e-12);
    }
}
