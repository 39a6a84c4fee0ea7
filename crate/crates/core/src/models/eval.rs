use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// Accuracy plus macro-averaged precision and recall. `f1` is the harmonic
/// mean of the macro precision and recall.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub per_class: Vec<ClassMetrics>,
    /// `confusion[truth][pred]`
    pub confusion: Vec<Vec<usize>>,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn harmonic(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

pub fn evaluate(pred: &[usize], truth: &[usize], n_classes: usize) -> Result<EvalReport> {
    if pred.len() != truth.len() {
        return Err(Error::validation(format!(
            "{} predictions for {} true labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(Error::validation("cannot evaluate zero predictions"));
    }
    if n_classes == 0 {
        return Err(Error::validation("n_classes must be >= 1"));
    }
    let mut confusion = vec![vec![0usize; n_classes]; n_classes];
    for (i, (&p, &t)) in pred.iter().zip(truth).enumerate() {
        if p >= n_classes || t >= n_classes {
            return Err(Error::validation(format!(
                "item {i}: label out of range (pred {p}, truth {t}, {n_classes} classes)"
            )));
        }
        confusion[t][p] += 1;
    }
    let per_class: Vec<ClassMetrics> = (0..n_classes)
        .map(|c| {
            let tp = confusion[c][c];
            let support: usize = confusion[c].iter().sum();
            let predicted: usize = confusion.iter().map(|row| row[c]).sum();
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, support);
            ClassMetrics {
                precision,
                recall,
                f1: harmonic(precision, recall),
                support,
            }
        })
        .collect();
    let k = n_classes as f64;
    let precision = per_class.iter().map(|c| c.precision).sum::<f64>() / k;
    let recall = per_class.iter().map(|c| c.recall).sum::<f64>() / k;
    let trace: usize = (0..n_classes).map(|c| confusion[c][c]).sum();
    Ok(EvalReport {
        accuracy: ratio(trace, pred.len()),
        precision,
        recall,
        f1: harmonic(precision, recall),
        per_class,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binary_hand_example() {
        // TP=2 TN=1 FP=1 FN=0 with class 1 as positive.
        let truth = [1, 1, 0, 0];
        let pred = [1, 1, 0, 1];
        let r = evaluate(&pred, &truth, 2).unwrap();
        assert_eq!(r.accuracy, 0.75);
        let pos = &r.per_class[1];
        assert!((pos.precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(pos.recall, 1.0);
        assert!((pos.f1 - 0.8).abs() < 1e-15);
        assert_eq!(r.confusion, vec![vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn perfect_prediction() {
        let y = [0, 1, 2, 2, 1];
        let r = evaluate(&y, &y, 3).unwrap();
        assert_eq!((r.accuracy, r.precision, r.recall, r.f1), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn absent_class_contributes_zero() {
        let y = [0, 1, 0, 1];
        let r = evaluate(&y, &y, 3).unwrap();
        assert_eq!(r.per_class[2].precision, 0.0);
        assert_eq!(r.per_class[2].recall, 0.0);
        assert!((r.precision - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(evaluate(&[0, 3], &[0, 1], 3).is_err());
        assert!(evaluate(&[0], &[0, 1], 2).is_err());
        assert!(evaluate(&[], &[], 2).is_err());
    }

    proptest! {
        #[test]
        fn matches_brute_force_counter(pairs in prop::collection::vec((0usize..4, 0usize..4), 1..60)) {
            let pred: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let truth: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let r = evaluate(&pred, &truth, 4).unwrap();
            let mut correct = 0;
            for c in 0..4 {
                let (mut tp, mut fp, mut fneg) = (0, 0, 0);
                for (&p, &t) in pred.iter().zip(&truth) {
                    match (p == c, t == c) {
                        (true, true) => tp += 1,
                        (true, false) => fp += 1,
                        (false, true) => fneg += 1,
                        _ => {}
                    }
                }
                correct += tp;
                let prec = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
                let rec = if tp + fneg == 0 { 0.0 } else { tp as f64 / (tp + fneg) as f64 };
                prop_assert_eq!(r.per_class[c].precision, prec);
                prop_assert_eq!(r.per_class[c].recall, rec);
                prop_assert_eq!(r.confusion[c].iter().sum::<usize>(), tp + fneg);
            }
            prop_assert_eq!(r.accuracy, correct as f64 / pred.len() as f64);
        }
    }
}
