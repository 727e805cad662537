use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Scores at or above this are classified positive.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC curve with one point per distinct score, plus the Mann–Whitney AUC
/// using midranks for tied scores.
pub fn roc_auc(scores: &[f64], labels: &[f64]) -> Result<RocCurve> {
    if scores.len() != labels.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: labels.len(),
        });
    }
    if labels.iter().any(|&l| l != 0.0 && l != 1.0) {
        return Err(Error::NotBinary("labels".into()));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::NonFinite("scores".into()));
    }
    let n_pos = labels.iter().filter(|&&l| l == 1.0).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass("labels".into()));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Ascending pass: midranks of tie groups. Rank sums are half-integers, so
    // they are exact in f64.
    let mut pos_rank_sum = 0.0;
    let mut tie_groups: Vec<(f64, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let midrank = (i + j) as f64 / 2.0 + 1.0;
        let pos = order[i..=j].iter().filter(|&&k| labels[k] == 1.0).count();
        pos_rank_sum += midrank * pos as f64;
        tie_groups.push((scores[order[i]], pos, j - i + 1 - pos));
        i = j + 1;
    }
    let (np, nn) = (n_pos as f64, n_neg as f64);
    let u = pos_rank_sum - np * (np + 1.0) / 2.0;
    let auc = u / (np * nn);

    // Descending thresholds trace the curve from (0, 0) to (1, 1).
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let (mut tp, mut fp) = (0usize, 0usize);
    for &(threshold, pos, neg) in tie_groups.iter().rev() {
        tp += pos;
        fp += neg;
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / nn,
            tpr: tp as f64 / np,
        });
    }
    Ok(RocCurve { points, auc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn separated_and_tied() {
        let r = roc_auc(&[0.1, 0.2, 0.8, 0.9], &[0., 0., 1., 1.]).unwrap();
        assert_eq!(r.auc, 1.0);
        let r = roc_auc(&[0.5; 6], &[0., 1., 0., 1., 1., 0.]).unwrap();
        assert_eq!(r.auc, 0.5);
        assert_eq!(r.points.len(), 2);
        assert_eq!(r.points[1], RocPoint { threshold: 0.5, fpr: 1.0, tpr: 1.0 });
    }

    #[test]
    fn brute_force_pair_count() {
        // AUC = P(pos > neg) + ½ P(tie) counted over all pairs
        let s = [0.3, 0.7, 0.7, 0.1, 0.5, 0.7, 0.2];
        let l = [1., 0., 1., 0., 1., 1., 0.];
        let mut wins = 0.0;
        let mut pairs = 0.0;
        for i in 0..s.len() {
            for j in 0..s.len() {
                if l[i] == 1.0 && l[j] == 0.0 {
                    pairs += 1.0;
                    wins += if s[i] > s[j] { 1.0 } else if s[i] == s[j] { 0.5 } else { 0.0 };
                }
            }
        }
        let r = roc_auc(&s, &l).unwrap();
        assert!((r.auc - wins / pairs).abs() < 1e-15);
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(roc_auc(&[1., 2.], &[1., 1.]), Err(Error::SingleClass(_))));
    }

    proptest! {
        #[test]
        fn complement_and_monotone(
            data in prop::collection::vec((-5i32..5, prop::bool::ANY), 2..60)
                .prop_filter("both classes", |d| d.iter().any(|x| x.1) && d.iter().any(|x| !x.1))
        ) {
            let scores: Vec<f64> = data.iter().map(|d| d.0 as f64 * 0.5).collect();
            let labels: Vec<f64> = data.iter().map(|d| f64::from(u8::from(d.1))).collect();
            let neg: Vec<f64> = scores.iter().map(|s| -s).collect();
            let a = roc_auc(&scores, &labels).unwrap();
            let b = roc_auc(&neg, &labels).unwrap();
            prop_assert_eq!(a.auc + b.auc, 1.0);
            prop_assert!((0.0..=1.0).contains(&a.auc));
            for w in a.points.windows(2) {
                prop_assert!(w[1].fpr >= w[0].fpr && w[1].tpr >= w[0].tpr);
            }
            let last = a.points.last().unwrap();
            prop_assert_eq!((last.fpr, last.tpr), (1.0, 1.0));
        }
    }
}
