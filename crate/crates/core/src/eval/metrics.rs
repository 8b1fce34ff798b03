use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dataio::LabelVector;
use crate::error::{Error, Result};

/// Counts with class 1 (good) as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.tp + self.tn + self.fp + self.fn_
    }
}

pub fn confusion(y_true: &LabelVector, y_pred: &LabelVector) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Dimension(format!(
            "{} true labels vs {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    let mut cm = ConfusionMatrix::default();
    for (t, p) in y_true.iter().zip(y_pred.iter()) {
        match (t, p) {
            (1, 1) => cm.tp += 1,
            (0, 0) => cm.tn += 1,
            (0, 1) => cm.fp += 1,
            _ => cm.fn_ += 1,
        }
    }
    Ok(cm)
}

/// Ratios with a zero denominator are `None`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub confusion: ConfusionMatrix,
    pub accuracy: Option<f64>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub auc: Option<f64>,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Mann–Whitney AUC: the share of (positive, negative) pairs where the
/// positive scores higher, with ties worth one half. `None` unless both
/// classes occur.
pub fn auc(scores: &[f64], y_true: &LabelVector) -> Result<Option<f64>> {
    if scores.len() != y_true.len() {
        return Err(Error::Dimension(format!(
            "{} scores for {} labels",
            scores.len(),
            y_true.len()
        )));
    }
    if scores.iter().any(|s| s.is_nan()) {
        return Err(Error::InvalidArgument("NaN score".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Twice the Mann–Whitney U, kept integral so ties stay exact.
    let mut twice_u: u128 = 0;
    let mut neg_below: u128 = 0;
    let (mut n_pos, mut n_neg) = (0u128, 0u128);
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        let (mut pos, mut neg) = (0u128, 0u128);
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            if y_true.as_slice()[order[j]] == 1 {
                pos += 1;
            } else {
                neg += 1;
            }
            j += 1;
        }
        twice_u += 2 * pos * neg_below + pos * neg;
        neg_below += neg;
        n_pos += pos;
        n_neg += neg;
        i = j;
    }
    if n_pos == 0 || n_neg == 0 {
        return Ok(None);
    }
    Ok(Some(twice_u as f64 / (2 * n_pos * n_neg) as f64))
}

pub fn metrics(cm: &ConfusionMatrix, scores: &[f64], y_true: &LabelVector) -> Result<MetricsReport> {
    if cm.total() != y_true.len() {
        return Err(Error::Dimension(format!(
            "confusion matrix covers {} rows, labels {}",
            cm.total(),
            y_true.len()
        )));
    }
    let precision = ratio(cm.tp, cm.tp + cm.fp);
    let recall = ratio(cm.tp, cm.tp + cm.fn_);
    let f1 = match (precision, recall) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        _ => None,
    };
    Ok(MetricsReport {
        confusion: *cm,
        accuracy: ratio(cm.tp + cm.tn, cm.total()),
        precision,
        recall,
        f1,
        auc: auc(scores, y_true)?,
    })
}

/// One line of the metrics table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub split: String,
    pub model: String,
    pub report: MetricsReport,
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_else(|| "undefined".into())
}

/// CSV `split,model,accuracy,precision,recall,f1,auc,tp,tn,fp,fn`.
pub fn write_metrics<W: Write>(mut w: W, rows: &[MetricsRow]) -> std::io::Result<()> {
    writeln!(w, "split,model,accuracy,precision,recall,f1,auc,tp,tn,fp,fn")?;
    for r in rows {
        let m = &r.report;
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.split,
            r.model,
            opt(m.accuracy),
            opt(m.precision),
            opt(m.recall),
            opt(m.f1),
            opt(m.auc),
            m.confusion.tp,
            m.confusion.tn,
            m.confusion.fp,
            m.confusion.fn_
        )?;
    }
    Ok(())
}
