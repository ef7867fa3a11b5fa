//! Score-based binary classification metrics: accuracy, ROC/AUC, F1.
//!
//! AUC is the Mann–Whitney statistic `P(score_fake > score_real) +
//! ½·P(tie)`, computed exactly from average ranks in O(n log n).
//! Accuracy and F1 need a decision threshold: either a fixed value
//! (default 0.5) or the Youden point (maximizing TPR − FPR on the ROC).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ground-truth class of a scored sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Real,
    Fake,
}

impl Label {
    pub fn parse(token: &str) -> Option<Label> {
        match token {
            "real" => Some(Label::Real),
            "fake" => Some(Label::Fake),
            _ => None,
        }
    }
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Label::Real => "real",
            Label::Fake => "fake",
        })
    }
}

/// One detector verdict: the true label and a score in [0, 1] where
/// higher means "more fake".
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoredSample {
    pub label: Label,
    pub score: f64,
}

impl ScoredSample {
    pub fn new(label: Label, score: f64) -> Self {
        Self { label, score }
    }
}

/// How the accuracy/F1 threshold is picked.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "lowercase")]
pub enum ThresholdPolicy {
    /// Predict fake iff score >= value.
    Fixed { value: f64 },
    /// The ROC point maximizing TPR − FPR; ties resolve to the lowest
    /// threshold.
    Youden,
}

impl Default for ThresholdPolicy {
    fn default() -> Self {
        ThresholdPolicy::Fixed { value: 0.5 }
    }
}

/// The §-style metric bundle for one evaluation cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub acc: f64,
    pub auc: f64,
    pub f1: f64,
    pub threshold: f64,
    pub n_real: usize,
    pub n_fake: usize,
}

fn validate_scores(samples: &[ScoredSample]) -> Result<()> {
    for s in samples {
        if !s.score.is_finite() || !(0.0..=1.0).contains(&s.score) {
            return Err(Error::Param(format!(
                "sample score must be finite in [0, 1], got {}",
                s.score
            )));
        }
    }
    Ok(())
}

fn class_counts(samples: &[ScoredSample]) -> (usize, usize) {
    let n_fake = samples.iter().filter(|s| s.label == Label::Fake).count();
    (samples.len() - n_fake, n_fake)
}

/// Area under the ROC curve via average ranks; ties get half credit.
/// Needs at least one sample of each class.
pub fn auc(samples: &[ScoredSample]) -> Result<f64> {
    validate_scores(samples)?;
    let (n_real, n_fake) = class_counts(samples);
    if n_real == 0 || n_fake == 0 {
        return Err(Error::UndefinedMetric(format!(
            "auc needs both classes, got {n_real} real / {n_fake} fake"
        )));
    }

    let mut order: Vec<usize> = (0..samples.len()).collect();
    order.sort_by(|&a, &b| samples[a].score.total_cmp(&samples[b].score));

    // Sum of average ranks (1-based) over the fake class.
    let mut fake_rank_sum = 0.0f64;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len()
            && samples[order[j + 1]].score == samples[order[i]].score
        {
            j += 1;
        }
        let avg_rank = (i + 1 + j + 1) as f64 / 2.0;
        for &idx in &order[i..=j] {
            if samples[idx].label == Label::Fake {
                fake_rank_sum += avg_rank;
            }
        }
        i = j + 1;
    }

    let nf = n_fake as f64;
    let u = fake_rank_sum - nf * (nf + 1.0) / 2.0;
    Ok(u / (nf * n_real as f64))
}

/// Confusion counts at a threshold: predict fake iff score >= threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Confusion {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

pub fn confusion(samples: &[ScoredSample], threshold: f64) -> Confusion {
    let mut c = Confusion {
        true_pos: 0,
        false_pos: 0,
        true_neg: 0,
        false_neg: 0,
    };
    for s in samples {
        let predicted_fake = s.score >= threshold;
        match (s.label, predicted_fake) {
            (Label::Fake, true) => c.true_pos += 1,
            (Label::Fake, false) => c.false_neg += 1,
            (Label::Real, true) => c.false_pos += 1,
            (Label::Real, false) => c.true_neg += 1,
        }
    }
    c
}

/// Fraction of correct predictions at the threshold.
pub fn accuracy(samples: &[ScoredSample], threshold: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::UndefinedMetric("accuracy of an empty sample set".into()));
    }
    validate_scores(samples)?;
    let c = confusion(samples, threshold);
    Ok((c.true_pos + c.true_neg) as f64 / c.total() as f64)
}

/// F1 = 2·tp / (2·tp + fp + fn). With no positives anywhere
/// (tp = fp = fn = 0, the all-true-negative case) it is defined as 1.
pub fn f1(samples: &[ScoredSample], threshold: f64) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::UndefinedMetric("f1 of an empty sample set".into()));
    }
    validate_scores(samples)?;
    let c = confusion(samples, threshold);
    let denom = 2 * c.true_pos + c.false_pos + c.false_neg;
    if denom == 0 {
        return Ok(1.0);
    }
    Ok(2.0 * c.true_pos as f64 / denom as f64)
}

/// Youden threshold: the sample score maximizing TPR − FPR, lowest score
/// winning ties.
fn youden_threshold(samples: &[ScoredSample]) -> f64 {
    let mut candidates: Vec<f64> = samples.iter().map(|s| s.score).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let (n_real, n_fake) = class_counts(samples);
    let mut best = (f64::NEG_INFINITY, 0.0);
    for &t in &candidates {
        let c = confusion(samples, t);
        let tpr = c.true_pos as f64 / n_fake as f64;
        let fpr = c.false_pos as f64 / n_real as f64;
        let j = tpr - fpr;
        if j > best.0 + 1e-12 {
            best = (j, t);
        }
    }
    best.1
}

/// Bundle ACC/AUC/F1 using the given threshold policy. Both classes must
/// be present.
pub fn evaluate(samples: &[ScoredSample], policy: ThresholdPolicy) -> Result<EvalMetrics> {
    let (n_real, n_fake) = class_counts(samples);
    if n_real == 0 || n_fake == 0 {
        return Err(Error::UndefinedMetric(format!(
            "evaluation needs both classes, got {n_real} real / {n_fake} fake"
        )));
    }
    let auc_value = auc(samples)?;
    let threshold = match policy {
        ThresholdPolicy::Fixed { value } => value,
        ThresholdPolicy::Youden => youden_threshold(samples),
    };
    Ok(EvalMetrics {
        acc: accuracy(samples, threshold)?,
        auc: auc_value,
        f1: f1(samples, threshold)?,
        threshold,
        n_real,
        n_fake,
    })
}

/// O(n²) pairwise AUC used as the oracle in tests: wins count 1, ties ½.
#[doc(hidden)]
pub fn auc_brute_force(samples: &[ScoredSample]) -> Result<f64> {
    let (n_real, n_fake) = class_counts(samples);
    if n_real == 0 || n_fake == 0 {
        return Err(Error::UndefinedMetric("brute-force auc needs both classes".into()));
    }
    let mut credit = 0.0;
    for f in samples.iter().filter(|s| s.label == Label::Fake) {
        for r in samples.iter().filter(|s| s.label == Label::Real) {
            if f.score > r.score {
                credit += 1.0;
            } else if f.score == r.score {
                credit += 0.5;
            }
        }
    }
    Ok(credit / (n_real * n_fake) as f64)
}
