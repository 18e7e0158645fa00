//! Categorization and sentiment metrics for both tasks.
//!
//! Every metric is generic over [`Scalar`] so fixtures can be evaluated with
//! exact rationals. Predictions and gold units are matched by [`UnitKey`];
//! input order never matters.

use std::collections::{BTreeMap, HashMap};

use log::info;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{AspectCategory, ClassificationUnit, SentimentLabel, UnitKey, SENTIHOOD_CATEGORIES};
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq)]
pub enum MetricError {
    #[error("predictions and gold disagree on keys: {}", .missing.join(", "))]
    KeyMismatch { missing: Vec<String> },
    #[error("metric undefined: {0}")]
    Undefined(String),
    #[error("group {group} has {found} category units, expected {expected}")]
    GroupSize { group: String, found: usize, expected: usize },
}

/// Class distribution for one unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub review_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub category: AspectCategory,
    pub scores: BTreeMap<SentimentLabel, f64>,
    pub predicted: SentimentLabel,
}

/// Highest-scoring label; ties go to the earliest label in declaration order.
pub fn argmax<'a>(scores: impl IntoIterator<Item = (&'a SentimentLabel, &'a f64)>) -> Option<SentimentLabel> {
    let mut sorted: Vec<(SentimentLabel, f64)> = scores.into_iter().map(|(l, s)| (*l, *s)).collect();
    sorted.sort_by_key(|(l, _)| *l);
    let mut best: Option<(SentimentLabel, f64)> = None;
    for (l, s) in sorted {
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((l, s));
        }
    }
    best.map(|(l, _)| l)
}

impl Prediction {
    pub fn new(key: UnitKey, scores: BTreeMap<SentimentLabel, f64>) -> Self {
        let predicted = argmax(&scores).unwrap_or(SentimentLabel::None);
        Prediction { review_id: key.review_id, target: key.target, category: key.category, scores, predicted }
    }

    /// Prediction that puts all mass on one label.
    pub fn one_hot(key: UnitKey, label: SentimentLabel, labels: &[SentimentLabel]) -> Self {
        let scores = labels.iter().map(|&l| (l, if l == label { 1.0 } else { 0.0 })).collect();
        Prediction::new(key, scores)
    }

    pub fn key(&self) -> UnitKey {
        UnitKey { review_id: self.review_id.clone(), target: self.target.clone(), category: self.category.clone() }
    }

    pub fn score(&self, label: SentimentLabel) -> f64 {
        self.scores.get(&label).copied().unwrap_or(0.0)
    }

    /// Argmax restricted to `classes`.
    pub fn argmax_over(&self, classes: &[SentimentLabel]) -> SentimentLabel {
        let restricted: BTreeMap<SentimentLabel, f64> = classes.iter().map(|&c| (c, self.score(c))).collect();
        argmax(&restricted).unwrap_or(SentimentLabel::None)
    }

    /// Scores sum to one and `predicted` is their argmax.
    pub fn validate(&self) -> Result<(), String> {
        let sum: f64 = self.scores.values().sum();
        if (sum - 1.0).abs() > 1e-6 {
            return Err(format!("{}: scores sum to {sum}", self.key()));
        }
        if argmax(&self.scores) != Some(self.predicted) {
            return Err(format!("{}: predicted label is not the argmax", self.key()));
        }
        Ok(())
    }
}

fn align<'a>(
    preds: &'a [Prediction],
    golds: &'a [ClassificationUnit],
) -> Result<Vec<(&'a Prediction, &'a ClassificationUnit)>, MetricError> {
    let by_key: HashMap<UnitKey, &Prediction> = preds.iter().map(|p| (p.key(), p)).collect();
    let gold_keys: HashMap<UnitKey, ()> = golds.iter().map(|g| (g.key(), ())).collect();
    let mut missing: Vec<String> = golds
        .iter()
        .filter(|g| !by_key.contains_key(&g.key()))
        .map(|g| format!("no prediction for {}", g.key()))
        .collect();
    missing.extend(
        preds.iter().filter(|p| !gold_keys.contains_key(&p.key())).map(|p| format!("no gold unit for {}", p.key())),
    );
    if !missing.is_empty() {
        return Err(MetricError::KeyMismatch { missing });
    }
    Ok(golds.iter().map(|g| (by_key[&g.key()], g)).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prf<T> {
    pub precision: T,
    pub recall: T,
    pub f1: T,
}

/// Micro-averaged aspect detection: a unit is positive when its label is
/// not `none`.
pub fn semeval_categorization_prf<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
) -> Result<Prf<T>, MetricError> {
    let pairs = align(preds, golds)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (p, g) in pairs {
        match (!p.predicted.is_none(), !g.gold.is_none()) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = T::ratio(tp, tp + fp);
    let recall = T::ratio(tp, tp + fn_);
    let f1 = T::harmonic(&precision, &recall);
    Ok(Prf { precision, recall, f1 })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentClasses {
    Binary,
    Three,
    Four,
}

impl SentimentClasses {
    pub fn labels(self) -> &'static [SentimentLabel] {
        use SentimentLabel::*;
        match self {
            SentimentClasses::Binary => &[Negative, Positive],
            SentimentClasses::Three => &[Negative, Neutral, Positive],
            SentimentClasses::Four => &[Negative, Neutral, Positive, Conflict],
        }
    }
}

/// Accuracy over units whose gold label lies in the class set, predicting
/// the argmax over that set only.
pub fn semeval_sentiment_accuracy<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
    classes: SentimentClasses,
) -> Result<T, MetricError> {
    let labels = classes.labels();
    let pairs = align(preds, golds)?;
    let (mut correct, mut total) = (0, 0);
    for (p, g) in pairs.into_iter().filter(|(_, g)| labels.contains(&g.gold)) {
        total += 1;
        if p.argmax_over(labels) == g.gold {
            correct += 1;
        }
    }
    if total == 0 {
        return Err(MetricError::Undefined(format!("no gold units in the {classes:?} class set")));
    }
    Ok(T::ratio(correct, total))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    /// Detection and polarity must both match.
    #[default]
    DetectionAndPolarity,
    /// Only the none/not-none decision must match.
    DetectionOnly,
}

fn unit_correct(predicted: SentimentLabel, gold: SentimentLabel, strictness: Strictness) -> bool {
    match strictness {
        Strictness::DetectionAndPolarity => predicted == gold,
        Strictness::DetectionOnly => predicted.is_none() == gold.is_none(),
    }
}

type Group<'a> = Vec<(&'a Prediction, &'a ClassificationUnit)>;

fn target_groups<'a>(
    preds: &'a [Prediction],
    golds: &'a [ClassificationUnit],
) -> Result<BTreeMap<(String, Option<String>), Group<'a>>, MetricError> {
    let expected = SENTIHOOD_CATEGORIES.len();
    let mut groups: BTreeMap<(String, Option<String>), Group<'a>> = BTreeMap::new();
    for (p, g) in align(preds, golds)? {
        groups.entry((g.review_id.clone(), g.target.clone())).or_default().push((p, g));
    }
    for ((review, target), units) in &groups {
        if units.len() != expected {
            return Err(MetricError::GroupSize {
                group: format!("{review}/{}", target.as_deref().unwrap_or("-")),
                found: units.len(),
                expected,
            });
        }
    }
    Ok(groups)
}

/// Fraction of (sentence, target) groups with every category unit correct.
pub fn sentihood_strict_accuracy<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
    strictness: Strictness,
) -> Result<T, MetricError> {
    let groups = target_groups(preds, golds)?;
    if groups.is_empty() {
        return Err(MetricError::Undefined("no target groups".into()));
    }
    let correct = groups
        .values()
        .filter(|units| units.iter().all(|(p, g)| unit_correct(p.predicted, g.gold, strictness)))
        .count();
    Ok(T::ratio(correct, groups.len()))
}

/// Unit-level accuracy under the same correctness rule as strict accuracy.
pub fn unit_accuracy<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
    strictness: Strictness,
) -> Result<T, MetricError> {
    let pairs = align(preds, golds)?;
    if pairs.is_empty() {
        return Err(MetricError::Undefined("no units".into()));
    }
    let correct = pairs.iter().filter(|(p, g)| unit_correct(p.predicted, g.gold, strictness)).count();
    Ok(T::ratio(correct, pairs.len()))
}

/// Accuracy of each category over the target groups, averaged over
/// categories. Never below strict accuracy on the same groups.
pub fn mean_category_accuracy<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
    strictness: Strictness,
) -> Result<T, MetricError> {
    let groups = target_groups(preds, golds)?;
    if groups.is_empty() {
        return Err(MetricError::Undefined("no target groups".into()));
    }
    let mut per_category: BTreeMap<&AspectCategory, (usize, usize)> = BTreeMap::new();
    for (p, g) in groups.values().flatten() {
        let entry = per_category.entry(&g.category).or_default();
        entry.1 += 1;
        if unit_correct(p.predicted, g.gold, strictness) {
            entry.0 += 1;
        }
    }
    let sum = per_category.values().fold(T::zero(), |acc, &(correct, total)| acc + T::ratio(correct, total));
    Ok(sum / T::from_count(per_category.len()))
}

/// Per-target detection precision and recall, macro-averaged over targets.
///
/// A target with no gold aspects gets recall 1, and precision 1 only if
/// nothing was predicted for it. A target with gold aspects but no
/// predicted ones gets precision 0.
pub fn sentihood_macro_prf<T: Scalar>(
    preds: &[Prediction],
    golds: &[ClassificationUnit],
) -> Result<Prf<T>, MetricError> {
    let groups = target_groups(preds, golds)?;
    if groups.is_empty() {
        return Err(MetricError::Undefined("no target groups".into()));
    }
    let mut p_sum = T::zero();
    let mut r_sum = T::zero();
    for ((review, target), units) in &groups {
        let predicted = units.iter().filter(|(p, _)| !p.predicted.is_none()).count();
        let gold = units.iter().filter(|(_, g)| !g.gold.is_none()).count();
        let both = units.iter().filter(|(p, g)| !p.predicted.is_none() && !g.gold.is_none()).count();
        let (p, r) = if gold == 0 {
            info!("target {review}/{target:?} has no gold aspects; recall counted as 1");
            (if predicted == 0 { T::one() } else { T::zero() }, T::one())
        } else {
            (T::ratio(both, predicted), T::ratio(both, gold))
        };
        p_sum = p_sum + p;
        r_sum = r_sum + r;
    }
    let n = T::from_count(groups.len());
    let precision = p_sum / n.clone();
    let recall = r_sum / n;
    let f1 = T::harmonic(&precision, &recall);
    Ok(Prf { precision, recall, f1 })
}

pub fn sentihood_macro_f1<T: Scalar>(preds: &[Prediction], golds: &[ClassificationUnit]) -> Result<T, MetricError> {
    sentihood_macro_prf(preds, golds).map(|p| p.f1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AucMode {
    /// Score `1 - P(none)` against `gold != none`, over all units.
    AspectDetection,
    /// Score `P(positive)` against `gold == positive`, over units with a gold sentiment.
    Sentiment,
}

/// Area under the ROC curve in its rank-statistic form: the probability
/// that a random positive outscores a random negative, ties counting half.
pub fn roc_auc<T: Scalar>(scores: &[f64], labels: &[bool]) -> Result<T, MetricError> {
    assert_eq!(scores.len(), labels.len(), "one label per score");
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(MetricError::Undefined("AUC needs both positive and negative examples".into()));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // Twice the positive rank sum, with tied blocks sharing their mean rank.
    let mut rank_sum2: u128 = 0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start;
        while end + 1 < order.len() && scores[order[end + 1]] == scores[order[start]] {
            end += 1;
        }
        let twice_rank = (start + 1 + end + 1) as u128;
        let positives = order[start..=end].iter().filter(|&&i| labels[i]).count() as u128;
        rank_sum2 += twice_rank * positives;
        start = end + 1;
    }
    let (p, n) = (n_pos as u128, n_neg as u128);
    let numerator = rank_sum2 - p * (p + 1);
    let denominator = 2 * p * n;
    let convert = |x: u128| T::from_u128(x).ok_or_else(|| MetricError::Undefined("count overflow".into()));
    Ok(convert(numerator)? / convert(denominator)?)
}

pub fn auc<T: Scalar>(preds: &[Prediction], golds: &[ClassificationUnit], mode: AucMode) -> Result<T, MetricError> {
    let pairs = align(preds, golds)?;
    let (scores, labels): (Vec<f64>, Vec<bool>) = match mode {
        AucMode::AspectDetection => {
            pairs.iter().map(|(p, g)| (1.0 - p.score(SentimentLabel::None), !g.gold.is_none())).unzip()
        }
        AucMode::Sentiment => pairs
            .iter()
            .filter(|(_, g)| !g.gold.is_none())
            .map(|(p, g)| (p.score(SentimentLabel::Positive), g.gold == SentimentLabel::Positive))
            .unzip(),
    };
    roc_auc(&scores, &labels)
}
