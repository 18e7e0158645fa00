//! Scored metric bundles and their text rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::{ClassificationUnit, Task};
use crate::eval::metrics::{
    auc, semeval_categorization_prf, semeval_sentiment_accuracy, sentihood_macro_prf, sentihood_strict_accuracy,
    AucMode, MetricError, Prediction, SentimentClasses, Strictness,
};

/// Metric values for one run, all in [0, 1].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub task: Task,
    pub units: usize,
    pub values: BTreeMap<String, f64>,
}

/// Keys always present in a report of the given task, barring undefined sentiment scores.
pub fn report_keys(task: Task) -> &'static [&'static str] {
    match task {
        Task::Absa => &["precision", "recall", "f1", "acc_binary", "acc_3class", "acc_4class"],
        Task::Tabsa => &["strict_acc", "macro_f1", "aspect_auc", "sentiment_acc", "sentiment_auc"],
    }
}

fn optional(
    values: &mut BTreeMap<String, f64>,
    name: &str,
    result: Result<f64, MetricError>,
) -> Result<(), MetricError> {
    match result {
        Ok(v) => {
            values.insert(name.to_string(), v);
            Ok(())
        }
        Err(MetricError::Undefined(why)) => {
            warn!("{name} omitted: {why}");
            Ok(())
        }
        Err(e) => Err(e),
    }
}

pub fn score(task: Task, preds: &[Prediction], golds: &[ClassificationUnit]) -> Result<MetricsReport, MetricError> {
    score_with(task, preds, golds, Strictness::default())
}

/// Scores predictions against gold units. Key mismatches are errors;
/// metrics that are undefined on this data are left out with a warning.
pub fn score_with(
    task: Task,
    preds: &[Prediction],
    golds: &[ClassificationUnit],
    strictness: Strictness,
) -> Result<MetricsReport, MetricError> {
    let mut values = BTreeMap::new();
    match task {
        Task::Absa => {
            let prf = semeval_categorization_prf::<f64>(preds, golds)?;
            values.insert("precision".into(), prf.precision);
            values.insert("recall".into(), prf.recall);
            values.insert("f1".into(), prf.f1);
            for (name, classes) in [
                ("acc_binary", SentimentClasses::Binary),
                ("acc_3class", SentimentClasses::Three),
                ("acc_4class", SentimentClasses::Four),
            ] {
                optional(&mut values, name, semeval_sentiment_accuracy(preds, golds, classes))?;
            }
        }
        Task::Tabsa => {
            optional(&mut values, "strict_acc", sentihood_strict_accuracy(preds, golds, strictness))?;
            optional(&mut values, "macro_f1", sentihood_macro_prf::<f64>(preds, golds).map(|p| p.f1))?;
            optional(&mut values, "aspect_auc", auc(preds, golds, AucMode::AspectDetection))?;
            optional(&mut values, "sentiment_acc", semeval_sentiment_accuracy(preds, golds, SentimentClasses::Binary))?;
            optional(&mut values, "sentiment_auc", auc(preds, golds, AucMode::Sentiment))?;
        }
    }
    Ok(MetricsReport { task, units: golds.len(), values })
}

impl MetricsReport {
    pub fn get(&self, key: &str) -> Option<f64> {
        self.values.get(key).copied()
    }

    /// Two-level table in percent, `-` for omitted metrics.
    pub fn to_text(&self) -> String {
        let cell = |k: &str| match self.get(k) {
            Some(v) => format!("{:.2}", v * 100.0),
            None => "-".to_string(),
        };
        let mut out = String::new();
        match self.task {
            Task::Absa => {
                let _ = writeln!(out, "{:<30} | {:<26}", "Aspect categorization", "Aspect sentiment");
                let _ = writeln!(
                    out,
                    "{:>9} {:>9} {:>9} | {:>8} {:>8} {:>8}",
                    "Precision", "Recall", "F1", "Binary", "3-class", "4-class"
                );
                let _ = writeln!(
                    out,
                    "{:>9} {:>9} {:>9} | {:>8} {:>8} {:>8}",
                    cell("precision"),
                    cell("recall"),
                    cell("f1"),
                    cell("acc_binary"),
                    cell("acc_3class"),
                    cell("acc_4class")
                );
            }
            Task::Tabsa => {
                let _ = writeln!(out, "{:<26} | {:<17}", "Aspect", "Sentiment");
                let _ = writeln!(out, "{:>8} {:>8} {:>8} | {:>8} {:>8}", "Acc.", "F1", "AUC", "Acc.", "AUC");
                let _ = writeln!(
                    out,
                    "{:>8} {:>8} {:>8} | {:>8} {:>8}",
                    cell("strict_acc"),
                    cell("macro_f1"),
                    cell("aspect_auc"),
                    cell("sentiment_acc"),
                    cell("sentiment_auc")
                );
            }
        }
        let _ = writeln!(out, "units: {}", self.units);
        out
    }
}
