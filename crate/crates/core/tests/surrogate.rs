mod common;

use auxsent::auxgen::PairRecord;
use auxsent::corpus::{enumerate_units, load_semeval, Split};
use auxsent::eval::metrics::semeval_categorization_prf;
use auxsent::eval::surrogate::{featurize, train, SurrogateConfig, SurrogateError};
use auxsent::{AspectCategory, SentimentLabel, Surrogate, Task};
use common::{fixture, name_only, signal_run_with, surrogate_f1};

fn pair(id: &str, category: &str, aux: &str, text: &str, gold: SentimentLabel) -> PairRecord {
    PairRecord {
        review_id: id.into(),
        target: None,
        category: AspectCategory::new(category),
        auxiliary_text: aux.into(),
        sentence_text: text.into(),
        gold_label: gold,
        fallback_used: false,
    }
}

fn toy() -> Vec<PairRecord> {
    let mut data = Vec::new();
    for i in 0..15 {
        data.push(pair(&format!("p{i}"), "food", "tasty", &format!("dish {i} was tasty"), SentimentLabel::Positive));
        data.push(pair(&format!("n{i}"), "food", "bland", &format!("dish {i} was bland"), SentimentLabel::Negative));
        data.push(pair(&format!("o{i}"), "price", "price", &format!("dish {i} arrived"), SentimentLabel::None));
    }
    data
}

#[test]
fn separable_pairs_are_fit_exactly() {
    let data = toy();
    let m: Surrogate = train(&data, Task::Absa, &SurrogateConfig::default()).unwrap();
    let preds = m.predict_all(&data);
    let correct = preds.iter().zip(&data).filter(|(p, d)| p.predicted == d.gold_label).count();
    assert_eq!(correct, data.len());
    for p in &preds {
        p.validate().unwrap();
        assert_eq!(p.scores.len(), Task::Absa.labels().len());
    }
}

#[test]
fn fixed_seed_gives_identical_predictions() {
    let data = toy();
    let config = SurrogateConfig { seed: 42, ..SurrogateConfig::default() };
    let a: Surrogate = train(&data, Task::Absa, &config).unwrap();
    let b: Surrogate = train(&data, Task::Absa, &config).unwrap();
    assert_eq!(a.predict_all(&data), b.predict_all(&data));
    assert_eq!(a.num_features(), b.num_features());
}

#[test]
fn semeval_units_become_one_prediction_each() {
    let d = load_semeval(fixture("running_example.xml"), Split::Test).unwrap();
    let units = enumerate_units(&d, &Task::Absa.categories());
    let text = |id: &str| d.reviews.iter().find(|r| r.id == id).unwrap().text.clone();
    let pairs: Vec<PairRecord> = units
        .iter()
        .map(|u| PairRecord {
            review_id: u.review_id.clone(),
            target: None,
            category: u.category.clone(),
            auxiliary_text: u.category.to_string(),
            sentence_text: text(&u.review_id),
            gold_label: u.gold,
            fallback_used: true,
        })
        .collect();
    let s1: Vec<_> = pairs.iter().filter(|p| p.review_id == "s1").collect();
    assert_eq!(s1.len(), 5);
    let m: Surrogate = train(&pairs, Task::Absa, &SurrogateConfig::default()).unwrap();
    let preds = m.predict_all(&pairs);
    assert_eq!(preds.len(), units.len());
    for p in &preds {
        assert!((p.scores.values().sum::<f64>() - 1.0).abs() < 1e-6);
    }
    semeval_categorization_prf::<f64>(&preds, &units).unwrap();
}

#[test]
fn degenerate_training_sets() {
    assert_eq!(train::<f64>(&[], Task::Absa, &SurrogateConfig::default()).unwrap_err(), SurrogateError::NoTrainingData);
    let bad = SurrogateConfig { learning_rate: 0.0, ..SurrogateConfig::default() };
    assert!(matches!(train::<f64>(&toy(), Task::Absa, &bad), Err(SurrogateError::Config(_))));
    // conflict is not a TABSA label
    let data = vec![pair("1", "price", "x", "x", SentimentLabel::Conflict)];
    assert!(matches!(
        train::<f64>(&data, Task::Tabsa, &SurrogateConfig::default()),
        Err(SurrogateError::UnexpectedLabel { .. })
    ));
}

#[test]
fn feature_namespaces_keep_auxiliary_and_review_words_apart() {
    let p = pair("1", "food", "Coffee outstanding", "the coffee", SentimentLabel::Positive);
    assert_eq!(featurize(&p), vec!["a:coffee", "a:outstanding", "s:coffee", "s:the"]);
}

/// Auxiliary sentences carry aspect signal that the bare aspect name does not.
#[test]
fn auxiliary_text_beats_aspect_name_only() {
    for seed in 0..3 {
        let run = signal_run_with(seed, common::SIGNAL_THRESHOLD);
        let with = surrogate_f1(&run.train_pairs, &run.test_pairs, &run.test_units);
        let without = surrogate_f1(&name_only(&run.train_pairs), &name_only(&run.test_pairs), &run.test_units);
        assert!(with - without >= 0.05, "seed {seed}: with {with:.3}, name only {without:.3}");
    }
}
