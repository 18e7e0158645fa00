use std::collections::{BTreeSet, HashSet};

use auxsent::corpus::AspectCategory;
use auxsent::llda::{fit, fit_with, LabeledDocument, LldaConfig, LldaError, LldaModel};
use auxsent::synth::{planted_topics, TopicCorpus};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn top_words(model: &LldaModel, topic: &AspectCategory, k: usize) -> Vec<String> {
    model.top_seeds(topic, k, &HashSet::new(), 1).unwrap().tokens().map(str::to_string).collect()
}

fn precision_at_10(corpus: &TopicCorpus, model: &LldaModel) -> Vec<f64> {
    corpus
        .topics
        .iter()
        .zip(&corpus.vocabularies)
        .map(|(t, planted)| {
            let hits = top_words(model, t, 10).iter().filter(|w| planted.contains(w)).count();
            hits as f64 / 10.0
        })
        .collect()
}

fn config(seed: u64, iterations: usize) -> LldaConfig {
    LldaConfig { iterations, seed, ..LldaConfig::default() }
}

#[test]
fn recovers_planted_topics() {
    let mut mean = [0.0; 4];
    for seed in 0..5 {
        let corpus = planted_topics(seed);
        let model = fit(&corpus.documents, &corpus.topics, &config(seed, 500)).unwrap();
        for (m, p) in mean.iter_mut().zip(precision_at_10(&corpus, &model)) {
            *m += p / 5.0;
        }
        // the 20 best words of each topic are its planted vocabulary
        for (t, planted) in corpus.topics.iter().zip(&corpus.vocabularies) {
            let top: BTreeSet<_> = top_words(&model, t, 20).into_iter().collect();
            let planted: BTreeSet<_> = planted.iter().cloned().collect();
            assert!(top.intersection(&planted).count() >= 16);
        }
    }
    assert!(mean.iter().all(|&p| p >= 0.8), "{mean:?}");
}

#[test]
fn label_restriction_and_count_conservation_after_every_sweep() {
    let corpus = planted_topics(7);
    let tokens: usize = corpus.documents.iter().map(|d| d.tokens.len()).sum();
    let mut sweeps = Vec::new();
    let model = fit_with(&corpus.documents, &corpus.topics, &config(7, 25), |m, sweep| {
        m.check_invariants().unwrap();
        let total: u64 = (0..m.topics().len()).map(|t| m.topic_total(t)).sum();
        assert_eq!(total as usize, tokens);
        sweeps.push(sweep);
    })
    .unwrap();
    assert_eq!(sweeps, (0..=25).collect::<Vec<_>>());
    assert_eq!(model.sweeps(), 25);
}

#[test]
fn identical_seed_gives_identical_assignments() {
    let corpus = planted_topics(3);
    let a = fit(&corpus.documents, &corpus.topics, &config(11, 50)).unwrap();
    let b = fit(&corpus.documents, &corpus.topics, &config(11, 50)).unwrap();
    assert_eq!(a.assignments(), b.assignments());
    let c = fit(&corpus.documents, &corpus.topics, &config(12, 50)).unwrap();
    assert_ne!(a.assignments(), c.assignments());
}

#[test]
fn document_order_does_not_change_topic_vocabularies() {
    let corpus = planted_topics(5);
    let mut shuffled = corpus.documents.clone();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(99));
    let a = fit(&corpus.documents, &corpus.topics, &config(5, 300)).unwrap();
    let b = fit(&shuffled, &corpus.topics, &config(5, 300)).unwrap();
    // order only moves mass between words of near-equal probability
    for (ti, (t, planted)) in corpus.topics.iter().zip(&corpus.vocabularies).enumerate() {
        for m in [&a, &b] {
            assert!(top_words(m, t, 10).iter().all(|w| planted.contains(w)), "topic {t}");
        }
        let pa = a.topic_word_distribution::<f64>(ti);
        let pb = b.topic_word_distribution::<f64>(ti);
        let l1: f64 = a.vocabulary().iter().zip(&pa).map(|(w, x)| (x - pb[b.word_id(w).unwrap()]).abs()).sum();
        assert!(l1 < 0.15, "topic {t}: L1 {l1}");
    }
}

#[test]
fn smoothed_rows_are_distributions() {
    let corpus = planted_topics(2);
    let model = fit(&corpus.documents, &corpus.topics, &config(2, 20)).unwrap();
    for t in 0..model.topics().len() {
        let sum: f64 = model.topic_word_distribution::<f64>(t).iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "{sum}");
    }
}

#[test]
fn zero_iterations_is_flagged() {
    let corpus = planted_topics(2);
    let model = fit(&corpus.documents, &corpus.topics, &config(2, 0)).unwrap();
    assert!(model.is_initialization_only());
    model.check_invariants().unwrap();
}

#[test]
fn validation_errors() {
    let topics = vec![AspectCategory::new("food")];
    let doc = |tokens: &[&str], labels: &[&str]| LabeledDocument {
        tokens: tokens.iter().map(|s| s.to_string()).collect(),
        labels: labels.iter().map(|l| AspectCategory::new(l)).collect(),
    };
    let cfg = LldaConfig::default();
    assert!(matches!(fit(&[doc(&["x"], &[])], &topics, &cfg), Err(LldaError::EmptyLabels(0))));
    assert!(matches!(fit(&[doc(&[], &["food"])], &topics, &cfg), Err(LldaError::EmptyDocument(0))));
    assert!(matches!(fit(&[doc(&["x"], &["price"])], &topics, &cfg), Err(LldaError::UnknownLabel { .. })));
    assert!(matches!(fit(&[doc(&["x"], &["food"])], &[], &cfg), Err(LldaError::NoTopics)));
}

fn small_corpus() -> impl Strategy<Value = Vec<LabeledDocument>> {
    let doc = (prop::collection::vec(0usize..12, 1..15), prop::collection::btree_set(0usize..3, 1..=3)).prop_map(
        |(words, labels)| LabeledDocument {
            tokens: words.iter().map(|w| format!("w{w}")).collect(),
            labels: labels.iter().map(|l| AspectCategory::new(&format!("t{l}"))).collect(),
        },
    );
    prop::collection::vec(doc, 1..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn invariants_hold_on_random_corpora(docs in small_corpus(), seed in 0u64..100, iterations in 0usize..20) {
        let topics: Vec<AspectCategory> = (0..3).map(|t| AspectCategory::new(&format!("t{t}"))).collect();
        let model = fit_with(&docs, &topics, &config(seed, iterations), |m, _| m.check_invariants().unwrap()).unwrap();
        for t in &topics {
            let seeds = model.top_seeds(t, 5, &HashSet::new(), 1).unwrap();
            let scores: Vec<f64> = seeds.seeds.iter().map(|s| s.1).collect();
            prop_assert!(scores.windows(2).all(|w| w[0] >= w[1]));
            let distinct: HashSet<_> = seeds.tokens().collect();
            prop_assert_eq!(distinct.len(), seeds.len());
        }
    }
}
