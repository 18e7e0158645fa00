#![allow(dead_code)]

use std::collections::BTreeMap;

use auxsent::auxgen::{construct_all, index_by_key, pair_records, AuxGenConfig, PairRecord};
use auxsent::corpus::{enumerate_units, AspectCategory, ClassificationUnit, Dataset, Task};
use auxsent::embeddings::{train_sgns, SgnsConfig};
use auxsent::eval::metrics::semeval_categorization_prf;
use auxsent::eval::pipeline::embedding_corpus;
use auxsent::eval::surrogate::{self, SurrogateConfig};
use auxsent::llda::{self, default_stopwords, documents_from_dataset, LldaConfig, SeedList};
use auxsent::synth::templated;
use auxsent::Embeddings;

pub const FIXTURES: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures");

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(FIXTURES).join(name)
}

/// Seeds, vectors and pairs for one templated corpus.
pub struct SignalRun {
    pub seeds: BTreeMap<AspectCategory, SeedList>,
    pub vectors: Embeddings,
    pub train_pairs: Vec<PairRecord>,
    pub test_pairs: Vec<PairRecord>,
    pub test_units: Vec<ClassificationUnit>,
}

/// Similarity floor for the templated corpus. Its small vocabulary gives
/// embeddings with uniformly high cosines, so the task defaults admit
/// nearly every content word.
pub const SIGNAL_THRESHOLD: f64 = 0.5;

pub fn signal_run(seed: u64) -> SignalRun {
    signal_run_with(seed, SIGNAL_THRESHOLD)
}

pub fn signal_run_with(seed: u64, threshold: f64) -> SignalRun {
    signal_run_sized(seed, threshold, 2000)
}

pub fn signal_run_sized(seed: u64, threshold: f64, n: usize) -> SignalRun {
    let corpus = templated(Task::Absa, n, 500, seed);
    let categories = Task::Absa.categories();
    let stopwords = default_stopwords();
    let docs = documents_from_dataset(&corpus.train, &stopwords);
    let config = LldaConfig { iterations: 200, seed, ..LldaConfig::default() };
    let model = llda::fit(&docs, &categories, &config).unwrap();
    let seeds: BTreeMap<_, _> = model.all_seeds(10, &stopwords, 3).into_iter().map(|s| (s.aspect.clone(), s)).collect();
    let sgns = SgnsConfig {
        dim: 100,
        window: 3,
        epochs: 50,
        negatives: 20,
        learning_rate: 0.05,
        min_count: 1,
        seed,
        ..SgnsConfig::default()
    };
    let vectors: Embeddings = train_sgns(&embedding_corpus(&corpus.train), &sgns).unwrap();
    let aux_config = AuxGenConfig { threshold, ..AuxGenConfig::for_task(Task::Absa) };
    let pairs = |d: &Dataset| {
        let units = enumerate_units(d, &categories);
        let aux = construct_all(d, &units, &seeds, &vectors, &aux_config).unwrap();
        let pairs = pair_records(d, &units, &index_by_key(aux)).unwrap();
        (units, pairs)
    };
    let (_, train_pairs) = pairs(&corpus.train);
    let (test_units, test_pairs) = pairs(&corpus.test);
    SignalRun { seeds, vectors, train_pairs, test_pairs, test_units }
}

/// Categorization F1 of the surrogate trained on `train`, scored on `test`.
pub fn surrogate_f1(train: &[PairRecord], test: &[PairRecord], units: &[ClassificationUnit]) -> f64 {
    let model = surrogate::train::<f64>(train, Task::Absa, &SurrogateConfig::default()).unwrap();
    let preds = model.predict_all(test);
    semeval_categorization_prf::<f64>(&preds, units).unwrap().f1
}

pub fn name_only(pairs: &[PairRecord]) -> Vec<PairRecord> {
    pairs.iter().map(PairRecord::aspect_name_only).collect()
}
