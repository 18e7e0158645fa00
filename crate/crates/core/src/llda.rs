//! Labeled LDA fitted by collapsed Gibbs sampling, and seed-word ranking.
//!
//! There is one topic per aspect category. A token may only be assigned a
//! topic from its document's label set, so a topic's word counts come
//! exclusively from documents annotated with that aspect.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::hash::{Hash, Hasher};
use std::path::Path;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{is_target_name, AspectCategory, Dataset};
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum LldaError {
    #[error("no topics given")]
    NoTopics,
    #[error("document {0} has an empty label set")]
    EmptyLabels(usize),
    #[error("document {0} has no tokens")]
    EmptyDocument(usize),
    #[error("document {doc} has label {label} outside the topic list")]
    UnknownLabel { doc: usize, label: String },
    #[error("unknown aspect {0}")]
    UnknownAspect(String),
    #[error("priors must be positive (alpha {alpha}, eta {eta})")]
    InvalidPrior { alpha: f64, eta: f64 },
    #[error("{path}: {message}")]
    SeedFile { path: String, message: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LldaConfig {
    /// Symmetric document-topic prior; `None` means `50 / K`.
    pub alpha: Option<f64>,
    /// Symmetric topic-word prior.
    pub eta: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl Default for LldaConfig {
    fn default() -> Self {
        LldaConfig { alpha: None, eta: 0.01, iterations: 500, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDocument {
    pub tokens: Vec<String>,
    pub labels: Vec<AspectCategory>,
}

#[derive(Clone, Debug)]
pub struct LldaModel {
    topics: Vec<AspectCategory>,
    alpha: f64,
    eta: f64,
    vocabulary: Vec<String>,
    word_ids: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    docs: Vec<Vec<usize>>,
    labels: Vec<Vec<usize>>,
    assignments: Vec<Vec<usize>>,
    /// K x V, row-major by topic.
    topic_word: Vec<u32>,
    topic_totals: Vec<u64>,
    /// D x K, row-major by document.
    doc_topic: Vec<u32>,
    sweeps: usize,
}

fn document_stream(doc: &LabeledDocument) -> u64 {
    let mut h = DefaultHasher::new();
    doc.tokens.hash(&mut h);
    doc.labels.hash(&mut h);
    h.finish()
}

/// Fits the model; see [`fit_with`] to observe every sweep.
pub fn fit(docs: &[LabeledDocument], topics: &[AspectCategory], config: &LldaConfig) -> Result<LldaModel, LldaError> {
    fit_with(docs, topics, config, |_, _| {})
}

/// Fits the model, calling `observer(model, sweep)` after initialization
/// (sweep 0) and after every sweep.
///
/// Each document draws from its own random stream keyed on the seed and the
/// document contents, so results do not depend on where a document sits in
/// the corpus beyond the order of count updates.
pub fn fit_with(
    docs: &[LabeledDocument],
    topics: &[AspectCategory],
    config: &LldaConfig,
    mut observer: impl FnMut(&LldaModel, usize),
) -> Result<LldaModel, LldaError> {
    if topics.is_empty() {
        return Err(LldaError::NoTopics);
    }
    let k = topics.len();
    let alpha = config.alpha.unwrap_or(50.0 / k as f64);
    let eta = config.eta;
    if !(alpha > 0.0 && eta > 0.0) {
        return Err(LldaError::InvalidPrior { alpha, eta });
    }
    let topic_ids: HashMap<&AspectCategory, usize> = topics.iter().enumerate().map(|(i, t)| (t, i)).collect();

    let vocab_set: BTreeSet<&str> = docs.iter().flat_map(|d| d.tokens.iter().map(String::as_str)).collect();
    let vocabulary: Vec<String> = vocab_set.into_iter().map(str::to_string).collect();
    let word_ids: HashMap<String, usize> = vocabulary.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let v = vocabulary.len();

    let mut encoded = Vec::with_capacity(docs.len());
    let mut labels = Vec::with_capacity(docs.len());
    let mut doc_freq = vec![0usize; v];
    for (d, doc) in docs.iter().enumerate() {
        if doc.labels.is_empty() {
            return Err(LldaError::EmptyLabels(d));
        }
        if doc.tokens.is_empty() {
            return Err(LldaError::EmptyDocument(d));
        }
        let mut lab = BTreeSet::new();
        for l in &doc.labels {
            let id = topic_ids.get(l).ok_or_else(|| LldaError::UnknownLabel { doc: d, label: l.to_string() })?;
            lab.insert(*id);
        }
        labels.push(lab.into_iter().collect::<Vec<_>>());
        let ids: Vec<usize> = doc.tokens.iter().map(|t| word_ids[t]).collect();
        for w in ids.iter().collect::<BTreeSet<_>>() {
            doc_freq[*w] += 1;
        }
        encoded.push(ids);
    }

    let mut model = LldaModel {
        topics: topics.to_vec(),
        alpha,
        eta,
        vocabulary,
        word_ids,
        doc_freq,
        assignments: Vec::with_capacity(docs.len()),
        topic_word: vec![0; k * v],
        topic_totals: vec![0; k],
        doc_topic: vec![0; docs.len() * k],
        docs: encoded,
        labels,
        sweeps: 0,
    };

    let mut rngs: Vec<ChaCha8Rng> = docs
        .iter()
        .map(|doc| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(document_stream(doc));
            rng
        })
        .collect();

    for (d, rng) in rngs.iter_mut().enumerate() {
        let z: Vec<usize> =
            model.docs[d].iter().map(|_| model.labels[d][rng.gen_range(0..model.labels[d].len())]).collect();
        for (i, &t) in z.iter().enumerate() {
            let w = model.docs[d][i];
            model.add(d, w, t);
        }
        model.assignments.push(z);
    }
    observer(&model, 0);

    if config.iterations == 0 {
        warn!("L-LDA run with zero iterations: assignments are initialization only");
    }
    let mut weights = Vec::with_capacity(k);
    for sweep in 1..=config.iterations {
        for (d, rng) in rngs.iter_mut().enumerate() {
            model.resample_document(d, rng, &mut weights);
        }
        model.sweeps = sweep;
        observer(&model, sweep);
    }
    Ok(model)
}

impl LldaModel {
    fn add(&mut self, d: usize, w: usize, t: usize) {
        let (k, v) = (self.topics.len(), self.vocabulary.len());
        self.topic_word[t * v + w] += 1;
        self.topic_totals[t] += 1;
        self.doc_topic[d * k + t] += 1;
    }

    fn remove(&mut self, d: usize, w: usize, t: usize) {
        let (k, v) = (self.topics.len(), self.vocabulary.len());
        self.topic_word[t * v + w] -= 1;
        self.topic_totals[t] -= 1;
        self.doc_topic[d * k + t] -= 1;
    }

    fn resample_document(&mut self, d: usize, rng: &mut ChaCha8Rng, weights: &mut Vec<f64>) {
        let (k, v) = (self.topics.len(), self.vocabulary.len());
        let v_eta = v as f64 * self.eta;
        for i in 0..self.docs[d].len() {
            let w = self.docs[d][i];
            let old = self.assignments[d][i];
            self.remove(d, w, old);

            weights.clear();
            let mut total = 0.0;
            for &t in &self.labels[d] {
                let p = (f64::from(self.doc_topic[d * k + t]) + self.alpha)
                    * (f64::from(self.topic_word[t * v + w]) + self.eta)
                    / (self.topic_totals[t] as f64 + v_eta);
                total += p;
                weights.push(total);
            }
            let u = rng.gen::<f64>() * total;
            let pick = weights.iter().position(|&c| u < c).unwrap_or(weights.len() - 1);
            let new = self.labels[d][pick];

            self.add(d, w, new);
            self.assignments[d][i] = new;
        }
    }

    pub fn topics(&self) -> &[AspectCategory] {
        &self.topics
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn vocabulary(&self) -> &[String] {
        &self.vocabulary
    }

    pub fn word_id(&self, word: &str) -> Option<usize> {
        self.word_ids.get(word).copied()
    }

    /// Number of documents containing the word.
    pub fn doc_freq(&self, word: &str) -> usize {
        self.word_id(word).map_or(0, |w| self.doc_freq[w])
    }

    pub fn num_documents(&self) -> usize {
        self.docs.len()
    }

    /// Completed sweeps; zero means the assignments are initialization only.
    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn is_initialization_only(&self) -> bool {
        self.sweeps == 0
    }

    pub fn assignments(&self) -> &[Vec<usize>] {
        &self.assignments
    }

    /// Topic ids admissible for document `d`.
    pub fn document_labels(&self, d: usize) -> &[usize] {
        &self.labels[d]
    }

    pub fn topic_word_count(&self, topic: usize, word: usize) -> u32 {
        self.topic_word[topic * self.vocabulary.len() + word]
    }

    pub fn topic_total(&self, topic: usize) -> u64 {
        self.topic_totals[topic]
    }

    pub fn doc_topic_count(&self, d: usize, topic: usize) -> u32 {
        self.doc_topic[d * self.topics.len() + topic]
    }

    pub fn topic_index(&self, aspect: &AspectCategory) -> Option<usize> {
        self.topics.iter().position(|t| t == aspect)
    }

    /// Smoothed word distribution of one topic:
    /// `(n_kw + eta) / (n_k + V * eta)`.
    pub fn topic_word_distribution<T: Real>(&self, topic: usize) -> Vec<T> {
        let v = self.vocabulary.len();
        let denom = self.topic_totals[topic] as f64 + v as f64 * self.eta;
        (0..v).map(|w| T::of((f64::from(self.topic_word[topic * v + w]) + self.eta) / denom)).collect()
    }

    /// Checks label restriction and count consistency against the assignments.
    pub fn check_invariants(&self) -> Result<(), String> {
        let (k, v) = (self.topics.len(), self.vocabulary.len());
        let mut tw = vec![0u32; k * v];
        let mut dt = vec![0u32; self.docs.len() * k];
        let mut tokens = 0u64;
        for (d, z) in self.assignments.iter().enumerate() {
            for (&w, &t) in self.docs[d].iter().zip(z) {
                if !self.labels[d].contains(&t) {
                    return Err(format!("document {d} token assigned topic {t} outside its labels"));
                }
                tw[t * v + w] += 1;
                dt[d * k + t] += 1;
                tokens += 1;
            }
        }
        if tw != self.topic_word || dt != self.doc_topic {
            return Err("count matrices disagree with assignments".into());
        }
        for t in 0..k {
            let row: u64 = tw[t * v..(t + 1) * v].iter().map(|&c| u64::from(c)).sum();
            if row != self.topic_totals[t] {
                return Err(format!("topic {t} total {} != row sum {row}", self.topic_totals[t]));
            }
        }
        if self.topic_totals.iter().sum::<u64>() != tokens {
            return Err("assignment count differs from token count".into());
        }
        Ok(())
    }

    /// Highest-probability words of one aspect, skipping stopwords and words
    /// seen in fewer than `min_doc_freq` documents. Ties break alphabetically.
    pub fn top_seeds(
        &self,
        aspect: &AspectCategory,
        k: usize,
        stopwords: &HashSet<String>,
        min_doc_freq: usize,
    ) -> Result<SeedList, LldaError> {
        let topic = self.topic_index(aspect).ok_or_else(|| LldaError::UnknownAspect(aspect.to_string()))?;
        if k == 0 {
            return Ok(SeedList { aspect: aspect.clone(), seeds: Vec::new() });
        }
        let probs = self.topic_word_distribution::<f64>(topic);
        let mut eligible: Vec<(String, f64)> = self
            .vocabulary
            .iter()
            .enumerate()
            .filter(|(w, word)| self.doc_freq[*w] >= min_doc_freq && !stopwords.contains(word.as_str()))
            .map(|(w, word)| (word.clone(), probs[w]))
            .collect();
        eligible.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        if eligible.len() < k {
            warn!("aspect {aspect}: only {} eligible seed words for k = {k}", eligible.len());
        }
        eligible.truncate(k);
        Ok(SeedList { aspect: aspect.clone(), seeds: eligible })
    }

    /// [`top_seeds`](Self::top_seeds) for every topic, in topic order.
    pub fn all_seeds(&self, k: usize, stopwords: &HashSet<String>, min_doc_freq: usize) -> Vec<SeedList> {
        self.topics.iter().map(|t| self.top_seeds(t, k, stopwords, min_doc_freq).expect("topic exists")).collect()
    }
}

/// Ranked indicator words for one aspect.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedList {
    pub aspect: AspectCategory,
    pub seeds: Vec<(String, f64)>,
}

impl SeedList {
    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.seeds.iter().map(|(t, _)| t.as_str())
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }
}

/// Writes `{aspect: [[token, score], ...]}`.
pub fn save_seeds(path: impl AsRef<Path>, lists: &[SeedList]) -> Result<(), LldaError> {
    let path = path.as_ref();
    let map: BTreeMap<&str, &Vec<(String, f64)>> = lists.iter().map(|l| (l.aspect.as_str(), &l.seeds)).collect();
    let err = |message: String| LldaError::SeedFile { path: path.display().to_string(), message };
    let json = serde_json::to_string_pretty(&map).map_err(|e| err(e.to_string()))?;
    std::fs::write(path, json + "\n").map_err(|e| err(e.to_string()))
}

pub fn load_seeds(path: impl AsRef<Path>) -> Result<BTreeMap<AspectCategory, SeedList>, LldaError> {
    let path = path.as_ref();
    let err = |message: String| LldaError::SeedFile { path: path.display().to_string(), message };
    let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
    let map: BTreeMap<String, Vec<(String, f64)>> = serde_json::from_str(&text).map_err(|e| err(e.to_string()))?;
    Ok(map
        .into_iter()
        .map(|(aspect, seeds)| {
            let aspect = AspectCategory::new(&aspect);
            (aspect.clone(), SeedList { aspect, seeds })
        })
        .collect())
}

/// Standard English stopword list shipped with the crate.
pub fn default_stopwords() -> HashSet<String> {
    parse_stopwords(include_str!("../data/stopwords_en.txt"))
}

/// One word per line; `#` starts a comment.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines().map(|l| l.split('#').next().unwrap_or("").trim().to_lowercase()).filter(|l| !l.is_empty()).collect()
}

/// Topic-model documents from annotated reviews: lowercased alphabetic
/// tokens without stopwords or target placeholders, labeled with the
/// review's categories. Unannotated reviews are skipped.
pub fn documents_from_dataset(dataset: &Dataset, stopwords: &HashSet<String>) -> Vec<LabeledDocument> {
    let mut docs = Vec::new();
    for review in &dataset.reviews {
        let labels: BTreeSet<AspectCategory> = review.annotations.iter().map(|a| a.category.clone()).collect();
        if labels.is_empty() {
            continue;
        }
        let tokens: Vec<String> = review
            .surface_tokens()
            .into_iter()
            .filter(|t| !is_target_name(t))
            .map(|t| t.to_lowercase())
            .filter(|t| t.chars().any(char::is_alphabetic) && !stopwords.contains(t))
            .collect();
        if tokens.is_empty() {
            continue;
        }
        docs.push(LabeledDocument { tokens, labels: labels.into_iter().collect() });
    }
    docs
}
