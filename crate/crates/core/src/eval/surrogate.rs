//! Bag-of-words stand-in for the sentence-pair classifier.
//!
//! Multinomial logistic regression over two feature namespaces, `a:` for
//! auxiliary-sentence tokens and `s:` for review tokens, trained with plain
//! SGD. It is deterministic for a fixed seed and exists to check that the
//! auxiliary sentence carries signal, not to reproduce fine-tuned scores.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use log::{debug, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::auxgen::PairRecord;
use crate::corpus::{simple_tokenize, SentimentLabel, Task};
use crate::eval::metrics::Prediction;
use crate::scalar::Real;

#[derive(Debug, Error, PartialEq)]
pub enum SurrogateError {
    #[error("no training pairs")]
    NoTrainingData,
    #[error("invalid surrogate configuration: {0}")]
    Config(String),
    #[error("gold label {label} of {key} is not a {task} label")]
    UnexpectedLabel { key: String, label: SentimentLabel, task: Task },
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    /// L2 penalty, applied as weight decay once per epoch.
    pub l2: f64,
    pub seed: u64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig { epochs: 30, learning_rate: 0.2, l2: 1e-4, seed: 0 }
    }
}

/// Binary bag-of-words features of one pair, sorted and deduplicated.
pub fn featurize(pair: &PairRecord) -> Vec<String> {
    let words = |text: &str, ns: &str| -> Vec<String> {
        simple_tokenize(text)
            .into_iter()
            .filter(|t| t.chars().any(char::is_alphanumeric))
            .map(|t| format!("{ns}:{}", t.to_lowercase()))
            .collect()
    };
    let set: BTreeSet<String> =
        words(&pair.auxiliary_text, "a").into_iter().chain(words(&pair.sentence_text, "s")).collect();
    set.into_iter().collect()
}

#[derive(Clone, Debug)]
pub struct SurrogateModel<T> {
    labels: Vec<SentimentLabel>,
    features: HashMap<String, usize>,
    /// Row-major `labels x features`.
    weights: Vec<T>,
    bias: Vec<T>,
    trainable: Vec<bool>,
}

struct Example {
    features: Vec<usize>,
    label: usize,
}

impl<T: Real> SurrogateModel<T> {
    pub fn labels(&self) -> &[SentimentLabel] {
        &self.labels
    }

    pub fn num_features(&self) -> usize {
        self.features.len()
    }

    fn encode(&self, pair: &PairRecord) -> Vec<usize> {
        featurize(pair).iter().filter_map(|f| self.features.get(f).copied()).collect()
    }

    fn probabilities(&self, features: &[usize]) -> Vec<T> {
        let scale = feature_scale::<T>(features.len());
        let f = self.features.len();
        let logits: Vec<T> = (0..self.labels.len())
            .map(|l| {
                let row = &self.weights[l * f..(l + 1) * f];
                self.bias[l] + features.iter().map(|&j| row[j]).sum::<T>() * scale
            })
            .collect();
        softmax(&logits)
    }

    pub fn predict(&self, pair: &PairRecord) -> Prediction {
        let probs = self.probabilities(&self.encode(pair));
        let scores: BTreeMap<SentimentLabel, f64> =
            self.labels.iter().zip(&probs).map(|(&l, &p)| (l, p.as_f64())).collect();
        Prediction::new(pair.key(), scores)
    }

    pub fn predict_all(&self, pairs: &[PairRecord]) -> Vec<Prediction> {
        pairs.iter().map(|p| self.predict(p)).collect()
    }
}

fn feature_scale<T: Real>(n: usize) -> T {
    if n == 0 {
        T::zero()
    } else {
        T::one() / T::of(n as f64).sqrt()
    }
}

fn softmax<T: Real>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Fits the surrogate on `pairs`. Biases start at the log of the add-one
/// smoothed class prior; classes that never occur in training keep that
/// prior-only score.
pub fn train<T: Real>(
    pairs: &[PairRecord],
    task: Task,
    config: &SurrogateConfig,
) -> Result<SurrogateModel<T>, SurrogateError> {
    if pairs.is_empty() {
        return Err(SurrogateError::NoTrainingData);
    }
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(SurrogateError::Config(format!("learning_rate must be positive, got {}", config.learning_rate)));
    }
    if !(config.l2 >= 0.0 && config.l2.is_finite()) {
        return Err(SurrogateError::Config(format!("l2 must be non-negative, got {}", config.l2)));
    }
    let labels = task.labels().to_vec();

    let vocab: BTreeSet<String> = pairs.iter().flat_map(featurize).collect();
    let features: HashMap<String, usize> = vocab.into_iter().enumerate().map(|(i, f)| (f, i)).collect();

    let mut examples = Vec::with_capacity(pairs.len());
    for p in pairs {
        let label = labels.iter().position(|&l| l == p.gold_label).ok_or(SurrogateError::UnexpectedLabel {
            key: p.key().to_string(),
            label: p.gold_label,
            task,
        })?;
        let mut f: Vec<usize> = featurize(p).iter().map(|t| features[t]).collect();
        f.sort_unstable();
        examples.push(Example { features: f, label });
    }

    let trainable: Vec<bool> = (0..labels.len()).map(|l| examples.iter().any(|e| e.label == l)).collect();
    for (l, _) in trainable.iter().enumerate().filter(|(_, &t)| !t) {
        warn!("label {} never occurs in training; it keeps its prior-only score", labels[l]);
    }

    let nf = features.len();
    let nl = labels.len();
    let bias = (0..nl)
        .map(|l| {
            let count = examples.iter().filter(|e| e.label == l).count();
            T::of(((count + 1) as f64 / (examples.len() + nl) as f64).ln())
        })
        .collect();
    let mut model = SurrogateModel { labels, features, weights: vec![T::zero(); nl * nf], bias, trainable };

    let lr = T::of(config.learning_rate);
    let decay = T::of((1.0 - config.learning_rate * config.l2 * examples.len() as f64).max(0.0));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..examples.len()).collect();
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut loss = 0.0;
        for &i in &order {
            let ex = &examples[i];
            let probs = model.probabilities(&ex.features);
            loss -= probs[ex.label].as_f64().max(1e-12).ln();
            let scale = feature_scale::<T>(ex.features.len());
            for (l, &p) in probs.iter().enumerate() {
                if !model.trainable[l] {
                    continue;
                }
                let target = if l == ex.label { T::one() } else { T::zero() };
                let g = (p - target) * lr;
                model.bias[l] -= g;
                let row = &mut model.weights[l * nf..(l + 1) * nf];
                for &j in &ex.features {
                    row[j] -= g * scale;
                }
            }
        }
        for w in &mut model.weights {
            *w *= decay;
        }
        debug!("surrogate epoch {epoch}: mean loss {:.4}", loss / examples.len() as f64);
    }
    Ok(model)
}
