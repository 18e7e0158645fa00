//! Skip-gram word embeddings trained with negative sampling, plus cosine
//! similarity queries against aspect seed lists.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::llda::SeedList;
use crate::scalar::{sigmoid, Real};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("vocabulary is empty after min_count filtering")]
    EmptyVocabulary,
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("vector file line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Token/id bijection with corpus frequencies, most frequent first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    ids: HashMap<String, usize>,
    counts: Vec<u64>,
}

impl Vocabulary {
    pub fn build(sentences: &[Vec<String>], min_count: u64) -> Self {
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for s in sentences {
            for t in s {
                *freq.entry(t.as_str()).or_default() += 1;
            }
        }
        let mut entries: Vec<(&str, u64)> = freq.into_iter().filter(|&(_, c)| c >= min_count).collect();
        entries.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        let tokens: Vec<String> = entries.iter().map(|(t, _)| t.to_string()).collect();
        let counts = entries.iter().map(|&(_, c)| c).collect();
        let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Vocabulary { tokens, ids, counts }
    }

    /// Vocabulary without frequencies, as read from a vector file.
    pub fn from_tokens(tokens: Vec<String>) -> Self {
        let ids = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        let counts = vec![0; tokens.len()];
        Vocabulary { tokens, ids, counts }
    }

    pub fn id(&self, token: &str) -> Option<usize> {
        self.ids.get(token).copied()
    }

    pub fn token(&self, id: usize) -> &str {
        &self.tokens[id]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    /// Initial learning rate, decayed linearly towards zero.
    pub learning_rate: f64,
    pub min_count: u64,
    /// Frequent-word subsampling threshold; 0 disables subsampling.
    pub subsample: f64,
    pub seed: u64,
    /// 1 trains sequentially and is bit-reproducible. Larger values train
    /// shards in parallel and merge their updates every few dozen sentences.
    pub threads: usize,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 200,
            window: 10,
            negatives: 5,
            epochs: 5,
            learning_rate: 0.025,
            min_count: 2,
            subsample: 1e-3,
            seed: 1,
            threads: 1,
        }
    }
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<(), EmbeddingError> {
        let bad = |m: &str| Err(EmbeddingError::Config(m.to_string()));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negatives == 0 {
            return bad("negatives must be at least 1");
        }
        if self.threads == 0 {
            return bad("threads must be at least 1");
        }
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return bad("learning rate must be positive");
        }
        if self.subsample < 0.0 {
            return bad("subsample must be non-negative");
        }
        Ok(())
    }
}

/// Dense word vectors. Similarity queries use the input vectors only.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<T>,
    output: Option<Vec<T>>,
}

impl<T: Real> EmbeddingMatrix<T> {
    /// Builds a matrix from explicit vectors (row `i` belongs to token `i`).
    pub fn from_vectors(tokens: Vec<String>, dim: usize, input: Vec<T>) -> Result<Self, EmbeddingError> {
        if input.len() != tokens.len() * dim {
            return Err(EmbeddingError::Config(format!(
                "{} values for {} tokens of dimension {dim}",
                input.len(),
                tokens.len()
            )));
        }
        Ok(EmbeddingMatrix { vocab: Vocabulary::from_tokens(tokens), dim, input, output: None })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(V, dim)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.vocab.len(), self.dim)
    }

    pub fn vector(&self, token: &str) -> Option<&[T]> {
        self.vocab.id(token).map(|i| &self.input[i * self.dim..(i + 1) * self.dim])
    }

    pub fn output_vector(&self, token: &str) -> Option<&[T]> {
        let out = self.output.as_ref()?;
        self.vocab.id(token).map(|i| &out[i * self.dim..(i + 1) * self.dim])
    }

    pub fn input_values(&self) -> &[T] {
        &self.input
    }

    pub fn is_finite(&self) -> bool {
        self.input.iter().chain(self.output.iter().flatten()).all(|x| x.is_finite())
    }

    /// Cosine similarity of two tokens; `None` when either is out of vocabulary.
    pub fn similarity(&self, w1: &str, w2: &str) -> Option<T> {
        Some(cosine(self.vector(w1)?, self.vector(w2)?))
    }

    /// Largest similarity between `token` and any in-vocabulary seed.
    pub fn max_similarity<'s>(&self, token: &str, seeds: impl IntoIterator<Item = &'s str>) -> Option<T> {
        let v = self.vector(token)?;
        seeds
            .into_iter()
            .filter_map(|s| self.vector(s))
            .map(|s| cosine(v, s))
            .fold(None, |best, s| Some(best.map_or(s, |b: T| b.max(s))))
    }

    pub fn max_seed_similarity(&self, token: &str, seeds: &SeedList) -> Option<T> {
        self.max_similarity(token, seeds.tokens())
    }

    /// Text format: header `V dim`, then one token and `dim` values per line.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), EmbeddingError> {
        let path = path.as_ref();
        let mut out = format!("{} {}\n", self.vocab.len(), self.dim);
        for (i, token) in self.vocab.tokens().iter().enumerate() {
            out.push_str(token);
            for x in &self.input[i * self.dim..(i + 1) * self.dim] {
                let _ = write!(out, " {x}");
            }
            out.push('\n');
        }
        std::fs::write(path, out).map_err(|source| EmbeddingError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EmbeddingError> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|source| EmbeddingError::Io { path: path.to_path_buf(), source })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, EmbeddingError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let err = |line: usize, message: String| EmbeddingError::Parse { line: line + 1, message };
        let (hline, header) = lines.next().ok_or_else(|| err(0, "missing header".into()))?;
        let header: Vec<usize> = header
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| err(hline, format!("bad header value {x:?}"))))
            .collect::<Result<_, _>>()?;
        let [count, dim] = header[..] else {
            return Err(err(hline, "header must be `V dim`".into()));
        };
        let mut tokens = Vec::with_capacity(count);
        let mut input = Vec::with_capacity(count * dim);
        for (lineno, line) in lines {
            let mut fields = line.split_whitespace();
            let token = fields.next().unwrap_or_default();
            let values: Vec<T> = fields
                .map(|x| x.parse::<f64>().map(T::of).map_err(|_| err(lineno, format!("bad float {x:?}"))))
                .collect::<Result<_, _>>()?;
            if values.len() != dim {
                return Err(err(lineno, format!("expected {dim} values, found {}", values.len())));
            }
            tokens.push(token.to_string());
            input.extend(values);
        }
        if tokens.len() != count {
            return Err(err(hline, format!("header announces {count} vectors, file has {}", tokens.len())));
        }
        Self::from_vectors(tokens, dim, input)
    }
}

/// Cosine similarity clamped to [-1, 1]; zero vectors give 0.
pub fn cosine<T: Real>(a: &[T], b: &[T]) -> T {
    let dot: T = a.iter().zip(b).map(|(&x, &y)| x * y).sum();
    let na: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let nb: T = b.iter().map(|&x| x * x).sum::<T>().sqrt();
    if na == T::zero() || nb == T::zero() {
        return T::zero();
    }
    (dot / (na * nb)).max(-T::one()).min(T::one())
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// One skip-gram update for a center word against its context (label 1)
/// and sampled negatives (label 0). Returns the pair objective
/// `log σ(u_ctx·v) + Σ log σ(-u_neg·v)` evaluated before the update.
///
/// `targets` index rows of `output`; the center row is updated after all
/// output rows, as in the reference word2vec implementation.
fn sgns_update<T: Real>(
    center: &mut [T],
    output: &mut [T],
    dim: usize,
    targets: &[(usize, bool)],
    lr: T,
    grad: &mut [T],
) -> T {
    grad.iter_mut().for_each(|g| *g = T::zero());
    let mut objective = T::zero();
    for &(row, positive) in targets {
        let u = &mut output[row * dim..(row + 1) * dim];
        let score = dot(center, u);
        let label = if positive { T::one() } else { T::zero() };
        let p = sigmoid(score);
        objective += if positive { sigmoid(score).ln() } else { sigmoid(-score).ln() };
        let g = lr * (label - p);
        for j in 0..dim {
            grad[j] += g * u[j];
            u[j] += g * center[j];
        }
    }
    for (c, g) in center.iter_mut().zip(grad.iter()) {
        *c += *g;
    }
    objective
}

/// Gradients of the pair objective with respect to each vector involved.
#[derive(Clone, Debug, PartialEq)]
pub struct PairGradients<T> {
    pub center: Vec<T>,
    pub context: Vec<T>,
    pub negatives: Vec<Vec<T>>,
}

/// Analytic gradients computed by the same update the trainer applies, run
/// with unit learning rate on copies. Vectors must be distinct words.
pub fn pair_gradients<T: Real>(center: &[T], context: &[T], negatives: &[&[T]]) -> PairGradients<T> {
    let dim = center.len();
    let mut c = center.to_vec();
    let mut out: Vec<T> = context.to_vec();
    for n in negatives {
        out.extend_from_slice(n);
    }
    let before = out.clone();
    let targets: Vec<(usize, bool)> = (0..=negatives.len()).map(|i| (i, i == 0)).collect();
    let mut grad = vec![T::zero(); dim];
    sgns_update(&mut c, &mut out, dim, &targets, T::one(), &mut grad);
    let delta: Vec<T> = out.iter().zip(&before).map(|(&a, &b)| a - b).collect();
    PairGradients {
        center: c.iter().zip(center).map(|(&a, &b)| a - b).collect(),
        context: delta[..dim].to_vec(),
        negatives: delta[dim..].chunks(dim).map(<[T]>::to_vec).collect(),
    }
}

/// Mean pair objective of a matrix over `(center, context, negatives)` triples.
pub fn mean_objective<T: Real>(m: &EmbeddingMatrix<T>, samples: &[(usize, usize, Vec<usize>)]) -> Option<f64> {
    let out = m.output.as_ref()?;
    let d = m.dim;
    let row = |v: &[T], i: usize| v[i * d..(i + 1) * d].to_vec();
    let mut total = 0.0;
    for (c, ctx, negs) in samples {
        let v = row(&m.input, *c);
        let mut obj = sigmoid(dot(&v, &row(out, *ctx))).ln();
        for &n in negs {
            obj += sigmoid(-dot(&v, &row(out, n))).ln();
        }
        total += obj.as_f64();
    }
    Some(total / samples.len().max(1) as f64)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainingStats {
    /// Mean pair objective observed during each epoch.
    pub epoch_objective: Vec<f64>,
    /// Training pairs seen per epoch.
    pub epoch_pairs: Vec<usize>,
}

pub fn train_sgns<T: Real>(
    sentences: &[Vec<String>],
    config: &SgnsConfig,
) -> Result<EmbeddingMatrix<T>, EmbeddingError> {
    train_sgns_with_stats(sentences, config).map(|(m, _)| m)
}

/// Randomly initialized matrix exactly as training starts from it.
pub fn initial_matrix<T: Real>(vocab: Vocabulary, config: &SgnsConfig) -> EmbeddingMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let d = config.dim;
    let scale = 1.0 / d as f64;
    let input = (0..vocab.len() * d).map(|_| T::of((rng.gen::<f64>() - 0.5) * scale)).collect();
    let output = Some(vec![T::zero(); vocab.len() * d]);
    EmbeddingMatrix { vocab, dim: d, input, output }
}

struct Shard<'a, T> {
    sentences: &'a [Vec<usize>],
    rng: ChaCha8Rng,
    input: Vec<T>,
    output: Vec<T>,
}

/// Sentences each worker trains on between merges in parallel mode.
const SYNC_SENTENCES: usize = 64;

struct Schedule {
    lr0: f64,
    total_words: f64,
}

impl Schedule {
    fn rate(&self, processed: f64) -> f64 {
        self.lr0 * (1.0 - processed / (self.total_words + 1.0)).max(1e-4)
    }
}

struct Sampler {
    noise: WeightedIndex<f64>,
    keep: Vec<f64>,
}

impl<'a, T: Real> Shard<'a, T> {
    /// One pass over the shard. `offset` is the number of words processed
    /// before this pass, for the learning-rate schedule.
    fn run(&mut self, config: &SgnsConfig, sampler: &Sampler, schedule: &Schedule, offset: f64) -> (f64, usize) {
        let d = config.dim;
        let mut grad = vec![T::zero(); d];
        let mut center = vec![T::zero(); d];
        let mut targets = Vec::with_capacity(config.negatives + 1);
        let mut kept = Vec::new();
        let mut processed = offset;
        let mut objective = 0.0;
        let mut pairs = 0usize;
        for sentence in self.sentences {
            kept.clear();
            for &w in sentence {
                if sampler.keep[w] >= 1.0 || self.rng.gen::<f64>() < sampler.keep[w] {
                    kept.push(w);
                }
            }
            let lr = T::of(schedule.rate(processed));
            processed += sentence.len() as f64;
            for (pos, &word) in kept.iter().enumerate() {
                let reach = config.window - self.rng.gen_range(0..config.window);
                let lo = pos.saturating_sub(reach);
                let hi = (pos + reach).min(kept.len() - 1);
                for (cpos, &ctx) in kept.iter().enumerate().take(hi + 1).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    targets.clear();
                    targets.push((ctx, true));
                    for _ in 0..config.negatives {
                        let neg = sampler.noise.sample(&mut self.rng);
                        if neg != ctx {
                            targets.push((neg, false));
                        }
                    }
                    center.copy_from_slice(&self.input[word * d..(word + 1) * d]);
                    let obj = sgns_update(&mut center, &mut self.output, d, &targets, lr, &mut grad);
                    self.input[word * d..(word + 1) * d].copy_from_slice(&center);
                    objective += obj.as_f64();
                    pairs += 1;
                }
            }
        }
        (objective, pairs)
    }
}

/// Trains skip-gram vectors and reports the mean objective per epoch.
pub fn train_sgns_with_stats<T: Real>(
    sentences: &[Vec<String>],
    config: &SgnsConfig,
) -> Result<(EmbeddingMatrix<T>, TrainingStats), EmbeddingError> {
    config.validate()?;
    let vocab = Vocabulary::build(sentences, config.min_count);
    if vocab.is_empty() {
        return Err(EmbeddingError::EmptyVocabulary);
    }
    let encoded: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| s.iter().filter_map(|t| vocab.id(t)).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() > 1)
        .collect();

    let total = vocab.total() as f64;
    let keep = (0..vocab.len())
        .map(|i| {
            if config.subsample <= 0.0 {
                return 1.0;
            }
            let f = vocab.count(i) as f64;
            let t = config.subsample * total;
            ((f / t).sqrt() + 1.0) * t / f
        })
        .collect();
    let noise = WeightedIndex::new((0..vocab.len()).map(|i| (vocab.count(i) as f64).powf(0.75)))
        .map_err(|e| EmbeddingError::Config(e.to_string()))?;

    let mut matrix: EmbeddingMatrix<T> = initial_matrix(vocab, config);
    let sampler = Sampler { noise, keep };
    let words_per_epoch: usize = encoded.iter().map(Vec::len).sum();
    let schedule = Schedule { lr0: config.learning_rate, total_words: (words_per_epoch * config.epochs) as f64 };

    let mut stats = TrainingStats::default();
    let mut input = std::mem::take(&mut matrix.input);
    let mut output = matrix.output.take().unwrap_or_default();
    if config.threads == 1 {
        let mut shard =
            Shard { sentences: &encoded, rng: ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1)), input, output };
        for epoch in 0..config.epochs {
            let (obj, pairs) = shard.run(config, &sampler, &schedule, (epoch * words_per_epoch) as f64);
            stats.epoch_objective.push(obj / pairs.max(1) as f64);
            stats.epoch_pairs.push(pairs);
        }
        input = shard.input;
        output = shard.output;
    } else {
        // workers start each round from the shared state and their updates
        // are averaged at the end of it
        let round = config.threads * SYNC_SENTENCES;
        let mut stream = 0u64;
        for epoch in 0..config.epochs {
            let mut offset = (epoch * words_per_epoch) as f64;
            let (mut obj, mut pairs) = (0.0, 0);
            for batch in encoded.chunks(round) {
                let chunk = batch.len().div_ceil(config.threads);
                let results: Vec<(Vec<T>, Vec<T>, f64, usize)> = batch
                    .par_chunks(chunk)
                    .enumerate()
                    .map(|(i, sentences)| {
                        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1));
                        rng.set_stream(stream + i as u64);
                        let mut shard = Shard { sentences, rng, input: input.clone(), output: output.clone() };
                        let (obj, pairs) = shard.run(config, &sampler, &schedule, offset);
                        (shard.input, shard.output, obj, pairs)
                    })
                    .collect();
                stream += config.threads as u64;
                offset += batch.iter().map(Vec::len).sum::<usize>() as f64;
                let (base_in, base_out) = (input.clone(), output.clone());
                let share = T::one() / T::of(results.len() as f64);
                for (si, so, o, p) in results {
                    for ((x, s), b) in input.iter_mut().zip(&si).zip(&base_in) {
                        *x += (*s - *b) * share;
                    }
                    for ((x, s), b) in output.iter_mut().zip(&so).zip(&base_out) {
                        *x += (*s - *b) * share;
                    }
                    obj += o;
                    pairs += p;
                }
            }
            stats.epoch_objective.push(obj / pairs.max(1) as f64);
            stats.epoch_pairs.push(pairs);
        }
    }
    matrix.input = input;
    matrix.output = Some(output);
    Ok((matrix, stats))
}
