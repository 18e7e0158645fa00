//! End-to-end run from raw corpora to a metrics report.
//!
//! A run is described by a `key = value` file. Relative paths resolve
//! against the file's directory. Supplying `seeds_file`, `vectors_file` or
//! `predictions_file` skips the stage that would otherwise produce it.
//!
//! ```text
//! task = absa
//! train = train.xml
//! test = test.xml
//! train_parses = train.conllu
//! test_parses = test.conllu
//! out_dir = out
//! embed_dim = 50
//! ```

use std::collections::{BTreeMap, HashSet};
use std::error::Error as StdError;
use std::fs;
use std::path::{Path, PathBuf};

use log::info;
use thiserror::Error;

use crate::auxgen::{construct_all, index_by_key, pair_records, AuxGenConfig, PairRecord};
use crate::conllu;
use crate::corpus::{
    attach_parses, enumerate_units, load_semeval, load_sentihood, AspectCategory, ClassificationUnit, Dataset, Split,
    Task,
};
use crate::embeddings::{train_sgns, EmbeddingMatrix, SgnsConfig};
use crate::eval::metrics::{Prediction, Strictness};
use crate::eval::report::{score_with, MetricsReport};
use crate::eval::surrogate::{self, SurrogateConfig};
use crate::jsonl;
use crate::llda::{self, default_stopwords, documents_from_dataset, parse_stopwords, LldaConfig, SeedList};

pub type BoxError = Box<dyn StdError + Send + Sync>;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: BoxError,
    },
}

fn stage<E: Into<BoxError>>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError::Stage { stage, source: e.into() }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub task: Task,
    pub train: PathBuf,
    pub test: PathBuf,
    pub train_parses: Option<PathBuf>,
    pub test_parses: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub stopwords: Option<PathBuf>,
    pub seeds_file: Option<PathBuf>,
    pub vectors_file: Option<PathBuf>,
    pub predictions_file: Option<PathBuf>,
    pub seeds_k: usize,
    pub min_doc_freq: usize,
    pub llda: LldaConfig,
    pub sgns: SgnsConfig,
    pub auxgen: AuxGenConfig,
    pub surrogate: SurrogateConfig,
    /// Ablation: replace every auxiliary sentence by the aspect name.
    pub aspect_name_only: bool,
    pub strictness: Strictness,
}

impl PipelineConfig {
    /// Defaults for `task`; every path still has to be set.
    pub fn new(task: Task, train: PathBuf, test: PathBuf, out_dir: PathBuf) -> Self {
        PipelineConfig {
            task,
            train,
            test,
            train_parses: None,
            test_parses: None,
            out_dir,
            stopwords: None,
            seeds_file: None,
            vectors_file: None,
            predictions_file: None,
            seeds_k: 10,
            min_doc_freq: 3,
            llda: LldaConfig::default(),
            sgns: SgnsConfig::default(),
            auxgen: AuxGenConfig::for_task(task),
            surrogate: SurrogateConfig::default(),
            aspect_name_only: false,
            strictness: Strictness::default(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PipelineError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Config {
            path: path.display().to_string(),
            line: 0,
            message: e.to_string(),
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse(&text, base, &path.display().to_string())
    }

    /// Parses config text; `origin` only labels error messages.
    pub fn parse(text: &str, base: &Path, origin: &str) -> Result<Self, PipelineError> {
        let mut entries: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| PipelineError::Config { path: origin.to_string(), line: i + 1, message };
            let (k, v) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, got {line:?}")))?;
            let key = k.trim().to_string();
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(err(format!("duplicate key {key}")));
            }
        }
        Fields { entries, base, origin }.build()
    }

    pub fn seeds_path(&self) -> PathBuf {
        self.out_dir.join("seeds.json")
    }

    pub fn vectors_path(&self) -> PathBuf {
        self.out_dir.join("vectors.txt")
    }

    pub fn predictions_path(&self) -> PathBuf {
        self.out_dir.join("predictions.jsonl")
    }
}

struct Fields<'a> {
    entries: BTreeMap<String, (usize, String)>,
    base: &'a Path,
    origin: &'a str,
}

impl Fields<'_> {
    fn err(&self, line: usize, message: String) -> PipelineError {
        PipelineError::Config { path: self.origin.to_string(), line, message }
    }

    fn take<T: std::str::FromStr>(&mut self, key: &str) -> Result<Option<T>, PipelineError>
    where
        T::Err: std::fmt::Display,
    {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v.parse().map(Some).map_err(|e| self.err(line, format!("bad value for {key}: {e}"))),
        }
    }

    fn path(&mut self, key: &str) -> Result<Option<PathBuf>, PipelineError> {
        Ok(self.take::<PathBuf>(key)?.map(|p| self.base.join(p)))
    }

    fn required_path(&mut self, key: &str) -> Result<PathBuf, PipelineError> {
        self.path(key)?.ok_or_else(|| self.err(0, format!("missing required key {key}")))
    }

    fn set<T: std::str::FromStr>(&mut self, key: &str, slot: &mut T) -> Result<(), PipelineError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = self.take(key)? {
            *slot = v;
        }
        Ok(())
    }

    fn build(mut self) -> Result<PipelineConfig, PipelineError> {
        let task: Task = self.take("task")?.ok_or_else(|| self.err(0, "missing required key task".into()))?;
        let train = self.required_path("train")?;
        let test = self.required_path("test")?;
        let out_dir = self.required_path("out_dir")?;
        let mut c = PipelineConfig::new(task, train, test, out_dir);
        c.train_parses = self.path("train_parses")?;
        c.test_parses = self.path("test_parses")?;
        c.stopwords = self.path("stopwords")?;
        c.seeds_file = self.path("seeds_file")?;
        c.vectors_file = self.path("vectors_file")?;
        c.predictions_file = self.path("predictions_file")?;
        self.set("seeds_k", &mut c.seeds_k)?;
        self.set("min_doc_freq", &mut c.min_doc_freq)?;
        c.llda.alpha = self.take("llda_alpha")?;
        self.set("llda_eta", &mut c.llda.eta)?;
        self.set("llda_iterations", &mut c.llda.iterations)?;
        self.set("llda_seed", &mut c.llda.seed)?;
        self.set("embed_dim", &mut c.sgns.dim)?;
        self.set("embed_window", &mut c.sgns.window)?;
        self.set("embed_negatives", &mut c.sgns.negatives)?;
        self.set("embed_epochs", &mut c.sgns.epochs)?;
        self.set("embed_learning_rate", &mut c.sgns.learning_rate)?;
        self.set("embed_min_count", &mut c.sgns.min_count)?;
        self.set("embed_subsample", &mut c.sgns.subsample)?;
        self.set("embed_seed", &mut c.sgns.seed)?;
        self.set("embed_threads", &mut c.sgns.threads)?;
        self.set("threshold", &mut c.auxgen.threshold)?;
        self.set("include_modifiers", &mut c.auxgen.include_modifiers)?;
        c.auxgen.seeds_per_aspect = c.seeds_k;
        self.set("surrogate_epochs", &mut c.surrogate.epochs)?;
        self.set("surrogate_learning_rate", &mut c.surrogate.learning_rate)?;
        self.set("surrogate_l2", &mut c.surrogate.l2)?;
        self.set("surrogate_seed", &mut c.surrogate.seed)?;
        self.set("aspect_name_only", &mut c.aspect_name_only)?;
        if let Some(detection_only) = self.take::<bool>("strict_detection_only")? {
            c.strictness = if detection_only { Strictness::DetectionOnly } else { Strictness::DetectionAndPolarity };
        }
        if let Some((key, (line, _))) = self.entries.iter().next() {
            return Err(self.err(*line, format!("unknown key {key}")));
        }
        Ok(c)
    }
}

/// Reads a corpus by extension: `.xml` is SemEval, `.json` SentiHood and
/// `.jsonl` the canonical review format.
pub fn load_corpus(path: &Path, task: Task, split: Split) -> Result<Dataset, crate::corpus::CorpusError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jsonl") => Dataset::read_jsonl(path, task),
        Some("xml") => load_semeval(path, split),
        _ => load_sentihood(path, split),
    }
}

/// Lowercased word tokens of every review, one sentence per review.
pub fn embedding_corpus(dataset: &Dataset) -> Vec<Vec<String>> {
    dataset
        .reviews
        .iter()
        .map(|r| {
            r.surface_tokens()
                .into_iter()
                .filter(|t| t.chars().any(char::is_alphanumeric))
                .map(|t| t.to_lowercase())
                .collect()
        })
        .collect()
}

/// Artifacts of a finished run.
#[derive(Clone, Debug)]
pub struct PipelineOutput {
    pub report: MetricsReport,
    pub seeds: BTreeMap<AspectCategory, SeedList>,
    pub test_pairs: Vec<PairRecord>,
    pub predictions: Vec<Prediction>,
}

/// Loads a corpus in any supported format and attaches its parses.
pub fn load_parsed(path: &Path, parses: Option<&Path>, task: Task, split: Split) -> Result<Dataset, BoxError> {
    let mut dataset = load_corpus(path, task, split)?;
    if dataset.task != task {
        return Err(format!("{} holds a {} corpus, expected {task}", path.display(), dataset.task).into());
    }
    if let Some(p) = parses {
        let sentences = conllu::read_file(p)?;
        dataset = attach_parses(dataset, &sentences)?;
    }
    Ok(dataset)
}

fn load_split(
    path: &Path,
    parses: Option<&Path>,
    task: Task,
    split: Split,
    name: &'static str,
) -> Result<Dataset, PipelineError> {
    let dataset = load_parsed(path, parses, task, split).map_err(stage(name))?;
    info!("{name}: {} reviews from {}", dataset.len(), path.display());
    Ok(dataset)
}

fn stopword_set(config: &PipelineConfig) -> Result<HashSet<String>, PipelineError> {
    match &config.stopwords {
        None => Ok(default_stopwords()),
        Some(p) => Ok(parse_stopwords(&fs::read_to_string(p).map_err(stage("seed-extract"))?)),
    }
}

/// Runs every stage and writes artifacts plus `report.json` and
/// `report.txt` under `out_dir`. Reruns with the same config produce
/// identical files.
pub fn run(config: &PipelineConfig) -> Result<PipelineOutput, PipelineError> {
    fs::create_dir_all(&config.out_dir).map_err(stage("setup"))?;
    let task = config.task;
    let train = load_split(&config.train, config.train_parses.as_deref(), task, Split::Train, "load-train")?;
    let test = load_split(&config.test, config.test_parses.as_deref(), task, Split::Test, "load-test")?;
    let categories = task.categories();

    let seeds = match &config.seeds_file {
        Some(p) => llda::load_seeds(p).map_err(stage("seed-extract"))?,
        None => {
            let stopwords = stopword_set(config)?;
            let docs = documents_from_dataset(&train, &stopwords);
            let model = llda::fit(&docs, &categories, &config.llda).map_err(stage("seed-extract"))?;
            let lists = model.all_seeds(config.seeds_k, &stopwords, config.min_doc_freq);
            llda::save_seeds(config.seeds_path(), &lists).map_err(stage("seed-extract"))?;
            lists.into_iter().map(|l| (l.aspect.clone(), l)).collect()
        }
    };

    let vectors: EmbeddingMatrix<f32> = match &config.vectors_file {
        Some(p) => EmbeddingMatrix::load(p).map_err(stage("embed-train"))?,
        None => {
            let m = train_sgns(&embedding_corpus(&train), &config.sgns).map_err(stage("embed-train"))?;
            m.save(config.vectors_path()).map_err(stage("embed-train"))?;
            m
        }
    };

    let pairs_for =
        |dataset: &Dataset, file: &str| -> Result<(Vec<ClassificationUnit>, Vec<PairRecord>), PipelineError> {
            let units = enumerate_units(dataset, &categories);
            let aux = construct_all(dataset, &units, &seeds, &vectors, &config.auxgen).map_err(stage("auxgen"))?;
            jsonl::write(config.out_dir.join(format!("{file}_auxiliary.jsonl")), &aux).map_err(stage("auxgen"))?;
            let mut pairs = pair_records(dataset, &units, &index_by_key(aux)).map_err(stage("auxgen"))?;
            if config.aspect_name_only {
                pairs = pairs.iter().map(PairRecord::aspect_name_only).collect();
            }
            jsonl::write(config.out_dir.join(format!("{file}_pairs.jsonl")), &pairs).map_err(stage("auxgen"))?;
            Ok((units, pairs))
        };
    let (_, train_pairs) = pairs_for(&train, "train")?;
    let (test_units, test_pairs) = pairs_for(&test, "test")?;

    let predictions: Vec<Prediction> = match &config.predictions_file {
        Some(p) => {
            let preds: Vec<Prediction> = jsonl::read(p).map_err(stage("predict"))?;
            for pred in &preds {
                pred.validate().map_err(|e| stage("predict")(format!("{}: {e}", pred.key())))?;
            }
            preds
        }
        None => {
            let model = surrogate::train::<f64>(&train_pairs, task, &config.surrogate).map_err(stage("predict"))?;
            let preds = model.predict_all(&test_pairs);
            jsonl::write(config.predictions_path(), &preds).map_err(stage("predict"))?;
            preds
        }
    };

    let report = score_with(task, &predictions, &test_units, config.strictness).map_err(stage("score"))?;
    let json = serde_json::to_string_pretty(&report).map_err(stage("score"))?;
    fs::write(config.out_dir.join("report.json"), json + "\n").map_err(stage("score"))?;
    fs::write(config.out_dir.join("report.txt"), report.to_text()).map_err(stage("score"))?;
    Ok(PipelineOutput { report, seeds, test_pairs, predictions })
}
