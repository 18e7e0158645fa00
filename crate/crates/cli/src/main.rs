use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use auxsent::auxgen::{construct_all, index_by_key, pair_records, read_pairs, AuxGenConfig, PairRecord};
use auxsent::conllu;
use auxsent::corpus::{enumerate_units, to_semeval_xml, to_sentihood_json, ClassificationUnit, Split, Task};
use auxsent::embeddings::{train_sgns, SgnsConfig};
use auxsent::eval::metrics::{Prediction, Strictness};
use auxsent::eval::pipeline::{self, embedding_corpus, load_parsed, PipelineConfig};
use auxsent::eval::report::score_with;
use auxsent::eval::surrogate::{self, SurrogateConfig};
use auxsent::jsonl;
use auxsent::llda::{self, default_stopwords, documents_from_dataset, parse_stopwords, LldaConfig};
use auxsent::synth;
use auxsent::{Dataset, Embeddings};
use clap::{Args, Parser, Subcommand};
use log::{info, warn};

/// Auxiliary-sentence construction and evaluation for aspect-based sentiment analysis.
#[derive(Parser)]
#[command(name = "auxsent", version)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a SemEval XML or SentiHood JSON file (plus parses) to canonical JSON lines.
    Ingest(IngestArgs),
    /// Fit Labeled LDA on a training corpus and write per-aspect seed words.
    SeedExtract(SeedArgs),
    /// Train skip-gram embeddings on a corpus.
    EmbedTrain(EmbedArgs),
    /// Build auxiliary sentences and write sentence-pair records.
    Auxgen(AuxgenArgs),
    /// Train the bag-of-words classifier on pairs and write predictions.
    Surrogate(SurrogateArgs),
    /// Score predictions against gold labels.
    Score(ScoreArgs),
    /// Run every stage from a config file.
    Pipeline(PipelineArgs),
    /// Write a templated synthetic corpus with parses.
    Synth(SynthArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Corpus file: .jsonl (canonical), .xml (SemEval) or .json (SentiHood).
    #[arg(long, visible_alias = "dataset")]
    input: PathBuf,
    #[arg(long, default_value = "absa")]
    task: Task,
    /// CoNLL-U parses to attach, matched by sent_id or position.
    #[arg(long)]
    parses: Option<PathBuf>,
    #[arg(long, default_value = "train")]
    split: Split,
}

impl InputArgs {
    fn load(&self) -> Result<Dataset> {
        load_parsed(&self.input, self.parses.as_deref(), self.task, self.split)
            .map_err(|e| anyhow::anyhow!(e))
            .with_context(|| format!("loading {}", self.input.display()))
    }
}

#[derive(Args)]
struct IngestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SeedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Document-topic prior; defaults to 50 / number of aspects.
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    eta: f64,
    #[arg(long, default_value_t = 500)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    min_doc_freq: usize,
    /// One stopword per line; replaces the bundled English list.
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EmbedArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 200)]
    dim: usize,
    #[arg(long, default_value_t = 10)]
    window: usize,
    #[arg(long, default_value_t = 5)]
    neg: usize,
    #[arg(long, default_value_t = 5)]
    epochs: usize,
    #[arg(long, default_value_t = 0.025)]
    lr: f64,
    #[arg(long, default_value_t = 2)]
    min_count: u64,
    #[arg(long, default_value_t = 1e-3)]
    subsample: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; 1 is bit-reproducible.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct AuxgenArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    seeds: PathBuf,
    #[arg(long)]
    vectors: PathBuf,
    /// Similarity floor; defaults to 0.3 for absa and 0.4 for tabsa.
    #[arg(long)]
    threshold: Option<f64>,
    /// Candidates only, no dependency-rule modifiers (parses not required).
    #[arg(long)]
    no_modifiers: bool,
    /// Replace every auxiliary sentence by the aspect name.
    #[arg(long)]
    aspect_name_only: bool,
    /// Also write the full auxiliary-sentence records here.
    #[arg(long)]
    aux_out: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SurrogateArgs {
    /// Training pairs.
    #[arg(long)]
    train: PathBuf,
    /// Pairs to predict.
    #[arg(long)]
    test: PathBuf,
    #[arg(long, default_value = "absa")]
    task: Task,
    #[arg(long, default_value_t = 30)]
    epochs: usize,
    #[arg(long, default_value_t = 0.2)]
    lr: f64,
    #[arg(long, default_value_t = 1e-4)]
    l2: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    /// Prediction records, one JSON object per line.
    #[arg(long)]
    preds: PathBuf,
    /// Gold labels: a pairs file, or any corpus file accepted by --input.
    #[arg(long)]
    gold: PathBuf,
    #[arg(long, default_value = "absa")]
    task: Task,
    /// Strict accuracy checks aspect detection only, not polarity.
    #[arg(long)]
    detection_only: bool,
    /// Write the report as JSON here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "absa")]
    task: Task,
    #[arg(long, default_value_t = 50)]
    train: usize,
    #[arg(long, default_value_t = 50)]
    test: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_dir: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => {
            let d = a.input.load()?;
            let n = d.write_jsonl(&a.out)?;
            println!("{n} reviews -> {}", a.out.display());
        }
        Command::SeedExtract(a) => seed_extract(a)?,
        Command::EmbedTrain(a) => {
            let d = a.input.load()?;
            let config = SgnsConfig {
                dim: a.dim,
                window: a.window,
                negatives: a.neg,
                epochs: a.epochs,
                learning_rate: a.lr,
                min_count: a.min_count,
                subsample: a.subsample,
                seed: a.seed,
                threads: a.threads,
            };
            let m: Embeddings = train_sgns(&embedding_corpus(&d), &config)?;
            m.save(&a.out)?;
            let (v, dim) = m.shape();
            println!("{v} x {dim} vectors -> {}", a.out.display());
        }
        Command::Auxgen(a) => auxgen(a)?,
        Command::Surrogate(a) => {
            let train = read_pairs(&a.train)?;
            let test = read_pairs(&a.test)?;
            let config = SurrogateConfig { epochs: a.epochs, learning_rate: a.lr, l2: a.l2, seed: a.seed };
            let model = surrogate::train::<f64>(&train, a.task, &config)?;
            let preds = model.predict_all(&test);
            jsonl::write(&a.out, &preds)?;
            println!("{} predictions -> {}", preds.len(), a.out.display());
        }
        Command::Score(a) => score(a)?,
        Command::Pipeline(a) => {
            let config = PipelineConfig::load(&a.config)?;
            let out = pipeline::run(&config)?;
            print!("{}", out.report.to_text());
            info!("outputs in {}", config.out_dir.display());
        }
        Command::Synth(a) => synthesize(a)?,
    }
    Ok(())
}

fn seed_extract(a: SeedArgs) -> Result<()> {
    let d = a.input.load()?;
    let stopwords: HashSet<String> = match &a.stopwords {
        Some(p) => parse_stopwords(&fs::read_to_string(p).with_context(|| p.display().to_string())?),
        None => default_stopwords(),
    };
    let config = LldaConfig { alpha: a.alpha, eta: a.eta, iterations: a.iters, seed: a.seed };
    let docs = documents_from_dataset(&d, &stopwords);
    let model = llda::fit(&docs, &d.task.categories(), &config)?;
    let lists = model.all_seeds(a.k, &stopwords, a.min_doc_freq);
    llda::save_seeds(&a.out, &lists)?;
    for l in &lists {
        println!("{:<18} {}", l.aspect, l.tokens().collect::<Vec<_>>().join(" "));
    }
    Ok(())
}

fn auxgen(a: AuxgenArgs) -> Result<()> {
    let d = a.input.load()?;
    let seeds = llda::load_seeds(&a.seeds)?;
    let vectors = Embeddings::load(&a.vectors)?;
    let mut config = AuxGenConfig::for_task(d.task);
    if let Some(t) = a.threshold {
        config.threshold = t;
    }
    config.include_modifiers = !a.no_modifiers;
    let units = enumerate_units(&d, &d.task.categories());
    let aux = construct_all(&d, &units, &seeds, &vectors, &config)?;
    let fallbacks = aux.iter().filter(|x| x.fallback_used).count();
    if let Some(p) = &a.aux_out {
        jsonl::write(p, &aux)?;
    }
    let mut pairs = pair_records(&d, &units, &index_by_key(aux))?;
    if a.aspect_name_only {
        pairs = pairs.iter().map(PairRecord::aspect_name_only).collect();
    }
    let n = jsonl::write(&a.out, &pairs)?;
    println!("{n} pairs ({fallbacks} fallbacks) -> {}", a.out.display());
    Ok(())
}

fn gold_units(path: &Path, task: Task) -> Result<Vec<ClassificationUnit>> {
    if path.extension().and_then(|e| e.to_str()) == Some("jsonl") {
        if let Ok(pairs) = jsonl::read::<PairRecord>(path) {
            return Ok(pairs.iter().map(PairRecord::unit).collect());
        }
    }
    let d = load_parsed(path, None, task, Split::Test).map_err(|e| anyhow::anyhow!(e))?;
    Ok(enumerate_units(&d, &task.categories()))
}

fn score(a: ScoreArgs) -> Result<()> {
    let preds: Vec<Prediction> = jsonl::read(&a.preds)?;
    for p in &preds {
        if let Err(e) = p.validate() {
            bail!("{}: prediction {}: {e}", a.preds.display(), p.key());
        }
    }
    let golds =
        gold_units(&a.gold, a.task).with_context(|| format!("reading gold labels from {}", a.gold.display()))?;
    let strictness = if a.detection_only { Strictness::DetectionOnly } else { Strictness::default() };
    let report = score_with(a.task, &preds, &golds, strictness)?;
    if let Some(p) = &a.json {
        fs::write(p, serde_json::to_string_pretty(&report)? + "\n")?;
    }
    print!("{}", report.to_text());
    Ok(())
}

fn synthesize(a: SynthArgs) -> Result<()> {
    fs::create_dir_all(&a.out_dir)?;
    let corpus = synth::templated(a.task, a.train, a.test, a.seed);
    for (name, d) in [("train", &corpus.train), ("test", &corpus.test)] {
        if d.is_empty() {
            warn!("{name} split is empty; skipped");
            continue;
        }
        let raw = match a.task {
            Task::Absa => (format!("{name}.xml"), to_semeval_xml(d)),
            Task::Tabsa => (format!("{name}.json"), to_sentihood_json(d)),
        };
        fs::write(a.out_dir.join(&raw.0), raw.1)?;
        fs::write(a.out_dir.join(format!("{name}.conllu")), conllu::to_string(&synth::parses(d)))?;
        println!("{} {name} reviews -> {}", d.len(), a.out_dir.join(&raw.0).display());
    }
    Ok(())
}
