//! Canonical record model for the two benchmark formats.
//!
//! SemEval-2014 Task 4 restaurant XML becomes an ABSA dataset (categories
//! only), SentiHood JSON becomes a TABSA dataset (masked `LOC` targets).
//! Reviews are stored one per JSON line; classification units are
//! enumerated on demand with `none` filling every unannotated combination.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use log::warn;
use quick_xml::events::Event;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conllu::{self, ConlluSentence, ParsedToken};
use crate::jsonl::{self, JsonlError};

pub const SEMEVAL_CATEGORIES: [&str; 5] = ["food", "price", "service", "ambience", "anecdotes"];
pub const SENTIHOOD_CATEGORIES: [&str; 4] = ["price", "transit-location", "safety", "general"];

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("XML parse error at byte {offset}: {message}")]
    Xml { offset: u64, message: String },
    #[error("JSON parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("review {review_id}: {message}")]
    Validation { review_id: String, message: String },
    #[error("CoNLL-U line {line}: {message}")]
    Conllu { line: usize, message: String },
    #[error("parse alignment failed at {id}: {message}")]
    Alignment { id: String, message: String },
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

impl CorpusError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CorpusError::Io { path: path.to_path_buf(), source }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Task {
    Absa,
    Tabsa,
}

impl Task {
    pub fn categories(self) -> Vec<AspectCategory> {
        let names: &[&str] = match self {
            Task::Absa => &SEMEVAL_CATEGORIES,
            Task::Tabsa => &SENTIHOOD_CATEGORIES,
        };
        names.iter().map(|n| AspectCategory::new(n)).collect()
    }

    /// Labels a unit of this task may carry, in tie-breaking order.
    pub fn labels(self) -> &'static [SentimentLabel] {
        use SentimentLabel::*;
        match self {
            Task::Absa => &[None, Negative, Neutral, Positive, Conflict],
            Task::Tabsa => &[None, Negative, Positive],
        }
    }
}

impl FromStr for Task {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "absa" | "semeval" => Ok(Task::Absa),
            "tabsa" | "sentihood" => Ok(Task::Tabsa),
            other => Err(format!("unknown task {other:?} (expected absa or tabsa)")),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::Absa => "absa",
            Task::Tabsa => "tabsa",
        })
    }
}

/// Lowercase aspect category name such as `food` or `transit-location`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AspectCategory(String);

impl AspectCategory {
    /// # Panics
    /// On an empty name.
    pub fn new(name: &str) -> Self {
        let name = name.trim().to_lowercase();
        assert!(!name.is_empty(), "aspect category name must be nonempty");
        AspectCategory(name)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AspectCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Sentiment of a (target, category) pair. Declaration order is the
/// tie-breaking order used by argmax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentLabel {
    None,
    Negative,
    Neutral,
    Positive,
    Conflict,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 5] = [
        SentimentLabel::None,
        SentimentLabel::Negative,
        SentimentLabel::Neutral,
        SentimentLabel::Positive,
        SentimentLabel::Conflict,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentLabel::None => "none",
            SentimentLabel::Negative => "negative",
            SentimentLabel::Neutral => "neutral",
            SentimentLabel::Positive => "positive",
            SentimentLabel::Conflict => "conflict",
        }
    }

    pub fn is_none(self) -> bool {
        self == SentimentLabel::None
    }
}

impl FromStr for SentimentLabel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SentimentLabel::ALL
            .into_iter()
            .find(|l| l.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown sentiment label {s:?}"))
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    #[default]
    Train,
    Dev,
    Test,
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "dev" | "validation" => Ok(Split::Dev),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split {other:?}")),
        }
    }
}

/// Masked target entity of a TABSA review.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Target {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_index: Option<usize>,
}

impl Target {
    pub fn new(name: &str) -> Self {
        Target { name: name.to_string(), token_index: None }
    }
}

/// True for the SentiHood masking scheme: `LOC` followed by digits.
pub fn is_target_name(token: &str) -> bool {
    token.strip_prefix("LOC").is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Target>,
    pub category: AspectCategory,
    pub sentiment: SentimentLabel,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub text: String,
    /// Parser tokens; empty until [`attach_parses`] runs.
    #[serde(default)]
    pub tokens: Vec<ParsedToken>,
    #[serde(default)]
    pub annotations: Vec<Annotation>,
    #[serde(default)]
    pub split: Split,
}

impl Review {
    pub fn is_parsed(&self) -> bool {
        !self.tokens.is_empty()
    }

    /// Surface tokens: parser forms once attached, simple splitting before.
    pub fn surface_tokens(&self) -> Vec<String> {
        if self.is_parsed() {
            self.tokens.iter().map(|t| t.form.clone()).collect()
        } else {
            simple_tokenize(&self.text)
        }
    }

    /// Targets in stable order: those mentioned in the text plus any annotated ones.
    pub fn targets(&self) -> Vec<String> {
        let mut names: BTreeSet<String> = self.surface_tokens().into_iter().filter(|t| is_target_name(t)).collect();
        names.extend(self.annotations.iter().filter_map(|a| a.target.as_ref().map(|t| t.name.clone())));
        names.into_iter().collect()
    }

    fn add_annotation(&mut self, annotation: Annotation) {
        let key = |a: &Annotation| (a.target.as_ref().map(|t| t.name.clone()), a.category.clone());
        if self.annotations.iter().any(|a| key(a) == key(&annotation)) {
            warn!(
                "review {}: duplicate annotation for {:?}/{}, keeping the first",
                self.id,
                annotation.target.as_ref().map(|t| &t.name),
                annotation.category
            );
            return;
        }
        self.annotations.push(annotation);
    }

    fn locate_targets(&mut self) {
        let forms = self.surface_tokens();
        let parsed = self.is_parsed();
        for ann in &mut self.annotations {
            if let Some(target) = &mut ann.target {
                target.token_index =
                    forms.iter().position(|f| *f == target.name).map(|p| if parsed { p + 1 } else { p });
            }
        }
    }
}

/// Whitespace-plus-punctuation splitting. Letters, digits, and word-internal
/// apostrophes or hyphens form tokens; every other visible char stands alone.
pub fn simple_tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut word = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joiner =
            (c == '\'' || c == '-') && !word.is_empty() && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || joiner {
            word.push(c);
            continue;
        }
        if !word.is_empty() {
            tokens.push(std::mem::take(&mut word));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !word.is_empty() {
        tokens.push(word);
    }
    tokens
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub task: Task,
    pub reviews: Vec<Review>,
}

impl Dataset {
    pub fn new(task: Task, reviews: Vec<Review>) -> Self {
        Dataset { task, reviews }
    }

    pub fn len(&self) -> usize {
        self.reviews.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reviews.is_empty()
    }

    pub fn review(&self, id: &str) -> Option<&Review> {
        self.reviews.iter().find(|r| r.id == id)
    }

    pub fn index_by_id(&self) -> HashMap<&str, &Review> {
        self.reviews.iter().map(|r| (r.id.as_str(), r)).collect()
    }

    pub fn write_jsonl(&self, path: impl AsRef<Path>) -> Result<usize, CorpusError> {
        Ok(jsonl::write(path, &self.reviews)?)
    }

    pub fn read_jsonl(path: impl AsRef<Path>, task: Task) -> Result<Self, CorpusError> {
        Ok(Dataset::new(task, jsonl::read(path)?))
    }

    /// Fraction of annotated (review, category) pairs whose category name
    /// does not occur in the lowercased review text.
    pub fn implicit_aspect_rate(&self) -> f64 {
        let mut total = 0usize;
        let mut implicit = 0usize;
        for r in &self.reviews {
            let text = r.text.to_lowercase();
            let cats: BTreeSet<&str> = r.annotations.iter().map(|a| a.category.as_str()).collect();
            for c in cats {
                total += 1;
                if !text.contains(c) {
                    implicit += 1;
                }
            }
        }
        if total == 0 {
            0.0
        } else {
            implicit as f64 / total as f64
        }
    }

    /// Fraction of reviews annotated with more than one distinct category.
    pub fn multi_aspect_rate(&self) -> f64 {
        if self.reviews.is_empty() {
            return 0.0;
        }
        let multi = self
            .reviews
            .iter()
            .filter(|r| r.annotations.iter().map(|a| &a.category).collect::<HashSet<_>>().len() > 1)
            .count();
        multi as f64 / self.reviews.len() as f64
    }
}

fn read_text(path: &Path) -> Result<String, CorpusError> {
    std::fs::read_to_string(path).map_err(|e| CorpusError::io(path, e))
}

/// Loads a SemEval-2014 Task 4 restaurant file (sentence / aspectCategories schema).
pub fn load_semeval(path: impl AsRef<Path>, split: Split) -> Result<Dataset, CorpusError> {
    parse_semeval(&read_text(path.as_ref())?, split)
}

pub fn parse_semeval(xml: &str, split: Split) -> Result<Dataset, CorpusError> {
    let mut reader = quick_xml::Reader::from_str(xml);
    let xml_err = |reader: &quick_xml::Reader<&[u8]>, message: String| CorpusError::Xml {
        offset: reader.error_position(),
        message,
    };

    let mut reviews = Vec::new();
    let mut current: Option<Review> = None;
    let mut in_text = false;
    loop {
        let event = reader.read_event().map_err(|e| xml_err(&reader, e.to_string()))?;
        match event {
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"sentence" => {
                let id =
                    attribute(&e, b"id").map_err(|m| xml_err(&reader, m))?.unwrap_or_else(|| reviews.len().to_string());
                current = Some(Review { id, text: String::new(), tokens: Vec::new(), annotations: Vec::new(), split });
            }
            Event::Start(e) if e.name().as_ref() == b"text" => in_text = true,
            Event::End(e) if e.name().as_ref() == b"text" => in_text = false,
            Event::Text(t) if in_text => {
                let text = t.unescape().map_err(|e| xml_err(&reader, e.to_string()))?;
                if let Some(r) = current.as_mut() {
                    r.text.push_str(&text);
                }
            }
            Event::CData(t) if in_text => {
                if let Some(r) = current.as_mut() {
                    r.text.push_str(&String::from_utf8_lossy(&t));
                }
            }
            Event::Start(e) | Event::Empty(e) if e.name().as_ref() == b"aspectCategory" => {
                let Some(review) = current.as_mut() else { continue };
                let category = attribute(&e, b"category").map_err(|m| xml_err(&reader, m))?;
                let polarity = attribute(&e, b"polarity").map_err(|m| xml_err(&reader, m))?;
                let (Some(category), Some(polarity)) = (category, polarity) else {
                    return Err(CorpusError::Validation {
                        review_id: review.id.clone(),
                        message: "aspectCategory without category or polarity".into(),
                    });
                };
                let sentiment = parse_polarity(&polarity, &review.id)?;
                // The official files spell the fifth category "anecdotes/miscellaneous".
                let name = category.split('/').next().unwrap_or(&category);
                review.add_annotation(Annotation { target: None, category: AspectCategory::new(name), sentiment });
            }
            Event::End(e) if e.name().as_ref() == b"sentence" => {
                if let Some(mut r) = current.take() {
                    r.text = r.text.trim().to_string();
                    reviews.push(r);
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if current.is_some() {
        return Err(CorpusError::Xml {
            offset: reader.buffer_position(),
            message: "unterminated sentence element".into(),
        });
    }
    Ok(Dataset::new(Task::Absa, reviews))
}

fn attribute(e: &quick_xml::events::BytesStart, name: &[u8]) -> Result<Option<String>, String> {
    match e.try_get_attribute(name).map_err(|err| err.to_string())? {
        Some(attr) => Ok(Some(attr.unescape_value().map_err(|err| err.to_string())?.into_owned())),
        None => Ok(None),
    }
}

fn parse_polarity(s: &str, review_id: &str) -> Result<SentimentLabel, CorpusError> {
    match s.parse::<SentimentLabel>() {
        Ok(SentimentLabel::None) | Err(_) => Err(CorpusError::Validation {
            review_id: review_id.to_string(),
            message: format!("unknown polarity {s:?}"),
        }),
        Ok(label) => Ok(label),
    }
}

#[derive(Deserialize)]
struct RawSentihood {
    id: serde_json::Value,
    text: String,
    #[serde(default)]
    opinions: Vec<RawOpinion>,
}

#[derive(Deserialize)]
struct RawOpinion {
    sentiment: String,
    aspect: String,
    target_entity: String,
}

/// Loads a SentiHood file, keeping only the four evaluated categories.
pub fn load_sentihood(path: impl AsRef<Path>, split: Split) -> Result<Dataset, CorpusError> {
    parse_sentihood(&read_text(path.as_ref())?, split)
}

pub fn parse_sentihood(json: &str, split: Split) -> Result<Dataset, CorpusError> {
    let raw: Vec<RawSentihood> = serde_json::from_str(json)?;
    let keep: HashSet<&str> = SENTIHOOD_CATEGORIES.into_iter().collect();
    let mut reviews = Vec::with_capacity(raw.len());
    for entry in raw {
        let id = match entry.id {
            serde_json::Value::String(s) => s,
            other => other.to_string(),
        };
        let mut review =
            Review { id, text: entry.text.trim().to_string(), tokens: Vec::new(), annotations: Vec::new(), split };
        let mentioned: HashSet<String> = simple_tokenize(&review.text).into_iter().collect();
        for op in entry.opinions {
            let aspect = op.aspect.trim().to_lowercase();
            if !keep.contains(aspect.as_str()) {
                continue;
            }
            let sentiment = match op.sentiment.parse::<SentimentLabel>() {
                Ok(s @ (SentimentLabel::Positive | SentimentLabel::Negative)) => s,
                _ => {
                    return Err(CorpusError::Validation {
                        review_id: review.id.clone(),
                        message: format!("unsupported sentiment {:?}", op.sentiment),
                    })
                }
            };
            let target = op.target_entity.trim().to_string();
            if !mentioned.contains(&target) {
                warn!("review {}: target {target} does not occur in the text", review.id);
            }
            review.add_annotation(Annotation {
                target: Some(Target::new(&target)),
                category: AspectCategory::new(&aspect),
                sentiment,
            });
        }
        review.locate_targets();
        reviews.push(review);
    }
    Ok(Dataset::new(Task::Tabsa, reviews))
}

/// Renders an ABSA dataset in the SemEval restaurant XML layout.
pub fn to_semeval_xml(dataset: &Dataset) -> String {
    use quick_xml::escape::escape;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<sentences>\n");
    for r in &dataset.reviews {
        out.push_str(&format!("    <sentence id=\"{}\">\n", escape(r.id.as_str())));
        out.push_str(&format!("        <text>{}</text>\n", escape(r.text.as_str())));
        if !r.annotations.is_empty() {
            out.push_str("        <aspectCategories>\n");
            for a in &r.annotations {
                let name = match a.category.as_str() {
                    "anecdotes" => "anecdotes/miscellaneous",
                    other => other,
                };
                out.push_str(&format!(
                    "            <aspectCategory category=\"{}\" polarity=\"{}\"/>\n",
                    escape(name),
                    a.sentiment
                ));
            }
            out.push_str("        </aspectCategories>\n");
        }
        out.push_str("    </sentence>\n");
    }
    out.push_str("</sentences>\n");
    out
}

#[derive(Serialize)]
struct SentihoodOut<'a> {
    id: &'a str,
    text: &'a str,
    opinions: Vec<OpinionOut<'a>>,
}

#[derive(Serialize)]
struct OpinionOut<'a> {
    sentiment: &'static str,
    aspect: &'a str,
    target_entity: &'a str,
}

/// Renders a TABSA dataset in the SentiHood JSON layout.
pub fn to_sentihood_json(dataset: &Dataset) -> String {
    let entries: Vec<SentihoodOut> = dataset
        .reviews
        .iter()
        .map(|r| SentihoodOut {
            id: &r.id,
            text: &r.text,
            opinions: r
                .annotations
                .iter()
                .filter_map(|a| {
                    let target = a.target.as_ref()?;
                    Some(OpinionOut {
                        sentiment: if a.sentiment == SentimentLabel::Positive { "Positive" } else { "Negative" },
                        aspect: a.category.as_str(),
                        target_entity: &target.name,
                    })
                })
                .collect(),
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("plain data serializes") + "\n"
}

/// Replaces each review's tokens with its CoNLL-U parse.
///
/// Sentences are matched by `sent_id` when every sentence carries one, and
/// by position otherwise.
pub fn attach_parses(mut dataset: Dataset, parses: &[ConlluSentence]) -> Result<Dataset, CorpusError> {
    let by_id = parses.iter().all(|s| s.id.is_some()) && !parses.is_empty();
    if by_id {
        let mut index: HashMap<&str, &ConlluSentence> = HashMap::with_capacity(parses.len());
        for s in parses {
            let id = s.id.as_deref().unwrap_or_default();
            if index.insert(id, s).is_some() {
                return Err(CorpusError::Alignment {
                    id: id.to_string(),
                    message: "duplicate sent_id in parse file".into(),
                });
            }
        }
        for review in &dataset.reviews {
            if !index.contains_key(review.id.as_str()) {
                return Err(CorpusError::Alignment {
                    id: review.id.clone(),
                    message: "no parse with this sent_id".into(),
                });
            }
        }
        if parses.len() != dataset.reviews.len() {
            let ids: HashSet<&str> = dataset.reviews.iter().map(|r| r.id.as_str()).collect();
            let extra = parses.iter().filter_map(|s| s.id.as_deref()).find(|id| !ids.contains(id)).unwrap_or_default();
            return Err(CorpusError::Alignment {
                id: extra.to_string(),
                message: "parse does not belong to any review".into(),
            });
        }
        for review in &mut dataset.reviews {
            set_tokens(review, &index[review.id.as_str()].tokens)?;
        }
    } else {
        if parses.len() != dataset.reviews.len() {
            let n = parses.len().min(dataset.reviews.len());
            let id = match dataset.reviews.get(n) {
                Some(r) => r.id.clone(),
                None => format!("parse #{}", n + 1),
            };
            return Err(CorpusError::Alignment {
                id,
                message: format!("{} reviews but {} parses", dataset.reviews.len(), parses.len()),
            });
        }
        for (review, parse) in dataset.reviews.iter_mut().zip(parses) {
            set_tokens(review, &parse.tokens)?;
        }
    }
    Ok(dataset)
}

fn set_tokens(review: &mut Review, tokens: &[ParsedToken]) -> Result<(), CorpusError> {
    conllu::validate_tokens(tokens)
        .map_err(|message| CorpusError::Validation { review_id: review.id.clone(), message })?;
    review.tokens = tokens.to_vec();
    review.locate_targets();
    Ok(())
}

/// One (review, target?, category) decision to classify.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationUnit {
    pub review_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub category: AspectCategory,
    #[serde(alias = "gold_label")]
    pub gold: SentimentLabel,
}

impl ClassificationUnit {
    pub fn key(&self) -> UnitKey {
        UnitKey { review_id: self.review_id.clone(), target: self.target.clone(), category: self.category.clone() }
    }
}

/// Identity of a classification unit, shared by pairs and predictions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnitKey {
    pub review_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub category: AspectCategory,
}

impl fmt::Display for UnitKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.target {
            Some(t) => write!(f, "{}/{}/{}", self.review_id, t, self.category),
            None => write!(f, "{}/{}", self.review_id, self.category),
        }
    }
}

/// Every (target, category) combination of every review, gold from the
/// annotations and `none` elsewhere. ABSA reviews contribute one unit per
/// category; TABSA reviews one per category and mentioned target.
pub fn enumerate_units(dataset: &Dataset, categories: &[AspectCategory]) -> Vec<ClassificationUnit> {
    let mut units = Vec::new();
    for review in &dataset.reviews {
        let targets: Vec<Option<String>> = match dataset.task {
            Task::Absa => vec![None],
            Task::Tabsa => review.targets().into_iter().map(Some).collect(),
        };
        for target in &targets {
            for category in categories {
                let gold = review
                    .annotations
                    .iter()
                    .find(|a| &a.category == category && a.target.as_ref().map(|t| &t.name) == target.as_ref())
                    .map_or(SentimentLabel::None, |a| a.sentiment);
                units.push(ClassificationUnit {
                    review_id: review.id.clone(),
                    target: target.clone(),
                    category: category.clone(),
                    gold,
                });
            }
        }
    }
    units
}
