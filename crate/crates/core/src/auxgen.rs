//! Auxiliary-sentence construction and sentence-pair emission.
//!
//! For a unit (review, target?, aspect) the auxiliary sentence is the set of
//! review tokens semantically close to the aspect's seeds, plus the opinion
//! modifiers the dependency rules attach to them, in sentence order. When
//! nothing clears the similarity threshold the aspect name stands in.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::Path;

use log::warn;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{
    is_target_name, AspectCategory, ClassificationUnit, Dataset, Review, SentimentLabel, Task, UnitKey,
};
use crate::embeddings::EmbeddingMatrix;
use crate::jsonl::{self, JsonlError};
use crate::llda::SeedList;
use crate::scalar::Real;
use crate::syntax::{modifiers_for, DependencyGraph, Rule};

#[derive(Debug, Error)]
pub enum AuxGenError {
    #[error("review {0} has no dependency parse but modifiers were requested")]
    MissingParse(String),
    #[error("unit {0} refers to an unknown review")]
    UnknownReview(String),
    #[error("no auxiliary sentence for unit {0}")]
    MissingAuxiliary(String),
    #[error("threshold {0} outside [-1, 1]")]
    Threshold(f64),
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuxGenConfig {
    /// Cosine similarity floor for semantic candidates.
    pub threshold: f64,
    pub seeds_per_aspect: usize,
    pub include_modifiers: bool,
}

impl AuxGenConfig {
    pub fn for_task(task: Task) -> Self {
        AuxGenConfig {
            threshold: match task {
                Task::Absa => 0.3,
                Task::Tabsa => 0.4,
            },
            seeds_per_aspect: 10,
            include_modifiers: true,
        }
    }
}

/// Content-word POS tags eligible as semantic candidates.
pub const CANDIDATE_UPOS: [&str; 4] = ["NOUN", "PROPN", "ADJ", "VERB"];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    /// 1-based token index in the parse (0-based position when unparsed).
    pub index: usize,
    /// Lowercased surface form.
    pub form: String,
}

/// Review tokens whose best similarity to any seed reaches `threshold`, in
/// sentence order, deduplicated by lowercased form.
///
/// Parsed reviews only offer content words ([`CANDIDATE_UPOS`]); unparsed
/// ones offer every token containing a letter. Out-of-vocabulary tokens never
/// qualify.
pub fn semantic_candidates<T: Real>(
    review: &Review,
    seeds: &SeedList,
    m: &EmbeddingMatrix<T>,
    threshold: f64,
) -> Vec<Candidate> {
    let pool: Vec<(usize, String)> = if review.is_parsed() {
        review
            .tokens
            .iter()
            .filter(|t| CANDIDATE_UPOS.contains(&t.upos.as_str()))
            .map(|t| (t.index, t.form.to_lowercase()))
            .collect()
    } else {
        review
            .surface_tokens()
            .into_iter()
            .enumerate()
            .filter(|(_, t)| t.chars().any(char::is_alphabetic))
            .map(|(i, t)| (i, t.to_lowercase()))
            .collect()
    };

    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (index, form) in pool {
        if seen.contains(&form) {
            continue;
        }
        let qualifies = m.max_seed_similarity(&form, seeds).is_some_and(|s| s.as_f64() >= threshold);
        if qualifies {
            seen.insert(form.clone());
            out.push(Candidate { index, form });
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModifierProvenance {
    pub token: String,
    pub rule: Rule,
    pub anchor: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxiliarySentence {
    #[serde(flatten)]
    pub unit: UnitKey,
    pub candidates: Vec<String>,
    pub modifiers: Vec<String>,
    #[serde(default)]
    pub provenance: Vec<ModifierProvenance>,
    pub text: String,
    pub fallback_used: bool,
}

fn prefixed(target: Option<&str>, body: &str) -> String {
    match target {
        Some(t) => format!("{t} {body}"),
        None => body.to_string(),
    }
}

/// Builds the auxiliary sentence of one unit.
pub fn construct<T: Real>(
    unit: &ClassificationUnit,
    review: &Review,
    seeds: &SeedList,
    m: &EmbeddingMatrix<T>,
    config: &AuxGenConfig,
) -> Result<AuxiliarySentence, AuxGenError> {
    if !(-1.0..=1.0).contains(&config.threshold) {
        return Err(AuxGenError::Threshold(config.threshold));
    }
    if config.include_modifiers && !review.is_parsed() {
        return Err(AuxGenError::MissingParse(review.id.clone()));
    }
    let target = unit.target.as_deref();
    let candidates: Vec<Candidate> = semantic_candidates(review, seeds, m, config.threshold)
        .into_iter()
        .filter(|c| !is_target_name(&c.form.to_uppercase()) && Some(c.form.as_str()) != target)
        .collect();

    if candidates.is_empty() {
        return Ok(AuxiliarySentence {
            unit: unit.key(),
            candidates: Vec::new(),
            modifiers: Vec::new(),
            provenance: Vec::new(),
            text: prefixed(target, unit.category.as_str()),
            fallback_used: true,
        });
    }

    let candidate_idx: BTreeSet<usize> = candidates.iter().map(|c| c.index).collect();
    let mut modifier_idx = BTreeSet::new();
    let mut provenance = BTreeMap::new();
    if config.include_modifiers {
        let graph = DependencyGraph::new(&review.tokens);
        for c in &candidates {
            for hit in modifiers_for(&graph, c.index) {
                let i = hit.modifier.index;
                if candidate_idx.contains(&i) || !modifier_idx.insert(i) {
                    continue;
                }
                provenance.insert(
                    i,
                    ModifierProvenance {
                        token: hit.modifier.form.to_lowercase(),
                        rule: hit.rule,
                        anchor: hit.anchor.form.to_lowercase(),
                    },
                );
            }
        }
    }

    let form_at = |i: usize| -> String {
        if review.is_parsed() {
            review.tokens[i - 1].form.to_lowercase()
        } else {
            review.surface_tokens()[i].to_lowercase()
        }
    };
    let selected: BTreeSet<usize> = candidate_idx.union(&modifier_idx).copied().collect();
    let body = selected.iter().map(|&i| form_at(i)).collect::<Vec<_>>().join(" ");
    Ok(AuxiliarySentence {
        unit: unit.key(),
        candidates: candidates.into_iter().map(|c| c.form).collect(),
        modifiers: modifier_idx.iter().map(|&i| form_at(i)).collect(),
        provenance: provenance.into_values().collect(),
        text: prefixed(target, &body),
        fallback_used: false,
    })
}

/// Auxiliary sentences for every unit, in unit order. Units are processed in
/// parallel; aspects without a seed list fall back to the aspect name.
pub fn construct_all<T: Real>(
    dataset: &Dataset,
    units: &[ClassificationUnit],
    seeds: &BTreeMap<AspectCategory, SeedList>,
    m: &EmbeddingMatrix<T>,
    config: &AuxGenConfig,
) -> Result<Vec<AuxiliarySentence>, AuxGenError> {
    let reviews = dataset.index_by_id();
    for aspect in units.iter().map(|u| &u.category).collect::<BTreeSet<_>>() {
        if !seeds.contains_key(aspect) {
            warn!("no seeds for aspect {aspect}; its units use the aspect name");
        }
    }
    units
        .par_iter()
        .map(|unit| {
            let review = reviews
                .get(unit.review_id.as_str())
                .ok_or_else(|| AuxGenError::UnknownReview(unit.key().to_string()))?;
            let empty;
            let seed_list = match seeds.get(&unit.category) {
                Some(s) => s,
                None => {
                    empty = SeedList { aspect: unit.category.clone(), seeds: Vec::new() };
                    &empty
                }
            };
            construct(unit, review, seed_list, m, config)
        })
        .collect()
}

/// One line of the sentence-pair file consumed by classifiers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairRecord {
    pub review_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
    pub category: AspectCategory,
    pub auxiliary_text: String,
    pub sentence_text: String,
    pub gold_label: SentimentLabel,
    pub fallback_used: bool,
}

impl PairRecord {
    pub fn key(&self) -> UnitKey {
        UnitKey { review_id: self.review_id.clone(), target: self.target.clone(), category: self.category.clone() }
    }

    pub fn unit(&self) -> ClassificationUnit {
        ClassificationUnit {
            review_id: self.review_id.clone(),
            target: self.target.clone(),
            category: self.category.clone(),
            gold: self.gold_label,
        }
    }

    /// Same pair with the auxiliary sentence replaced by the bare aspect name.
    pub fn aspect_name_only(&self) -> PairRecord {
        PairRecord {
            auxiliary_text: prefixed(self.target.as_deref(), self.category.as_str()),
            fallback_used: true,
            ..self.clone()
        }
    }
}

/// Joins units with their auxiliary sentences and review text. Records
/// come back sorted by review id, target and category.
pub fn pair_records(
    dataset: &Dataset,
    units: &[ClassificationUnit],
    aux: &HashMap<UnitKey, AuxiliarySentence>,
) -> Result<Vec<PairRecord>, AuxGenError> {
    let reviews = dataset.index_by_id();
    let mut records = units
        .iter()
        .map(|u| {
            let key = u.key();
            let review =
                reviews.get(u.review_id.as_str()).ok_or_else(|| AuxGenError::UnknownReview(key.to_string()))?;
            let a = aux.get(&key).ok_or_else(|| AuxGenError::MissingAuxiliary(key.to_string()))?;
            Ok(PairRecord {
                review_id: u.review_id.clone(),
                target: u.target.clone(),
                category: u.category.clone(),
                auxiliary_text: a.text.clone(),
                sentence_text: review.text.clone(),
                gold_label: u.gold,
                fallback_used: a.fallback_used,
            })
        })
        .collect::<Result<Vec<_>, AuxGenError>>()?;
    records.sort_by_key(PairRecord::key);
    Ok(records)
}

/// Writes one pair record per unit and returns the record count.
pub fn emit_pairs(
    dataset: &Dataset,
    units: &[ClassificationUnit],
    aux: &HashMap<UnitKey, AuxiliarySentence>,
    path: impl AsRef<Path>,
) -> Result<usize, AuxGenError> {
    let records = pair_records(dataset, units, aux)?;
    Ok(jsonl::write(path, &records)?)
}

pub fn read_pairs(path: impl AsRef<Path>) -> Result<Vec<PairRecord>, AuxGenError> {
    Ok(jsonl::read(path)?)
}

pub fn index_by_key(aux: Vec<AuxiliarySentence>) -> HashMap<UnitKey, AuxiliarySentence> {
    aux.into_iter().map(|a| (a.unit.clone(), a)).collect()
}
