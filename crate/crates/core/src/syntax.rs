//! Opinion-modifier extraction from dependency parses.
//!
//! Three rules attach modifiers to a semantic candidate:
//!
//! * `Amod`: dependents of the candidate with relation `amod`.
//! * `NsubjAdj`: adjectival heads whose nominal subject is the candidate
//!   (copular predication, "the sushi is yummy").
//! * `AdvmodOutlier`: `advmod` adverbs hanging off a non-adjectival modifier
//!   found by the first two rules ("genetically modified food"). Degree
//!   adverbs on plain adjectives ("very delicious") are not outliers.
//!
//! Only nouns (`NOUN`, `PROPN`) anchor the first two rules.

use serde::{Deserialize, Serialize};

use crate::conllu::ParsedToken;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Rule {
    Amod,
    NsubjAdj,
    AdvmodOutlier,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModifierHit {
    pub modifier: ParsedToken,
    pub rule: Rule,
    /// Token that licensed the modifier: the candidate for `Amod` and
    /// `NsubjAdj`, an earlier modifier for `AdvmodOutlier`.
    pub anchor: ParsedToken,
}

pub fn is_noun(t: &ParsedToken) -> bool {
    matches!(t.upos.as_str(), "NOUN" | "PROPN")
}

pub fn is_adjective(t: &ParsedToken) -> bool {
    t.upos == "ADJ"
}

pub fn is_adverb(t: &ParsedToken) -> bool {
    t.upos == "ADV"
}

/// Borrowed view over one parsed sentence with child lists.
#[derive(Debug)]
pub struct DependencyGraph<'a> {
    tokens: &'a [ParsedToken],
    children: Vec<Vec<usize>>,
}

impl<'a> DependencyGraph<'a> {
    /// Tokens must satisfy [`crate::conllu::validate_tokens`].
    pub fn new(tokens: &'a [ParsedToken]) -> Self {
        let mut children = vec![Vec::new(); tokens.len() + 1];
        for t in tokens {
            if t.head <= tokens.len() {
                children[t.head].push(t.index);
            }
        }
        DependencyGraph { tokens, children }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> Option<&'a ParsedToken> {
        index.checked_sub(1).and_then(|i| self.tokens.get(i))
    }

    pub fn head(&self, index: usize) -> Option<&'a ParsedToken> {
        self.token(index).and_then(|t| self.token(t.head))
    }

    pub fn dependents(&self, index: usize) -> impl Iterator<Item = &'a ParsedToken> + '_ {
        self.children.get(index).into_iter().flatten().filter_map(move |&c| self.token(c))
    }

    fn dependents_with(&self, index: usize, rel: &'static str) -> impl Iterator<Item = &'a ParsedToken> + '_ {
        self.dependents(index).filter(move |d| d.base_deprel() == rel)
    }
}

/// Applies the three rules to the candidate at `candidate_index` (1-based).
/// Hits come back in sentence order, one per modifier token.
pub fn modifiers_for(graph: &DependencyGraph<'_>, candidate_index: usize) -> Vec<ModifierHit> {
    let Some(candidate) = graph.token(candidate_index) else {
        return Vec::new();
    };
    let mut hits: Vec<ModifierHit> = Vec::new();
    let push = |hits: &mut Vec<ModifierHit>, modifier: &ParsedToken, rule, anchor: &ParsedToken| {
        if modifier.index != candidate.index && !hits.iter().any(|h| h.modifier.index == modifier.index) {
            hits.push(ModifierHit { modifier: modifier.clone(), rule, anchor: anchor.clone() });
        }
    };

    if is_noun(candidate) {
        for m in graph.dependents_with(candidate.index, "amod") {
            push(&mut hits, m, Rule::Amod, candidate);
        }
        if candidate.base_deprel() == "nsubj" {
            if let Some(head) = graph.head(candidate.index).filter(|h| is_adjective(h)) {
                push(&mut hits, head, Rule::NsubjAdj, candidate);
            }
        }
    }

    let opinion_words: Vec<ParsedToken> =
        hits.iter().map(|h| h.modifier.clone()).filter(|m| !is_adjective(m)).collect();
    for opinion in &opinion_words {
        for adv in graph.dependents_with(opinion.index, "advmod").filter(|a| is_adverb(a)) {
            push(&mut hits, adv, Rule::AdvmodOutlier, opinion);
        }
    }

    hits.sort_by_key(|h| h.modifier.index);
    hits
}

/// Structural predicate each hit must satisfy on its graph.
pub fn hit_is_sound(graph: &DependencyGraph<'_>, candidate_index: usize, hit: &ModifierHit) -> bool {
    let m = &hit.modifier;
    if graph.token(m.index) != Some(m) {
        return false;
    }
    match hit.rule {
        Rule::Amod => hit.anchor.index == candidate_index && m.head == candidate_index && m.base_deprel() == "amod",
        Rule::NsubjAdj => {
            hit.anchor.index == candidate_index
                && is_adjective(m)
                && hit.anchor.head == m.index
                && hit.anchor.base_deprel() == "nsubj"
        }
        Rule::AdvmodOutlier => {
            hit.anchor.index != candidate_index && m.head == hit.anchor.index && m.base_deprel() == "advmod"
        }
    }
}
