//! Synthetic corpora with planted structure.
//!
//! Each generator knows the answer it planted, so tests can compare model
//! output with the generator instead of with hand-picked expectations. The
//! templated review corpus doubles as demo data for the CLI.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conllu::{ConlluSentence, ParsedToken};
use crate::corpus::{Annotation, AspectCategory, Dataset, Review, SentimentLabel, Split, Target, Task};
use crate::llda::LabeledDocument;

/// Labeled documents drawn from topics with disjoint vocabularies.
#[derive(Clone, Debug)]
pub struct TopicCorpus {
    pub topics: Vec<AspectCategory>,
    /// Planted words of each topic, parallel to `topics`.
    pub vocabularies: Vec<Vec<String>>,
    pub background: Vec<String>,
    pub documents: Vec<LabeledDocument>,
}

/// 200 documents over 4 topics of 20 words each.
pub fn planted_topics(seed: u64) -> TopicCorpus {
    planted_topics_with(seed, 200, 4, 20)
}

/// Each document carries one or two topics and 20 to 40 tokens. A token is
/// background noise with probability 0.15, otherwise a uniform word of one
/// of the document's topics.
pub fn planted_topics_with(seed: u64, documents: usize, topics: usize, words_per_topic: usize) -> TopicCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<AspectCategory> = (0..topics).map(|t| AspectCategory::new(&format!("topic{t}"))).collect();
    let vocabularies: Vec<Vec<String>> =
        (0..topics).map(|t| (0..words_per_topic).map(|w| format!("t{t}w{w}")).collect()).collect();
    let background: Vec<String> = (0..10).map(|w| format!("bg{w}")).collect();
    let mut docs = Vec::with_capacity(documents);
    for _ in 0..documents {
        let mut labels: Vec<usize> = vec![rng.gen_range(0..topics)];
        if topics > 1 && rng.gen_bool(0.5) {
            let other = (labels[0] + rng.gen_range(1..topics)) % topics;
            labels.push(other);
        }
        labels.sort_unstable();
        let len = rng.gen_range(20..=40);
        let tokens = (0..len)
            .map(|_| {
                if rng.gen_bool(0.15) {
                    background.choose(&mut rng).unwrap().clone()
                } else {
                    let t = *labels.choose(&mut rng).unwrap();
                    vocabularies[t].choose(&mut rng).unwrap().clone()
                }
            })
            .collect();
        docs.push(LabeledDocument { tokens, labels: labels.iter().map(|&t| names[t].clone()).collect() });
    }
    TopicCorpus { topics: names, vocabularies, background, documents: docs }
}

/// Sentences that each draw every token from one of two word clusters.
#[derive(Clone, Debug)]
pub struct ClusterCorpus {
    pub clusters: [Vec<String>; 2],
    pub sentences: Vec<Vec<String>>,
}

pub fn two_clusters(seed: u64, sentences: usize, cluster_size: usize, sentence_len: usize) -> ClusterCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clusters = [
        (0..cluster_size).map(|i| format!("a{i}")).collect::<Vec<_>>(),
        (0..cluster_size).map(|i| format!("b{i}")).collect::<Vec<_>>(),
    ];
    let sentences = (0..sentences)
        .map(|_| {
            let c = &clusters[rng.gen_range(0..2)];
            (0..sentence_len).map(|_| c.choose(&mut rng).unwrap().clone()).collect()
        })
        .collect();
    ClusterCorpus { clusters, sentences }
}

struct AspectLexicon {
    name: &'static str,
    nouns: &'static [&'static str],
    verbs: &'static [&'static str],
    /// Preposition and objects of an aspect-specific modifier phrase.
    preposition: &'static str,
    context: &'static [&'static str],
    positive: &'static [&'static str],
    negative: &'static [&'static str],
}

const RESTAURANT: [AspectLexicon; 4] = [
    AspectLexicon {
        name: "food",
        preposition: "with",
        context: &["garlic", "cheese", "sauce", "basil", "truffle", "rice"],
        nouns: &["pizza", "sushi", "pasta", "burger", "salad", "steak", "soup", "dessert"],
        verbs: &["ordered", "tried", "ate"],
        positive: &["delicious", "tasty", "fresh", "yummy"],
        negative: &["bland", "stale", "soggy", "greasy"],
    },
    AspectLexicon {
        name: "service",
        preposition: "at",
        context: &["table", "door", "bar", "counter", "entrance"],
        nouns: &["waiter", "waitress", "staff", "server", "hostess", "manager"],
        verbs: &["met", "asked", "thanked"],
        positive: &["friendly", "attentive", "helpful", "polite"],
        negative: &["rude", "slow", "careless", "unfriendly"],
    },
    AspectLexicon {
        name: "price",
        preposition: "for",
        context: &["two", "drinks", "tips", "everything", "groups"],
        nouns: &["bill", "prices", "check", "deal", "cost"],
        verbs: &["paid", "got", "split"],
        positive: &["cheap", "affordable", "reasonable", "fair"],
        negative: &["expensive", "overpriced", "pricey", "steep"],
    },
    AspectLexicon {
        name: "ambience",
        preposition: "near",
        context: &["window", "fireplace", "garden", "fountain", "stage"],
        nouns: &["decor", "music", "atmosphere", "lighting", "patio", "room"],
        verbs: &["noticed", "liked", "saw"],
        positive: &["cozy", "charming", "romantic", "elegant"],
        negative: &["noisy", "dingy", "cramped", "gloomy"],
    },
];

const NEIGHBOURHOOD: [AspectLexicon; 4] = [
    AspectLexicon {
        name: "price",
        preposition: "per",
        context: &["month", "week", "room", "deposit"],
        nouns: &["rent", "housing", "flats", "prices"],
        verbs: &["has"],
        positive: &["cheap", "affordable"],
        negative: &["expensive", "pricey"],
    },
    AspectLexicon {
        name: "transit-location",
        preposition: "to",
        context: &["minutes", "line", "bus", "airport"],
        nouns: &["station", "tube", "transport", "commute"],
        verbs: &["has"],
        positive: &["convenient", "central"],
        negative: &["remote", "isolated"],
    },
    AspectLexicon {
        name: "safety",
        preposition: "after",
        context: &["dark", "midnight", "hours", "sunset"],
        nouns: &["streets", "nights", "alleys", "estates"],
        verbs: &["has"],
        positive: &["safe", "secure"],
        negative: &["dangerous", "sketchy"],
    },
    AspectLexicon {
        name: "general",
        preposition: "with",
        context: &["pubs", "parks", "people", "markets"],
        nouns: &["vibe", "community", "scene", "neighbourhood"],
        verbs: &["has"],
        positive: &["lovely", "vibrant"],
        negative: &["boring", "dull"],
    },
];

const NEUTRAL: [&str; 3] = ["okay", "average", "decent"];
const OCCASIONS: [&str; 5] = ["birthday", "anniversary", "lunch", "friday", "work"];
const VISITS: [&str; 3] = ["went", "came", "stopped"];

/// Clause token: form, UPOS, clause-local head (0 for the clause root), relation.
type Slot = (String, &'static str, usize, &'static str);

fn slot(form: &str, upos: &'static str, head: usize, rel: &'static str) -> Slot {
    (form.to_string(), upos, head, rel)
}

/// Joins clauses with "and" and a final period into one parsed sentence.
fn assemble(clauses: Vec<Vec<Slot>>) -> Vec<ParsedToken> {
    let mut tokens: Vec<ParsedToken> = Vec::new();
    let mut first_root = 0;
    for (c, clause) in clauses.into_iter().enumerate() {
        let root_local = clause.iter().position(|s| s.2 == 0).expect("clause has a root") + 1;
        let offset = tokens.len() + usize::from(c > 0);
        let root = offset + root_local;
        if c > 0 {
            tokens.push(ParsedToken {
                index: tokens.len() + 1,
                form: "and".into(),
                lemma: None,
                upos: "CCONJ".into(),
                head: root,
                deprel: "cc".into(),
            });
        }
        for (i, (form, upos, head, rel)) in clause.into_iter().enumerate() {
            let (head, rel) = match (head, c) {
                (0, 0) => (0, "root"),
                (0, _) => (first_root, "conj"),
                (h, _) => (offset + h, rel),
            };
            tokens.push(ParsedToken {
                index: offset + i + 1,
                form,
                lemma: None,
                upos: upos.into(),
                head,
                deprel: rel.into(),
            });
        }
        if c == 0 {
            first_root = root;
        }
    }
    tokens.push(ParsedToken {
        index: tokens.len() + 1,
        form: ".".into(),
        lemma: None,
        upos: "PUNCT".into(),
        head: first_root,
        deprel: "punct".into(),
    });
    if let Some(first) = tokens.first_mut() {
        let mut chars = first.form.chars();
        if let Some(c) = chars.next() {
            first.form = c.to_uppercase().chain(chars).collect();
        }
    }
    tokens
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words.choose(rng).copied().expect("non-empty word list")
}

fn sentiment_word(rng: &mut ChaCha8Rng, lex: &AspectLexicon, label: SentimentLabel) -> String {
    match label {
        SentimentLabel::Positive => pick(rng, lex.positive),
        SentimentLabel::Negative => pick(rng, lex.negative),
        _ => pick(rng, &NEUTRAL),
    }
    .to_string()
}

fn restaurant_clause(rng: &mut ChaCha8Rng, lex: &AspectLexicon, label: SentimentLabel) -> Vec<Slot> {
    let noun = pick(rng, lex.nouns);
    let adj = sentiment_word(rng, lex, label);
    let ctx = pick(rng, lex.context);
    match rng.gen_range(0..10) {
        0..=2 => vec![
            slot("the", "DET", 2, "det"),
            slot(noun, "NOUN", 4, "nsubj"),
            slot("was", "AUX", 4, "cop"),
            slot(&adj, "ADJ", 0, "root"),
        ],
        3..=4 => vec![
            slot("the", "DET", 2, "det"),
            slot(noun, "NOUN", 6, "nsubj"),
            slot(lex.preposition, "ADP", 4, "case"),
            slot(ctx, "NOUN", 2, "nmod"),
            slot("was", "AUX", 6, "cop"),
            slot(&adj, "ADJ", 0, "root"),
        ],
        5 => vec![
            slot("the", "DET", 2, "det"),
            slot(noun, "NOUN", 5, "nsubj"),
            slot("was", "AUX", 5, "cop"),
            slot("very", "ADV", 5, "advmod"),
            slot(&adj, "ADJ", 0, "root"),
        ],
        6..=8 => vec![
            slot("we", "PRON", 2, "nsubj"),
            slot(pick(rng, lex.verbs), "VERB", 0, "root"),
            slot(&adj, "ADJ", 4, "amod"),
            slot(noun, "NOUN", 2, "obj"),
            slot(lex.preposition, "ADP", 6, "case"),
            slot(ctx, "NOUN", 4, "nmod"),
        ],
        _ => vec![slot("it", "PRON", 3, "nsubj"), slot("was", "AUX", 3, "cop"), slot(&adj, "ADJ", 0, "root")],
    }
}

fn anecdote_clause(rng: &mut ChaCha8Rng) -> Vec<Slot> {
    vec![
        slot("we", "PRON", 2, "nsubj"),
        slot(pick(rng, &VISITS), "VERB", 0, "root"),
        slot("there", "ADV", 2, "advmod"),
        slot("for", "ADP", 5, "case"),
        slot(pick(rng, &OCCASIONS), "NOUN", 2, "obl"),
    ]
}

fn neighbourhood_clause(rng: &mut ChaCha8Rng, lex: &AspectLexicon, target: &str, label: SentimentLabel) -> Vec<Slot> {
    let noun = pick(rng, lex.nouns);
    let adj = sentiment_word(rng, lex, label);
    let ctx = pick(rng, lex.context);
    match rng.gen_range(0..4) {
        0 => vec![slot(target, "PROPN", 3, "nsubj"), slot("is", "AUX", 3, "cop"), slot(&adj, "ADJ", 0, "root")],
        1 => vec![
            slot("the", "DET", 2, "det"),
            slot(noun, "NOUN", 6, "nsubj"),
            slot("in", "ADP", 4, "case"),
            slot(target, "PROPN", 2, "nmod"),
            slot("is", "AUX", 6, "cop"),
            slot(&adj, "ADJ", 0, "root"),
        ],
        2 => vec![
            slot(target, "PROPN", 2, "nsubj"),
            slot(pick(rng, lex.verbs), "VERB", 0, "root"),
            slot(&adj, "ADJ", 4, "amod"),
            slot(noun, "NOUN", 2, "obj"),
            slot(lex.preposition, "ADP", 6, "case"),
            slot(ctx, "NOUN", 4, "nmod"),
        ],
        _ => vec![
            slot("the", "DET", 2, "det"),
            slot(noun, "NOUN", 8, "nsubj"),
            slot(lex.preposition, "ADP", 4, "case"),
            slot(ctx, "NOUN", 2, "nmod"),
            slot("in", "ADP", 6, "case"),
            slot(target, "PROPN", 2, "nmod"),
            slot("is", "AUX", 8, "cop"),
            slot(&adj, "ADJ", 0, "root"),
        ],
    }
}

fn polarity(rng: &mut ChaCha8Rng, neutral: bool) -> SentimentLabel {
    let x: f64 = rng.gen();
    if neutral && x < 0.1 {
        SentimentLabel::Neutral
    } else if x < 0.6 {
        SentimentLabel::Positive
    } else {
        SentimentLabel::Negative
    }
}

fn merge(annotations: &mut Vec<Annotation>, new: Annotation) {
    match annotations.iter_mut().find(|a| a.category == new.category && a.target == new.target) {
        Some(a) if a.sentiment != new.sentiment => a.sentiment = SentimentLabel::Conflict,
        Some(_) => {}
        None => annotations.push(new),
    }
}

fn restaurant_review(rng: &mut ChaCha8Rng, id: String, split: Split) -> Review {
    let mut clauses = Vec::new();
    let mut annotations = Vec::new();
    if rng.gen_bool(0.15) {
        clauses.push(anecdote_clause(rng));
        merge(
            &mut annotations,
            Annotation { target: None, category: AspectCategory::new("anecdotes"), sentiment: SentimentLabel::Neutral },
        );
    } else {
        let n = if rng.gen_bool(0.3) { 2 } else { 1 };
        for _ in 0..n {
            let lex = RESTAURANT.choose(rng).unwrap();
            let label = polarity(rng, true);
            clauses.push(restaurant_clause(rng, lex, label));
            merge(
                &mut annotations,
                Annotation { target: None, category: AspectCategory::new(lex.name), sentiment: label },
            );
        }
    }
    review_from(id, split, assemble(clauses), annotations)
}

fn neighbourhood_review(rng: &mut ChaCha8Rng, id: String, split: Split) -> Review {
    let mut clauses = Vec::new();
    let mut annotations = Vec::new();
    let two_targets = rng.gen_bool(0.3);
    let n = if two_targets || rng.gen_bool(0.3) { 2 } else { 1 };
    let mut aspects: Vec<&AspectLexicon> = NEIGHBOURHOOD.iter().collect();
    aspects.shuffle(rng);
    for (c, lex) in aspects.into_iter().take(n).enumerate() {
        let target = if two_targets && c == 1 { "LOC2" } else { "LOC1" };
        let label = polarity(rng, false);
        clauses.push(neighbourhood_clause(rng, lex, target, label));
        merge(
            &mut annotations,
            Annotation { target: Some(Target::new(target)), category: AspectCategory::new(lex.name), sentiment: label },
        );
    }
    review_from(id, split, assemble(clauses), annotations)
}

fn review_from(id: String, split: Split, tokens: Vec<ParsedToken>, annotations: Vec<Annotation>) -> Review {
    let text = tokens.iter().map(|t| t.form.as_str()).collect::<Vec<_>>().join(" ");
    let mut annotations = annotations;
    for a in &mut annotations {
        if let Some(t) = &mut a.target {
            t.token_index = tokens.iter().find(|tok| tok.form == t.name).map(|tok| tok.index);
        }
    }
    Review { id, text, tokens, annotations, split }
}

/// Parsed, annotated review corpus built from clause templates.
#[derive(Clone, Debug)]
pub struct TemplatedCorpus {
    pub train: Dataset,
    pub test: Dataset,
}

/// Restaurant reviews (ABSA) or neighbourhood comments with `LOC1`/`LOC2`
/// targets (TABSA). Aspect indicator nouns and opinion adjectives are drawn
/// from per-aspect word lists; some clauses mention no indicator noun at all.
pub fn templated(task: Task, train: usize, test: usize, seed: u64) -> TemplatedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut make = |n: usize, split: Split, prefix: &str| {
        let reviews = (0..n)
            .map(|i| {
                let id = format!("{prefix}{i}");
                match task {
                    Task::Absa => restaurant_review(&mut rng, id, split),
                    Task::Tabsa => neighbourhood_review(&mut rng, id, split),
                }
            })
            .collect();
        Dataset::new(task, reviews)
    };
    let train = make(train, Split::Train, "train-");
    let test = make(test, Split::Test, "test-");
    TemplatedCorpus { train, test }
}

/// CoNLL-U sentences of a parsed dataset, with review ids as `sent_id`.
pub fn parses(dataset: &Dataset) -> Vec<ConlluSentence> {
    dataset
        .reviews
        .iter()
        .map(|r| ConlluSentence { id: Some(r.id.clone()), text: Some(r.text.clone()), tokens: r.tokens.clone() })
        .collect()
}
