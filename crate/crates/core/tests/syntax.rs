mod common;

use std::collections::BTreeSet;

use auxsent::conllu::{self, validate_tokens, ParsedToken};
use auxsent::syntax::{hit_is_sound, modifiers_for, DependencyGraph, ModifierHit, Rule};
use common::fixture;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sentence(id: &str) -> Vec<ParsedToken> {
    conllu::read_file(fixture("rule_examples.conllu"))
        .unwrap()
        .into_iter()
        .find(|s| s.id.as_deref() == Some(id))
        .unwrap()
        .tokens
}

fn hits_of(id: &str, candidate: &str) -> Vec<(String, Rule, String)> {
    let toks = sentence(id);
    let g = DependencyGraph::new(&toks);
    let c = toks.iter().find(|t| t.form == candidate).unwrap().index;
    let hits = modifiers_for(&g, c);
    assert!(hits.iter().all(|h| hit_is_sound(&g, c, h)));
    hits.into_iter().map(|h| (h.modifier.form, h.rule, h.anchor.form)).collect()
}

fn hit(m: &str, rule: Rule, anchor: &str) -> (String, Rule, String) {
    (m.to_string(), rule, anchor.to_string())
}

#[test]
fn amod_example() {
    assert_eq!(hits_of("very_delicious_sushi", "sushi"), vec![hit("delicious", Rule::Amod, "sushi")]);
}

#[test]
fn copular_subject_example() {
    assert_eq!(hits_of("sushi_is_yummy", "sushi"), vec![hit("yummy", Rule::NsubjAdj, "sushi")]);
}

#[test]
fn outlier_adverb_example() {
    assert_eq!(
        hits_of("genetically_modified_food", "food"),
        vec![hit("Genetically", Rule::AdvmodOutlier, "modified"), hit("modified", Rule::Amod, "food")]
    );
}

#[test]
fn review_sentences() {
    assert_eq!(hits_of("s1", "coffee"), vec![hit("outstanding", Rule::NsubjAdj, "coffee")]);
    // "very" is a degree adverb on an adjective, not an outlier
    assert_eq!(hits_of("s2", "Waiters"), vec![hit("friendly", Rule::NsubjAdj, "Waiters")]);
    // "world" is a noun predicate, so the pasta clause yields nothing
    assert!(hits_of("s2", "pasta").is_empty());
    assert_eq!(hits_of("s3", "LOC1"), vec![hit("cheap", Rule::NsubjAdj, "LOC1")]);
}

const UPOS: &[&str] = &["NOUN", "PROPN", "ADJ", "ADV", "VERB", "DET", "AUX"];
const DEPREL: &[&str] = &["amod", "nsubj", "nsubj:pass", "advmod", "obj", "det", "conj", "amod"];

fn random_tree(seed: u64, n: usize) -> Vec<ParsedToken> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..=n).collect();
    order.shuffle(&mut rng);
    let mut heads = vec![0; n + 1];
    for k in 1..n {
        heads[order[k]] = order[rng.gen_range(0..k)];
    }
    (1..=n)
        .map(|i| ParsedToken {
            index: i,
            form: format!("w{i}"),
            lemma: None,
            upos: UPOS[rng.gen_range(0..UPOS.len())].to_string(),
            head: heads[i],
            deprel: if heads[i] == 0 { "root".into() } else { DEPREL[rng.gen_range(0..DEPREL.len())].into() },
        })
        .collect()
}

/// Expected modifier indices, computed by scanning the token list.
fn oracle(toks: &[ParsedToken], c: usize) -> (BTreeSet<usize>, BTreeSet<usize>) {
    let cand = &toks[c - 1];
    let base = |t: &ParsedToken| t.deprel.split(':').next().unwrap().to_string();
    let mut direct = BTreeSet::new();
    if matches!(cand.upos.as_str(), "NOUN" | "PROPN") {
        for t in toks {
            if t.head == c && base(t) == "amod" {
                direct.insert(t.index);
            }
        }
        if base(cand) == "nsubj" && cand.head > 0 && toks[cand.head - 1].upos == "ADJ" {
            direct.insert(cand.head);
        }
    }
    let outliers = toks
        .iter()
        .filter(|t| {
            base(t) == "advmod"
                && t.upos == "ADV"
                && direct.contains(&t.head)
                && toks[t.head - 1].upos != "ADJ"
                && t.index != c
                && !direct.contains(&t.index)
        })
        .map(|t| t.index)
        .collect();
    (direct, outliers)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn hits_are_sound_ordered_and_exactly_closed(seed in any::<u64>(), n in 1usize..14) {
        let toks = random_tree(seed, n);
        prop_assert!(validate_tokens(&toks).is_ok());
        let g = DependencyGraph::new(&toks);
        for c in 1..=n {
            let hits = modifiers_for(&g, c);
            for h in &hits {
                prop_assert!(hit_is_sound(&g, c, h), "{:?}", h);
            }
            prop_assert!(hits.windows(2).all(|w| w[0].modifier.index < w[1].modifier.index));
            let of = |rules: &[Rule]| -> BTreeSet<usize> {
                hits.iter().filter(|h| rules.contains(&h.rule)).map(|h: &ModifierHit| h.modifier.index).collect()
            };
            let (direct, outliers) = oracle(&toks, c);
            prop_assert_eq!(of(&[Rule::Amod, Rule::NsubjAdj]), direct);
            prop_assert_eq!(of(&[Rule::AdvmodOutlier]), outliers);
        }
    }
}
