mod common;

use std::collections::{BTreeMap, HashMap};

use auxsent::auxgen::{
    construct, construct_all, emit_pairs, index_by_key, pair_records, read_pairs, semantic_candidates, AuxGenConfig,
};
use auxsent::conllu;
use auxsent::corpus::{attach_parses, enumerate_units, load_semeval, load_sentihood, Split};
use auxsent::embeddings::{train_sgns, SgnsConfig};
use auxsent::llda::load_seeds;
use auxsent::synth::{parses, templated, two_clusters};
use auxsent::{AspectCategory, ClassificationUnit, Dataset, Embeddings64, Review, SeedList, Task};
use common::fixture;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn parsed(path: &str, task: Task) -> Dataset {
    let d = match task {
        Task::Absa => load_semeval(fixture(path), Split::Test).unwrap(),
        Task::Tabsa => load_sentihood(fixture(path), Split::Test).unwrap(),
    };
    let p: Vec<_> = conllu::read_file(fixture("rule_examples.conllu"))
        .unwrap()
        .into_iter()
        .filter(|s| d.reviews.iter().any(|r| s.id.as_deref() == Some(r.id.as_str())))
        .collect();
    attach_parses(d, &p).unwrap()
}

fn vectors() -> Embeddings64 {
    Embeddings64::load(fixture("running_vectors.txt")).unwrap()
}

fn seeds() -> BTreeMap<AspectCategory, SeedList> {
    load_seeds(fixture("running_seeds.json")).unwrap()
}

fn unit(d: &Dataset, id: &str, target: Option<&str>, aspect: &str) -> (ClassificationUnit, Review) {
    let units = enumerate_units(d, &d.task.categories());
    let u = units
        .into_iter()
        .find(|u| u.review_id == id && u.category.as_str() == aspect && u.target.as_deref() == target)
        .unwrap();
    let r = d.reviews.iter().find(|r| r.id == id).unwrap().clone();
    (u, r)
}

#[test]
fn running_example_food_and_price() {
    let m = vectors();
    assert!(m.similarity("coffee", "menu").unwrap() >= 0.3);
    let s = seeds();
    assert!(s[&AspectCategory::new("food")].tokens().any(|t| t == "menu"));
    let d = parsed("running_example.xml", Task::Absa);
    let cfg = AuxGenConfig::for_task(Task::Absa);

    let (u, r) = unit(&d, "s1", None, "food");
    let a = construct(&u, &r, &s[&u.category], &m, &cfg).unwrap();
    assert_eq!(a.candidates, vec!["coffee"]);
    assert_eq!(a.modifiers, vec!["outstanding"]);
    assert_eq!(a.text, "coffee outstanding");
    assert!(!a.fallback_used);

    let (u, r) = unit(&d, "s1", None, "price");
    let a = construct(&u, &r, &s[&u.category], &m, &cfg).unwrap();
    assert_eq!(a.text, "price");
    assert!(a.fallback_used && a.candidates.is_empty());
}

#[test]
fn running_example_service() {
    let d = parsed("running_example.xml", Task::Absa);
    let (u, r) = unit(&d, "s2", None, "service");
    let a = construct(&u, &r, &seeds()[&u.category], &vectors(), &AuxGenConfig::for_task(Task::Absa)).unwrap();
    assert_eq!(a.candidates, vec!["waiters"]);
    assert!(a.text.contains("waiters friendly"), "{}", a.text);
}

#[test]
fn target_prefixes_tabsa_text() {
    let d = parsed("running_example.json", Task::Tabsa);
    let (u, r) = unit(&d, "s3", Some("LOC1"), "price");
    let a = construct(&u, &r, &seeds()[&u.category], &vectors(), &AuxGenConfig::for_task(Task::Tabsa)).unwrap();
    assert_eq!(a.text, "LOC1 cheap");
    let (u, r) = unit(&d, "s3", Some("LOC1"), "safety");
    let a =
        construct(&u, &r, &seeds()[&AspectCategory::new("price")], &vectors(), &AuxGenConfig::for_task(Task::Tabsa));
    assert_eq!(a.unwrap().text, "LOC1 cheap");
    let none = SeedList { aspect: AspectCategory::new("safety"), seeds: vec![] };
    let a = construct(&u, &r, &none, &vectors(), &AuxGenConfig::for_task(Task::Tabsa)).unwrap();
    assert_eq!((a.text.as_str(), a.fallback_used), ("LOC1 safety", true));
}

#[test]
fn impossible_threshold_gives_no_candidates() {
    let d = parsed("running_example.xml", Task::Absa);
    let (_, r) = unit(&d, "s1", None, "food");
    let food = &seeds()[&AspectCategory::new("food")];
    assert!(semantic_candidates(&r, food, &vectors(), 1.0 + 1e-9).is_empty());
    let cfg = AuxGenConfig { threshold: 1.5, ..AuxGenConfig::for_task(Task::Absa) };
    let (u, _) = unit(&d, "s1", None, "food");
    assert!(construct(&u, &r, food, &vectors(), &cfg).is_err());
}

#[test]
fn other_cluster_seeds_select_nothing() {
    let c = two_clusters(1, 600, 10, 10);
    let config = SgnsConfig { dim: 32, window: 5, min_count: 1, subsample: 0.0, seed: 3, ..SgnsConfig::default() };
    let m: Embeddings64 = train_sgns(&c.sentences, &config).unwrap();
    let review = Review {
        id: "a".into(),
        text: c.clusters[0].join(" "),
        tokens: Vec::new(),
        annotations: Vec::new(),
        split: Split::Test,
    };
    let seeds = SeedList {
        aspect: AspectCategory::new("b"),
        seeds: c.clusters[1].iter().take(3).map(|w| (w.clone(), 1.0)).collect(),
    };
    let threshold = 0.4;
    // brute force over every token/seed pair
    let expected: Vec<String> = c.clusters[0]
        .iter()
        .filter(|w| seeds.tokens().any(|s| m.similarity(w, s).unwrap() >= threshold))
        .cloned()
        .collect();
    assert!(expected.is_empty());
    assert!(semantic_candidates(&review, &seeds, &m, threshold).is_empty());
    // and the same-cluster seeds select the whole sentence
    let own = SeedList { aspect: AspectCategory::new("a"), seeds: vec![("a0".into(), 1.0)] };
    assert_eq!(semantic_candidates(&review, &own, &m, threshold).len(), 10);
}

#[test]
fn emitted_pairs_round_trip() {
    let d = parsed("running_example.xml", Task::Absa);
    let units = enumerate_units(&d, &Task::Absa.categories());
    let aux = construct_all(&d, &units, &seeds(), &vectors(), &AuxGenConfig::for_task(Task::Absa)).unwrap();
    let aux = index_by_key(aux);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pairs.jsonl");
    assert_eq!(emit_pairs(&d, &units, &aux, &path).unwrap(), 10);
    let back = read_pairs(&path).unwrap();
    assert_eq!(back, pair_records(&d, &units, &aux).unwrap());
    let keys: Vec<_> = back.iter().map(|p| p.key()).collect();
    assert!(keys.windows(2).all(|w| w[0] < w[1]));
    let s1_food = back.iter().find(|p| p.review_id == "s1" && p.category.as_str() == "food").unwrap();
    assert_eq!(s1_food.auxiliary_text, "coffee outstanding");
    assert_eq!(s1_food.sentence_text, "Did I mention that the coffee is outstanding?");

    let empty = dir.path().join("empty.jsonl");
    assert_eq!(emit_pairs(&d, &[], &HashMap::new(), &empty).unwrap(), 0);
    assert_eq!(std::fs::read_to_string(&empty).unwrap(), "");
    assert!(emit_pairs(&d, &units, &aux, dir.path().join("missing/dir/pairs.jsonl")).is_err());
}

#[test]
fn units_without_auxiliary_sentences_are_rejected() {
    let d = parsed("running_example.xml", Task::Absa);
    let units = enumerate_units(&d, &Task::Absa.categories());
    assert!(pair_records(&d, &units, &HashMap::new()).is_err());
}

/// Templated reviews with a random vector for every word.
fn random_setup(seed: u64, tabsa: bool) -> (Dataset, Embeddings64) {
    let task = if tabsa { Task::Tabsa } else { Task::Absa };
    let c = templated(task, 6, 0, seed);
    let d = attach_parses(c.train.clone(), &parses(&c.train)).unwrap();
    let mut words: Vec<String> =
        d.reviews.iter().flat_map(|r| r.tokens.iter().map(|t| t.form.to_lowercase())).collect();
    words.sort();
    words.dedup();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..words.len() * 3).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let m = Embeddings64::from_vectors(words, 3, values).unwrap();
    (d, m)
}

fn random_seeds(m: &Embeddings64, aspect: &AspectCategory, picks: &[usize]) -> SeedList {
    let vocab = m.vocabulary().tokens();
    SeedList { aspect: aspect.clone(), seeds: picks.iter().map(|&i| (vocab[i % vocab.len()].clone(), 1.0)).collect() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn raising_threshold_never_adds_candidates(
        seed in 0u64..500,
        picks in prop::collection::vec(0usize..1000, 1..4),
        t1 in -1.0f64..1.0,
        t2 in -1.0f64..1.0,
    ) {
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let (d, m) = random_setup(seed, false);
        let s = random_seeds(&m, &AspectCategory::new("food"), &picks);
        for r in &d.reviews {
            let wide = semantic_candidates(r, &s, &m, lo);
            let narrow = semantic_candidates(r, &s, &m, hi);
            prop_assert!(narrow.iter().all(|c| wide.contains(c)));
        }
    }

    #[test]
    fn construction_is_total_ordered_and_licensed(
        seed in 0u64..500,
        picks in prop::collection::vec(0usize..1000, 0..4),
        threshold in -0.5f64..1.0,
        tabsa in any::<bool>(),
    ) {
        let (d, m) = random_setup(seed, tabsa);
        let cfg = AuxGenConfig { threshold, ..AuxGenConfig::for_task(d.task) };
        for u in enumerate_units(&d, &d.task.categories()) {
            let r = d.reviews.iter().find(|r| r.id == u.review_id).unwrap();
            let s = random_seeds(&m, &u.category, &picks);
            let a = construct(&u, r, &s, &m, &cfg).unwrap();
            prop_assert!(!a.text.is_empty());
            let name = match &u.target {
                Some(t) => format!("{t} {}", u.category),
                None => u.category.to_string(),
            };
            prop_assert_eq!(a.fallback_used, a.candidates.is_empty());
            prop_assert_eq!(a.fallback_used, a.text == name && a.candidates.is_empty());
            // body tokens appear in sentence order
            let body: Vec<&str> = a.text.split(' ').skip(usize::from(u.target.is_some())).collect();
            if !a.fallback_used {
                let sentence: Vec<String> = r.tokens.iter().map(|t| t.form.to_lowercase()).collect();
                let mut pos = 0;
                for w in &body {
                    let found = sentence[pos..].iter().position(|s| s == w);
                    prop_assert!(found.is_some(), "{} out of order in {:?}", w, sentence);
                    pos += found.unwrap() + 1;
                }
            }
            for p in &a.provenance {
                prop_assert!(a.candidates.contains(&p.anchor) || a.modifiers.contains(&p.anchor));
            }
            // another aspect's seeds have no influence
            let other = AspectCategory::new("unrelated");
            let mut all = BTreeMap::new();
            all.insert(u.category.clone(), s.clone());
            all.insert(other.clone(), random_seeds(&m, &other, &[seed as usize, 7]));
            let alone = construct_all(&d, std::slice::from_ref(&u), &all, &m, &cfg).unwrap();
            prop_assert_eq!(&alone[0], &a);
        }
    }
}
