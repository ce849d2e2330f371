mod common;

use std::collections::BTreeSet;

use common::oracle::{covers, reference_soundex, scan};
use common::{fixture_store, random_query, random_store};
use geox::search::{search_datasets, search_publications, soundex, DatasetQuery, PublicationQuery};
use geox::Store;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn ids(store: &Store, q: &DatasetQuery) -> BTreeSet<String> {
    search_datasets(store, q).into_iter().map(|d| d.id.clone()).collect()
}

#[test]
fn engine_matches_linear_scan_on_fixture() {
    let store = fixture_store();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut non_empty = 0;
    for _ in 0..400 {
        let q = random_query(&mut rng, &store);
        let got = ids(&store, &q);
        assert_eq!(got, scan(&store, &q), "query {q:?}");
        non_empty += usize::from(!got.is_empty());
    }
    // The generator is only useful if it also finds things.
    assert!(non_empty >= 60, "only {non_empty} non-empty results");
}

#[test]
fn engine_matches_linear_scan_on_random_stores() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..60 {
        let store = random_store(&mut rng, 25, 10);
        for _ in 0..10 {
            let q = random_query(&mut rng, &store);
            assert_eq!(ids(&store, &q), scan(&store, &q), "query {q:?}");
        }
    }
}

fn single_facets(q: &DatasetQuery) -> Vec<DatasetQuery> {
    let mut out = Vec::new();
    if !q.health_terms.is_empty() {
        out.push(DatasetQuery { health_terms: q.health_terms.clone(), ..Default::default() });
    }
    if q.cost.is_some() {
        out.push(DatasetQuery { cost: q.cost, ..Default::default() });
    }
    if !q.areas.is_empty() {
        out.push(DatasetQuery { areas: q.areas.clone(), ..Default::default() });
    }
    if !q.providers.is_empty() {
        out.push(DatasetQuery { providers: q.providers.clone(), ..Default::default() });
    }
    if !q.provider_categories.is_empty() {
        out.push(DatasetQuery { provider_categories: q.provider_categories.clone(), ..Default::default() });
    }
    if q.free_text.is_some() {
        out.push(DatasetQuery { free_text: q.free_text.clone(), ..Default::default() });
    }
    out
}

#[test]
fn facet_order_does_not_matter() {
    let store = fixture_store();
    let everything: BTreeSet<String> = store.datasets().map(|d| d.id.clone()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let q = random_query(&mut rng, &store);
        let expected = ids(&store, &q);

        let mut shuffled = q.clone();
        shuffled.health_terms.shuffle(&mut rng);
        shuffled.areas.shuffle(&mut rng);
        shuffled.providers.shuffle(&mut rng);
        assert_eq!(ids(&store, &shuffled), expected);

        let mut facets = single_facets(&q);
        facets.shuffle(&mut rng);
        let intersected = facets
            .iter()
            .fold(everything.clone(), |acc, f| acc.intersection(&ids(&store, f)).cloned().collect());
        assert_eq!(intersected, expected, "query {q:?}");
    }
}

#[test]
fn exact_facet_is_subset_of_free_text() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let mut stores = vec![fixture_store()];
    stores.extend((0..20).map(|_| random_store(&mut rng, 20, 5)));
    for store in &stores {
        let terms: BTreeSet<String> = store
            .datasets()
            .flat_map(|d| d.health_applications.iter().chain(&d.coverage.areas).map(|t| t.as_str().to_string()))
            .collect();
        for t in terms {
            let exact = ids(store, &DatasetQuery { health_terms: vec![t.clone()], ..Default::default() });
            let area = ids(store, &DatasetQuery { areas: vec![t.clone()], ..Default::default() });
            let fuzzy = ids(store, &DatasetQuery { free_text: Some(t.clone()), ..Default::default() });
            assert!(exact.is_subset(&fuzzy), "{t:?}: {exact:?} not within {fuzzy:?}");
            assert!(area.is_subset(&fuzzy), "{t:?}");
        }
    }
}

#[test]
fn exact_text_hits_rank_first_then_by_name() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    for _ in 0..40 {
        let store = random_store(&mut rng, 25, 0);
        for _ in 0..10 {
            let q = random_query(&mut rng, &store);
            let results = search_datasets(&store, &q);
            let exact_flags: Vec<bool> = results
                .iter()
                .map(|d| {
                    let text = q.free_text.as_deref().unwrap_or("");
                    let scope: Vec<String> = d
                        .health_applications
                        .iter()
                        .chain(&d.coverage.areas)
                        .map(|t| common::oracle::reference_fold(t.as_str()))
                        .collect();
                    let toks = common::oracle::reference_tokens(text);
                    scope.iter().any(|v| {
                        let have = common::oracle::reference_tokens(v);
                        toks.iter().all(|t| have.contains(t))
                    })
                })
                .collect();
            // All exact hits come before all phonetic-only hits.
            assert!(exact_flags.windows(2).all(|w| w[0] || !w[1]), "{q:?} {exact_flags:?}");
            for pair in results.windows(2) {
                let (a, b) = (pair[0], pair[1]);
                let same_group = exact_flags[results.iter().position(|d| d.id == a.id).unwrap()]
                    == exact_flags[results.iter().position(|d| d.id == b.id).unwrap()];
                if same_group {
                    let key = |d: &geox::DatasetRecord| {
                        (common::oracle::reference_fold(&d.name), d.name.clone(), d.id.clone())
                    };
                    assert!(key(a) <= key(b), "{} before {}", a.name, b.name);
                }
            }
        }
    }
}

#[test]
fn misspelled_triple_gives_identical_results() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let mut stores = vec![fixture_store()];
    stores.extend((0..30).map(|_| random_store(&mut rng, 20, 0)));
    for store in &stores {
        let results: Vec<BTreeSet<String>> = ["haemorrhagic", "hemorrhagic", "hemoragic"]
            .iter()
            .map(|w| ids(store, &DatasetQuery { free_text: Some(format!("{w} fever")), ..Default::default() }))
            .collect();
        assert_eq!(results[0], results[1]);
        assert_eq!(results[1], results[2]);
    }
}

#[test]
fn publication_dataset_filter_matches_links() {
    let store = fixture_store();
    for d in store.datasets() {
        let q = PublicationQuery { dataset_name: Some(d.name.clone()), ..Default::default() };
        let got: BTreeSet<String> = search_publications(&store, &q).into_iter().map(|p| p.id.clone()).collect();
        // Every dataset whose name covers this name contributes its links.
        let expected: BTreeSet<String> = store
            .datasets()
            .filter(|other| covers(&d.name, &[other.name.as_str()]))
            .flat_map(|other| other.publication_ids.iter().cloned())
            .collect();
        assert_eq!(got, expected, "{}", d.name);
        assert!(d.publication_ids.iter().all(|p| got.contains(p)));
    }
}

#[test]
fn publication_health_filter_matches_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..40 {
        let store = random_store(&mut rng, 10, 20);
        for term in common::HEALTH_TERMS {
            let q = PublicationQuery { health_terms: vec![term.to_string()], ..Default::default() };
            let got: Vec<String> = search_publications(&store, &q).into_iter().map(|p| p.id.clone()).collect();
            let expected: BTreeSet<String> = store
                .publications()
                .filter(|p| {
                    let values: Vec<&str> =
                        p.health_applications.iter().chain(&p.study_topics).map(|t| t.as_str()).collect();
                    covers(term, &values)
                })
                .map(|p| p.id.clone())
                .collect();
            assert_eq!(got.iter().cloned().collect::<BTreeSet<_>>(), expected, "{term}");
            let years: Vec<i32> = got.iter().map(|id| store.publication(id).unwrap().year).collect();
            assert!(years.windows(2).all(|w| w[0] >= w[1]), "newest first");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn soundex_agrees_with_reference(word in "[a-zA-Z]{1,14}") {
        let code = soundex(&word).unwrap();
        prop_assert_eq!(code.as_str(), reference_soundex(&word).unwrap());
    }

    #[test]
    fn soundex_shape_and_case(word in "[a-zA-Z]{1,20}") {
        let code = soundex(&word).unwrap();
        let s = code.as_str();
        prop_assert_eq!(s.len(), 4);
        prop_assert!(s.as_bytes()[0].is_ascii_uppercase());
        prop_assert!(s[1..].bytes().all(|b| b.is_ascii_digit()));
        prop_assert_eq!(soundex(&word.to_lowercase()).unwrap(), soundex(&word.to_uppercase()).unwrap());
    }

    #[test]
    fn non_letters_have_no_code(token in "[0-9 _.-]{0,8}") {
        prop_assert!(soundex(&token).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn free_text_never_grows_when_tokens_are_added(seed in any::<u64>(), extra in "[a-z]{2,8}") {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = random_store(&mut rng, 15, 0);
        let q = random_query(&mut rng, &store);
        let base = q.free_text.clone().unwrap_or_default();
        let narrower = DatasetQuery { free_text: Some(format!("{base} {extra}")), ..q.clone() };
        prop_assert!(ids(&store, &narrower).is_subset(&ids(&store, &q)));
    }

    #[test]
    fn adding_a_facet_never_grows_results(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = random_store(&mut rng, 15, 0);
        let q = random_query(&mut rng, &store);
        let all = ids(&store, &DatasetQuery::default());
        prop_assert_eq!(all.len(), store.dataset_count());
        for facet in single_facets(&q) {
            prop_assert!(ids(&store, &q).is_subset(&ids(&store, &facet)));
        }
    }
}
