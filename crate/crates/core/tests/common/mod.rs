#![allow(dead_code)]

pub mod faults;
pub mod oracle;
pub mod service;

use std::path::PathBuf;

use geox::ingest::{ingest_workbook, WorkbookSource};
use geox::model::*;
use geox::{Store, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join("fixture")
}

pub fn fixture_source() -> WorkbookSource {
    WorkbookSource::read_dir(&fixture_dir()).expect("fixture files are readable")
}

/// A fresh data directory holding the fixture catalogue.
pub fn seeded_data_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    geox::persist::DataDir::new(dir.path()).save_store(&fixture_store()).unwrap();
    dir
}

/// Runs the CLI in-process and returns (exit code, stdout, stderr).
pub fn run_cli(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = geox::cli::run(std::iter::once("geox").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

pub fn fixture_store() -> Store {
    let (store, report) = ingest_workbook(&fixture_source()).expect("fixture parses");
    assert!(report.is_ok(), "fixture has errors:\n{report}");
    store
}

pub const HEALTH_TERMS: &[&str] = &[
    "Air Pollution",
    "Haemorrhagic Fever",
    "Hemorrhagic Fever",
    "Malaria",
    "Urban Green Spaces",
    "Rural Mental Health",
    "COVID-19",
    "Heat Stress",
    "Childhood Obesity",
    "Ocean Harmful Algal Blooms",
    "Dengue",
    "Asthma",
    "Lyme Disease",
    "Schistosomiasis",
    "Cholera",
    "Well-being, \"self-reported\"",
    "Café Culture",
    "Night-time Light 2020",
];

pub const AREAS: &[&str] = &[
    "Global",
    "Global Coastal Zone (Ocean)",
    "USA",
    "UK",
    "Kenya",
    "China",
    "India",
    "Brazil",
    "Germany",
    "São Paulo",
    "Lake Victoria Basin",
];

pub const PROVIDERS: &[&str] = &[
    "National Aeronautics and Space Administration (NASA)",
    "European Space Agency (ESA)",
    "Maxar Technologies",
    "Planet Labs",
    "Ordnance Survey (UK)",
    "National Centers for Environmental Information, NESDIS, NOAA",
    "Université de Genève",
    "Japan Aerospace Exploration Agency",
];

pub const WORDS: &[&str] = &[
    "land", "cover", "night", "lights", "ocean", "colour", "vegetation", "index", "urban", "heat", "island",
    "forest", "loss", "water", "quality", "aerosol", "depth", "climate", "risk", "exposure", "green", "space",
];

fn pick<'a, R: Rng>(rng: &mut R, items: &[&'a str], max: usize) -> Vec<&'a str> {
    let n = rng.gen_range(0..=max);
    items.choose_multiple(rng, n).copied().collect()
}

fn phrase<R: Rng>(rng: &mut R, words: usize) -> String {
    let mut out: Vec<String> = (0..words).map(|_| WORDS.choose(rng).unwrap().to_string()).collect();
    out[0] = capitalize(&out[0]);
    if rng.gen_bool(0.2) {
        out.push("(v2, \"beta\")".to_string());
    }
    out.join(" ")
}

fn capitalize(word: &str) -> String {
    let mut c = word.chars();
    c.next().map(|f| f.to_uppercase().chain(c).collect()).unwrap_or_default()
}

fn terms(list: Vec<&str>) -> Vec<Term> {
    list.into_iter().map(Term::from).collect()
}

fn resolution<R: Rng>(rng: &mut R) -> Resolution {
    match rng.gen_range(0..8) {
        0 => Resolution::point(*[10.0, 20.0, 30.0, 250.0, 500.0].choose(rng).unwrap()),
        1 => Resolution::point(*[1000.0, 5000.0, 25000.0].choose(rng).unwrap()),
        2 => Resolution::point(0.3).with_band("Panchromatic"),
        3 => Resolution::point(2.4).with_band("Multispectral"),
        4 => Resolution::range(0.15, 0.5),
        5 => Resolution::at_least(10000.0),
        6 => Resolution::Scale { denominator: *[10_000, 250_000, 7_000_000].choose(rng).unwrap() },
        _ => Resolution::Unspecified,
    }
}

fn one_of<T: Copy, R: Rng>(rng: &mut R, all: &[T]) -> T {
    *all.choose(rng).unwrap()
}

pub fn random_dataset<R: Rng>(rng: &mut R, id: String) -> DatasetRecord {
    let region = one_of(rng, CoverageRegion::ALL);
    let mut areas = pick(rng, &AREAS[2..], 3);
    if region == CoverageRegion::Global || areas.is_empty() {
        areas.push(AREAS[rng.gen_range(0..2)]);
    }
    let first = rng.gen_bool(0.85).then(|| rng.gen_range(1972..2023));
    let still = match first {
        Some(f) if rng.gen_bool(0.6) => Some(rng.gen_range(f..=2024)),
        _ => None,
    };
    let mut providers: Vec<Provider> = pick(rng, PROVIDERS, 2)
        .into_iter()
        .map(|name| Provider::new(name, one_of(rng, ProviderCategory::ALL), one_of(rng, ProviderRegion::ALL)))
        .collect();
    if providers.is_empty() {
        providers.push(Provider::new(PROVIDERS[0], ProviderCategory::GovernmentAgency, ProviderRegion::America));
    }
    let words = rng.gen_range(1..4);
    let n_resolutions = rng.gen_range(0..3);
    DatasetRecord {
        name: phrase(rng, words),
        providers,
        first_available_year: first,
        update_frequency: one_of(rng, UpdateFrequency::ALL),
        still_updated_as_of: still,
        cost: CostInfo {
            access: one_of(rng, CostAccess::ALL),
            notes: rng.gen_bool(0.3).then(|| "Free for research, \"non-commercial\" use".to_string()),
        },
        coverage: CoverageInfo { region, areas: terms(areas) },
        resolutions: (0..n_resolutions).map(|_| resolution(rng)).collect(),
        url: if rng.gen_bool(0.9) { format!("https://example.org/data/{id}?a=1&b=2") } else { String::new() },
        health_applications: terms(pick(rng, HEALTH_TERMS, 3)),
        publication_ids: Vec::new(),
        id,
    }
}

pub fn random_publication<R: Rng>(rng: &mut R, id: String, dataset_ids: Vec<String>) -> PublicationRecord {
    let words = rng.gen_range(2..6);
    PublicationRecord {
        title: phrase(rng, words),
        year: rng.gen_range(2005..=2023),
        journal: if rng.gen_bool(0.8) { "Health & Place".to_string() } else { String::new() },
        journal_category: one_of(rng, JournalCategory::ALL),
        study_theme: one_of(rng, StudyTheme::ALL),
        study_topics: terms(pick(rng, HEALTH_TERMS, 2)),
        study_areas: terms(pick(rng, AREAS, 2)),
        link: format!("https://doi.example/{id}"),
        dataset_ids,
        health_applications: terms(pick(rng, HEALTH_TERMS, 2)),
        id,
    }
}

/// A valid store with symmetric links, built through the public API.
pub fn random_store<R: Rng>(rng: &mut R, max_datasets: usize, max_publications: usize) -> Store {
    let mut store = Store::new();
    let n_datasets = rng.gen_range(0..=max_datasets);
    let mut dataset_ids = Vec::new();
    for i in 0..n_datasets {
        let id = format!("d{i}-{}", WORDS.choose(rng).unwrap());
        let record = random_dataset(rng, id);
        dataset_ids.push(store.upsert_dataset(record).expect("generated dataset is valid"));
    }
    let n_publications = rng.gen_range(0..=max_publications);
    for i in 0..n_publications {
        let n_links = rng.gen_range(0..=3.min(dataset_ids.len()));
        let links: Vec<String> = dataset_ids.choose_multiple(rng, n_links).cloned().collect();
        let record = random_publication(rng, format!("p{i}"), links);
        store.upsert_publication(record).expect("generated publication is valid");
    }
    store
}

/// Spelling noise: doubled or dropped letters, vowel swaps, case changes and
/// accents.
pub fn misspell<R: Rng>(rng: &mut R, text: &str) -> String {
    let mut chars: Vec<char> = text.chars().collect();
    if chars.len() < 3 {
        return text.to_uppercase();
    }
    let i = rng.gen_range(1..chars.len());
    match rng.gen_range(0..5) {
        0 => {
            let c = chars[i];
            chars.insert(i, c);
        }
        1 => {
            chars.remove(i);
        }
        2 => {
            for c in chars.iter_mut().skip(1) {
                *c = match *c {
                    'a' => 'e',
                    'e' => 'a',
                    'o' => 'u',
                    other => other,
                };
            }
        }
        3 => chars = text.to_uppercase().chars().collect(),
        _ => {
            for c in chars.iter_mut() {
                if *c == 'e' {
                    *c = 'é';
                }
            }
        }
    }
    chars.into_iter().collect()
}

fn store_values(store: &Store) -> (Vec<String>, Vec<String>, Vec<String>) {
    let mut health = Vec::new();
    let mut areas = Vec::new();
    let mut providers = Vec::new();
    for d in store.datasets() {
        health.extend(d.health_applications.iter().map(|t| t.as_str().to_string()));
        areas.extend(d.coverage.areas.iter().map(|t| t.as_str().to_string()));
        providers.extend(d.providers.iter().map(|p| p.name.clone()));
    }
    (health, areas, providers)
}

fn draw<R: Rng>(rng: &mut R, from_store: &[String], vocab: &[&str]) -> String {
    if !from_store.is_empty() && rng.gen_bool(0.7) {
        from_store.choose(rng).unwrap().clone()
    } else {
        vocab.choose(rng).unwrap().to_string()
    }
}

/// A query whose values mostly come from `store`, so that results are
/// usually non-trivial.
pub fn random_query<R: Rng>(rng: &mut R, store: &Store) -> geox::search::DatasetQuery {
    let (health, areas, providers) = store_values(store);
    let mut q = geox::search::DatasetQuery::default();
    for _ in 0..rng.gen_range(0..3) {
        let mut t = draw(rng, &health, HEALTH_TERMS);
        if rng.gen_bool(0.2) {
            t = t.to_lowercase();
        }
        q.health_terms.push(t);
    }
    if rng.gen_bool(0.3) {
        q.cost = Some(*CostAccess::ALL.choose(rng).unwrap());
    }
    for _ in 0..rng.gen_range(0..3) {
        q.areas.push(draw(rng, &areas, AREAS));
    }
    if rng.gen_bool(0.3) {
        q.providers.push(draw(rng, &providers, PROVIDERS));
    }
    if rng.gen_bool(0.2) {
        q.provider_categories.push(*ProviderCategory::ALL.choose(rng).unwrap());
    }
    if rng.gen_bool(0.6) {
        let source = if rng.gen_bool(0.7) { draw(rng, &health, HEALTH_TERMS) } else { draw(rng, &areas, AREAS) };
        let words: Vec<&str> = source.split_whitespace().collect();
        let take = rng.gen_range(1..=words.len().max(1));
        let mut text = words[..take.min(words.len())].join(" ");
        if rng.gen_bool(0.5) {
            text = misspell(rng, &text);
        }
        q.free_text = Some(text);
    }
    q
}
