mod common;

use std::fs;

use common::faults::{crash_and_reload, expected_after, stages};
use common::{fixture_source, fixture_store, random_store};
use geox::ingest::{export_csv, ingest_workbook, WorkbookSource};
use geox::persist::DataDir;
use geox::Store;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reingest(store: &Store) -> Store {
    let (back, report) = ingest_workbook(&export_csv(store)).expect("export parses");
    assert!(report.is_ok(), "{report}");
    back
}

#[test]
fn export_then_ingest_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..50 {
        let store = random_store(&mut rng, 30, 30);
        let back = reingest(&store);
        assert_eq!(back, store);
        assert_eq!(export_csv(&back), export_csv(&store));
    }
}

#[test]
fn fixture_round_trips() {
    let store = fixture_store();
    assert_eq!(reingest(&store), store);
}

#[test]
fn row_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let source = fixture_source();
    let shuffle = |bytes: &[u8], rng: &mut ChaCha8Rng| {
        let mut reader = csv::Reader::from_reader(bytes);
        let header = reader.headers().unwrap().clone();
        let mut records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        records.shuffle(rng);
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).unwrap();
        for r in records {
            w.write_record(&r).unwrap();
        }
        w.into_inner().unwrap()
    };
    let expected = fixture_store();
    for _ in 0..10 {
        let shuffled = WorkbookSource {
            datasets_csv: shuffle(&source.datasets_csv, &mut rng),
            publications_csv: shuffle(&source.publications_csv, &mut rng),
        };
        let (store, report) = ingest_workbook(&shuffled).unwrap();
        assert!(report.is_ok());
        assert_eq!(store, expected);
    }
}

#[test]
fn crash_at_any_step_leaves_old_or_new() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let all = stages(2);
    for trial in 0..20 {
        let old = random_store(&mut rng, 12, 12);
        let new = random_store(&mut rng, 12, 12);
        let stage = all[trial % all.len()];
        let tear = rng.gen_bool(0.5);
        let loaded = crash_and_reload(&old, &new, stage, tear);
        let expected = expected_after(stage, &old, &new);
        assert!(&loaded == expected, "trial {trial}: crash at {stage:?} loaded neither the expected state");
    }
}

#[test]
fn stale_journal_tmp_is_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let data = DataDir::new(dir.path());
    let store = fixture_store();
    data.save_store(&store).unwrap();
    fs::write(dir.path().join("commit.journal.tmp"), "datasets.csv\n").unwrap();
    fs::write(dir.path().join("datasets.csv.staged"), "garbage").unwrap();
    let (loaded, _) = data.load_store().unwrap();
    assert_eq!(loaded, store);
    assert!(!dir.path().join("commit.journal.tmp").exists());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn export_is_a_fixed_point(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let store = random_store(&mut rng, 20, 20);
        let once = export_csv(&store);
        let twice = export_csv(&ingest_workbook(&once).unwrap().0);
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn links_stay_symmetric_under_edits(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut store = random_store(&mut rng, 15, 15);
        for _ in 0..10 {
            let dataset_ids: Vec<String> = store.datasets().map(|d| d.id.clone()).collect();
            let publication_ids: Vec<String> = store.publications().map(|p| p.id.clone()).collect();
            match rng.gen_range(0..3) {
                0 if !publication_ids.is_empty() => {
                    let id = publication_ids.choose(&mut rng).unwrap();
                    let mut p = store.publication(id).unwrap().clone();
                    p.dataset_ids = dataset_ids.choose_multiple(&mut rng, 2).cloned().collect();
                    store.upsert_publication(p).unwrap();
                }
                1 if !dataset_ids.is_empty() => {
                    let id = dataset_ids.choose(&mut rng).unwrap();
                    let mut d = store.dataset(id).unwrap().clone();
                    d.publication_ids = publication_ids.choose_multiple(&mut rng, 2).cloned().collect();
                    store.upsert_dataset(d).unwrap();
                }
                _ => {
                    if let Some(id) = dataset_ids.choose(&mut rng) {
                        let _ = store.delete(geox::RecordKind::Dataset, id, true);
                    }
                }
            }
            prop_assert!(store.validate_cross_references().is_ok());
        }
    }
}
