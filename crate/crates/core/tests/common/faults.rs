//! Simulated crashes during a multi-file commit.

use std::fs;
use std::io;

use geox::ingest::{export_csv, DATASETS_FILE, PUBLICATIONS_FILE};
use geox::persist::{CommitStage, DataDir};
use geox::Store;

/// Every hook point of a two-file commit, in order.
pub fn stages(files: usize) -> Vec<CommitStage> {
    let mut out: Vec<CommitStage> = (0..files).map(CommitStage::Staged).collect();
    out.push(CommitStage::Journaled);
    out.extend((0..files).map(CommitStage::Renamed));
    out
}

/// Crashes a save of `new` over `old` at `stage`, optionally leaving a torn
/// staged file behind, and returns what a fresh process loads.
pub fn crash_and_reload(old: &Store, new: &Store, stage: CommitStage, tear: bool) -> Store {
    let dir = tempfile::tempdir().unwrap();
    let data = DataDir::new(dir.path());
    data.save_store(old).unwrap();

    let out = export_csv(new);
    let files: [(&str, &[u8]); 2] = [(DATASETS_FILE, &out.datasets_csv), (PUBLICATIONS_FILE, &out.publications_csv)];
    let result = data.commit_with(&files, |at| {
        if at != stage {
            return Ok(());
        }
        if let (true, CommitStage::Staged(i)) = (tear, at) {
            let staged = dir.path().join(format!("{}.staged", files[i].0));
            let len = fs::metadata(&staged)?.len();
            fs::OpenOptions::new().write(true).open(&staged)?.set_len(len / 2)?;
        }
        Err(io::Error::other("simulated crash"))
    });
    assert!(result.is_err());

    let (loaded, report) = DataDir::new(dir.path()).load_store().expect("data dir loads after a crash");
    assert!(report.is_ok(), "{report}");
    loaded
}

/// Before the journal is written the old state must survive; after, the new.
pub fn expected_after<'a>(stage: CommitStage, old: &'a Store, new: &'a Store) -> &'a Store {
    if matches!(stage, CommitStage::Staged(_)) {
        old
    } else {
        new
    }
}
