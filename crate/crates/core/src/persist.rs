//! File-backed persistence for a data directory.
//!
//! A commit replaces several files at once. New contents are first written to
//! `<name>.staged` files and synced, then a journal listing them is put in
//! place with an atomic rename, then the staged files are renamed over the
//! live ones and the journal is removed. Opening a directory finishes a commit
//! whose journal exists and discards staged files without one, so a crash at
//! any step leaves either the old or the new set of files.

use std::fs::{self, File};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use crate::ingest::{export_csv, ingest_workbook, IngestError, WorkbookSource, DATASETS_FILE, PUBLICATIONS_FILE};
use crate::report::ValidationReport;
use crate::store::Store;

const JOURNAL: &str = "commit.journal";
const STAGED: &str = ".staged";

/// Progress points inside [`DataDir::commit_with`], used to inject faults.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommitStage {
    /// The n-th staged file has been written and synced.
    Staged(usize),
    /// The journal is in place; the commit will now complete on recovery.
    Journaled,
    /// The n-th staged file has been renamed over its live file.
    Renamed(usize),
}

#[derive(Debug, thiserror::Error)]
pub enum PersistError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error("data directory holds invalid records:\n{0}")]
    Invalid(ValidationReport),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> PersistError + '_ {
    move |source| PersistError::Io { path: path.display().to_string(), source }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataDir {
    root: PathBuf,
}

fn sync_dir(dir: &Path) -> io::Result<()> {
    // Directory fsync is not available everywhere; treat it as best effort.
    match File::open(dir).and_then(|f| f.sync_all()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == io::ErrorKind::PermissionDenied => Ok(()),
        Err(_) if cfg!(windows) => Ok(()),
        Err(e) => Err(e),
    }
}

fn write_synced(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let mut f = File::create(path)?;
    f.write_all(bytes)?;
    f.sync_all()
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        DataDir { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    fn staged(&self, name: &str) -> PathBuf {
        self.root.join(format!("{name}{STAGED}"))
    }

    /// Finishes or discards an interrupted commit.
    pub fn recover(&self) -> Result<(), PersistError> {
        if !self.root.exists() {
            return Ok(());
        }
        let journal = self.path(JOURNAL);
        if journal.exists() {
            let listed = fs::read_to_string(&journal).map_err(io_err(&journal))?;
            for name in listed.lines().filter(|l| !l.is_empty()) {
                let staged = self.staged(name);
                if staged.exists() {
                    let live = self.path(name);
                    fs::rename(&staged, &live).map_err(io_err(&live))?;
                }
            }
            sync_dir(&self.root).map_err(io_err(&self.root))?;
            fs::remove_file(&journal).map_err(io_err(&journal))?;
        }
        let entries = fs::read_dir(&self.root).map_err(io_err(&self.root))?;
        for entry in entries {
            let entry = entry.map_err(io_err(&self.root))?;
            let name = entry.file_name().to_string_lossy().into_owned();
            if name.ends_with(STAGED) || name == format!("{JOURNAL}.tmp") {
                fs::remove_file(entry.path()).map_err(io_err(&entry.path()))?;
            }
        }
        Ok(())
    }

    /// Replaces all `files` as one unit.
    pub fn commit(&self, files: &[(&str, &[u8])]) -> Result<(), PersistError> {
        self.commit_with(files, |_| Ok(()))
    }

    /// [`DataDir::commit`] with a hook called after each step. An error from
    /// the hook stops the commit on the spot, as a crash would.
    pub fn commit_with(
        &self,
        files: &[(&str, &[u8])],
        mut hook: impl FnMut(CommitStage) -> io::Result<()>,
    ) -> Result<(), PersistError> {
        fs::create_dir_all(&self.root).map_err(io_err(&self.root))?;
        self.recover()?;
        for (i, (name, bytes)) in files.iter().enumerate() {
            let staged = self.staged(name);
            write_synced(&staged, bytes).map_err(io_err(&staged))?;
            hook(CommitStage::Staged(i)).map_err(io_err(&staged))?;
        }

        let listing: String = files.iter().map(|(name, _)| format!("{name}\n")).collect();
        let tmp = self.path(&format!("{JOURNAL}.tmp"));
        let journal = self.path(JOURNAL);
        write_synced(&tmp, listing.as_bytes()).map_err(io_err(&tmp))?;
        fs::rename(&tmp, &journal).map_err(io_err(&journal))?;
        sync_dir(&self.root).map_err(io_err(&self.root))?;
        hook(CommitStage::Journaled).map_err(io_err(&journal))?;

        for (i, (name, _)) in files.iter().enumerate() {
            let live = self.path(name);
            fs::rename(self.staged(name), &live).map_err(io_err(&live))?;
            hook(CommitStage::Renamed(i)).map_err(io_err(&live))?;
        }
        sync_dir(&self.root).map_err(io_err(&self.root))?;
        fs::remove_file(&journal).map_err(io_err(&journal))?;
        Ok(())
    }

    /// Contents of a live file, `None` when absent. Runs recovery first.
    pub fn read(&self, name: &str) -> Result<Option<Vec<u8>>, PersistError> {
        self.recover()?;
        let path = self.path(name);
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(bytes)),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(io_err(&path)(e)),
        }
    }

    /// Loads the CSV pair. A directory without either file is an empty
    /// catalogue; one that holds invalid records is an error.
    pub fn load_store(&self) -> Result<(Store, ValidationReport), PersistError> {
        if self.root.exists() && !self.root.is_dir() {
            return Err(io_err(&self.root)(io::Error::other("not a directory")));
        }
        let datasets = self.read(DATASETS_FILE)?;
        let publications = self.read(PUBLICATIONS_FILE)?;
        if datasets.is_none() && publications.is_none() {
            return Ok((Store::new(), ValidationReport::default()));
        }
        let empty = export_csv(&Store::new());
        let source = WorkbookSource {
            datasets_csv: datasets.unwrap_or(empty.datasets_csv),
            publications_csv: publications.unwrap_or(empty.publications_csv),
        };
        let (store, report) = ingest_workbook(&source)?;
        if !report.is_ok() {
            return Err(PersistError::Invalid(report));
        }
        Ok((store, report))
    }

    /// Writes the store's canonical CSV pair as one commit.
    pub fn save_store(&self, store: &Store) -> Result<(), PersistError> {
        let out = export_csv(store);
        self.commit(&[(DATASETS_FILE, &out.datasets_csv), (PUBLICATIONS_FILE, &out.publications_csv)])
    }
}
