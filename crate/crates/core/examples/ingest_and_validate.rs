//! Validates the bundled fixture, then shows what a broken row looks like.
//!
//!     cargo run --example ingest_and_validate [DIR]

use std::path::PathBuf;

use geox::ingest::{ingest_workbook, WorkbookSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/fixture"));
    let source = WorkbookSource::read_dir(&dir)?;
    let (store, report) = ingest_workbook(&source)?;
    print!("{report}");
    println!("{} datasets, {} publications from {}", store.dataset_count(), store.publication_count(), dir.display());

    // Damage one cost cell and a year and look at the report.
    let mut broken = source.clone();
    let text = String::from_utf8(broken.datasets_csv)?.replacen(",paid,", ",gratis,", 1).replacen(",2014,", ",20l4,", 1);
    broken.datasets_csv = text.into_bytes();
    let (store, report) = ingest_workbook(&broken)?;
    println!("\nafter damage: {} datasets kept", store.dataset_count());
    print!("{report}");
    Ok(())
}
