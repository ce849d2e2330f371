//! Prints every summary table for the fixture catalogue.

use geox::ingest::{ingest_workbook, WorkbookSource};
use geox::stats::{compute, StudyAreaBuckets, TableName};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixture");
    let (store, _) = ingest_workbook(&WorkbookSource::read_dir(&dir)?)?;
    let buckets = StudyAreaBuckets::builtin();
    for name in TableName::ALL {
        println!("{}", compute(name, &store, &buckets).render_text());
    }
    Ok(())
}
