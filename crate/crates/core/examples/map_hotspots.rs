//! Places covered areas on the map and lists areas the gazetteer lacks.

use geox::geo::{hotspots, Gazetteer};
use geox::ingest::{ingest_workbook, WorkbookSource};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixture");
    let (mut store, _) = ingest_workbook(&WorkbookSource::read_dir(&dir)?)?;

    let mut d = store.dataset("nlcd").expect("fixture dataset").clone();
    d.coverage.areas.push("Atlantis".into());
    store.upsert_dataset(d)?;

    let report = hotspots(&store, &Gazetteer::builtin());
    for h in &report.hotspots {
        println!("{:>8.2} {:>8.2}  {:<30} {}", h.latitude, h.longitude, h.area.as_str(), h.dataset_count);
    }
    for w in &report.warnings {
        println!("warning: {}", w.message);
    }
    Ok(())
}
