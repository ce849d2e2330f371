//! Free-text search tolerates misspellings but not synonyms.
//!
//!     cargo run --example phonetic_search -- "hemoragic fever"

use geox::ingest::{ingest_workbook, WorkbookSource};
use geox::search::{search_datasets, soundex, DatasetQuery};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixture");
    let (store, _) = ingest_workbook(&WorkbookSource::read_dir(&dir)?)?;

    let mut queries: Vec<String> = std::env::args().skip(1).collect();
    if queries.is_empty() {
        queries = ["haemorrhagic fever", "hemorrhagic fever", "hemoragic fever", "COVID-19", "coronavirus disease"]
            .map(String::from)
            .to_vec();
    }
    for text in &queries {
        let codes: Vec<String> = text
            .split_whitespace()
            .map(|w| soundex(w).map(|c| c.as_str().to_string()).unwrap_or_else(|_| "-".into()))
            .collect();
        let q = DatasetQuery { free_text: Some(text.clone()), ..Default::default() };
        let hits: Vec<&str> = search_datasets(&store, &q).into_iter().map(|d| d.name.as_str()).collect();
        println!("{text:?} [{}] -> {hits:?}", codes.join(" "));
    }
    Ok(())
}
