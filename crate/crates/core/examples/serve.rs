//! Starts the service on a scratch copy of the fixture and queries it once.
//!
//!     cargo run --example serve

use geox::api::{spawn, ServiceConfig};
use geox::ingest::{ingest_workbook, WorkbookSource};
use geox::persist::DataDir;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let scratch = std::env::temp_dir().join(format!("geox-example-{}", std::process::id()));
    let fixture = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("data/fixture");
    let (store, _) = ingest_workbook(&WorkbookSource::read_dir(&fixture)?)?;
    DataDir::new(&scratch).save_store(&store)?;

    let config = ServiceConfig { data_dir: scratch.clone(), port: 0, ..ServiceConfig::default() };
    let running = spawn(&config).await?;
    println!("listening on {}", running.addr);

    let url = running.url("/api/stats/cost");
    let body = tokio::task::spawn_blocking(move || fetch(&url)).await??;
    println!("{body}");

    running.shutdown().await?;
    std::fs::remove_dir_all(&scratch)?;
    Ok(())
}

/// A bare HTTP/1.0 GET, enough for a demo without an HTTP client dependency.
fn fetch(url: &str) -> std::io::Result<String> {
    use std::io::{Read, Write};
    let rest = url.trim_start_matches("http://");
    let (host, path) = rest.split_at(rest.find('/').unwrap_or(rest.len()));
    let mut stream = std::net::TcpStream::connect(host)?;
    write!(stream, "GET {path} HTTP/1.0\r\nHost: {host}\r\n\r\n")?;
    let mut response = String::new();
    stream.read_to_string(&mut response)?;
    Ok(response.split_once("\r\n\r\n").map_or(response.clone(), |(_, b)| b.to_string()))
}
