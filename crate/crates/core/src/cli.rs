//! The `geox` command line.
//!
//! Exit codes: 0 success, 1 validation or usage error, 2 I/O error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::api::{self, dataset_list, dataset_query_from_pairs, publication_list, publication_query_from_pairs};
use crate::api::{Service, ServiceConfig, ServiceError};
use crate::ingest::{ingest_workbook, IngestError, WorkbookSource};
use crate::persist::{DataDir, PersistError};
use crate::search::{search_datasets, search_publications};
use crate::stats::{compute, TableName};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_IO: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "geox", version, about = "Earth-observation dataset catalogue for health research")]
pub struct Cli {
    /// Directory holding datasets.csv, publications.csv and contributions.json.
    #[arg(long, global = true, env = "GEOX_DATA_DIR", default_value = "./data")]
    pub data_dir: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a pair of CSV files and load them into the data directory.
    Ingest {
        #[arg(long)]
        datasets: PathBuf,
        #[arg(long)]
        publications: PathBuf,
    },
    /// Print the validation report for CSV files (default: the data directory).
    Validate {
        #[arg(long, requires = "publications")]
        datasets: Option<PathBuf>,
        #[arg(long, requires = "datasets")]
        publications: Option<PathBuf>,
    },
    /// Write the catalogue as canonical CSV files.
    Export {
        #[arg(long)]
        out: PathBuf,
    },
    /// Print a summary table.
    Stats {
        #[arg(long)]
        table: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Search the catalogue.
    #[command(subcommand)]
    Query(QueryCommand),
    /// Run the HTTP service.
    Serve,
}

#[derive(Debug, Subcommand)]
pub enum QueryCommand {
    Datasets(DatasetArgs),
    Publications(PublicationArgs),
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    #[arg(long)]
    pub health: Vec<String>,
    #[arg(long)]
    pub cost: Option<String>,
    #[arg(long)]
    pub area: Vec<String>,
    #[arg(long)]
    pub provider: Vec<String>,
    #[arg(long)]
    pub provider_category: Vec<String>,
    #[arg(long)]
    pub q: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct PublicationArgs {
    #[arg(long)]
    pub health: Vec<String>,
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INVALID, message: message.into() }
    }

    fn io(message: impl Into<String>) -> Self {
        Failure { code: EXIT_IO, message: message.into() }
    }
}

impl From<IngestError> for Failure {
    fn from(e: IngestError) -> Self {
        match e {
            IngestError::Io { .. } => Failure::io(e.to_string()),
            _ => Failure::invalid(e.to_string()),
        }
    }
}

impl From<PersistError> for Failure {
    fn from(e: PersistError) -> Self {
        match e {
            PersistError::Io { .. } => Failure::io(e.to_string()),
            PersistError::Ingest(inner) => inner.into(),
            PersistError::Invalid(report) => Failure::invalid(report.to_string().trim_end().to_string()),
        }
    }
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::Persist(inner) => inner.into(),
            ServiceError::Config(_) | ServiceError::Reference { .. } => Failure::invalid(e.to_string()),
            ServiceError::Bind { .. } | ServiceError::Io(_) => Failure::io(e.to_string()),
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::io(e.to_string())
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Entry point for the `geox` binary.
pub fn main() -> i32 {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()),
        )
        .with_writer(std::io::stderr)
        .init();
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let data_dir = cli.data_dir;
    match cli.command {
        Command::Ingest { datasets, publications } => {
            let source = WorkbookSource::read(&datasets, &publications)?;
            let (store, report) = ingest_workbook(&source)?;
            write!(err, "{report}").map_err(io_failure)?;
            if !report.is_ok() {
                return Ok(EXIT_INVALID);
            }
            DataDir::new(&data_dir).save_store(&store)?;
            writeln!(out, "{} datasets, {} publications loaded", store.dataset_count(), store.publication_count())
                .map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Validate { datasets, publications } => {
            let source = match (datasets, publications) {
                (Some(d), Some(p)) => WorkbookSource::read(&d, &p)?,
                _ => WorkbookSource::read_dir(&data_dir)?,
            };
            let (store, report) = ingest_workbook(&source)?;
            write!(out, "{report}").map_err(io_failure)?;
            writeln!(
                out,
                "{} errors, {} warnings; {} datasets, {} publications",
                report.errors.len(),
                report.warnings.len(),
                store.dataset_count(),
                store.publication_count()
            )
            .map_err(io_failure)?;
            Ok(if report.is_ok() { EXIT_OK } else { EXIT_INVALID })
        }
        Command::Export { out: target } => {
            let (store, _) = DataDir::new(&data_dir).load_store()?;
            DataDir::new(&target).save_store(&store)?;
            writeln!(
                out,
                "{} datasets, {} publications written to {}",
                store.dataset_count(),
                store.publication_count(),
                target.display()
            )
            .map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Stats { table, format } => {
            let table: TableName = table.parse().map_err(|e: crate::stats::UnknownTable| Failure::invalid(e.to_string()))?;
            let service = Service::open(&data_dir, None)?;
            let body = match format {
                Format::Json => api::stats_body(table, &service.snapshot().store, service.buckets()),
                Format::Text => compute(table, &service.snapshot().store, service.buckets()).render_text(),
            };
            out.write_all(body.as_bytes()).map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Query(QueryCommand::Datasets(args)) => {
            let mut pairs: Vec<(&str, &str)> = Vec::new();
            pairs.extend(args.health.iter().map(|v| ("health", v.as_str())));
            pairs.extend(args.cost.iter().map(|v| ("cost", v.as_str())));
            pairs.extend(args.area.iter().map(|v| ("area", v.as_str())));
            pairs.extend(args.provider.iter().map(|v| ("provider", v.as_str())));
            pairs.extend(args.provider_category.iter().map(|v| ("provider_category", v.as_str())));
            pairs.extend(args.q.iter().map(|v| ("q", v.as_str())));
            let query = dataset_query_from_pairs(pairs).map_err(|issue| Failure::invalid(issue.message))?;
            let service = Service::open(&data_dir, None)?;
            let snap = service.snapshot();
            let body = match args.format {
                Format::Json => dataset_list(&snap.store, &query),
                Format::Text => search_datasets(&snap.store, &query)
                    .into_iter()
                    .map(|d| format!("{}\t{}\n", d.id, d.name))
                    .collect(),
            };
            out.write_all(body.as_bytes()).map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Query(QueryCommand::Publications(args)) => {
            let mut pairs: Vec<(&str, &str)> = Vec::new();
            pairs.extend(args.health.iter().map(|v| ("health", v.as_str())));
            pairs.extend(args.dataset.iter().map(|v| ("dataset", v.as_str())));
            let query = publication_query_from_pairs(pairs);
            let service = Service::open(&data_dir, None)?;
            let snap = service.snapshot();
            let body = match args.format {
                Format::Json => publication_list(&snap.store, &query),
                Format::Text => search_publications(&snap.store, &query)
                    .into_iter()
                    .map(|p| format!("{}\t{}\t{}\n", p.id, p.year, p.title))
                    .collect(),
            };
            out.write_all(body.as_bytes()).map_err(io_failure)?;
            Ok(EXIT_OK)
        }
        Command::Serve => {
            let mut config = ServiceConfig::from_env()?;
            config.data_dir = data_dir;
            let runtime = tokio::runtime::Runtime::new().map_err(io_failure)?;
            runtime.block_on(api::serve(&config))?;
            Ok(EXIT_OK)
        }
    }
}
