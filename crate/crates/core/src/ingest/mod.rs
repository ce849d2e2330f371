//! The two-file CSV interchange: `datasets.csv` and `publications.csv`.
//!
//! Multi-valued cells are `;`-separated. Provider cells hold one or more
//! `Name|category|region` entries. Rows are validated one by one; a bad row is
//! reported with its spreadsheet row number and column and skipped, the rest
//! of the file still loads. A wrong header is fatal.

mod resolution;

use std::collections::HashSet;
use std::fs;
use std::io::Read;
use std::path::Path;

pub use resolution::{parse_resolution, ResolutionError};

use crate::model::{
    slugify, CostAccess, CostInfo, CoverageInfo, CoverageRegion, DatasetRecord, JournalCategory, Provider,
    ProviderCategory, ProviderRegion, PublicationRecord, StudyTheme, UnknownToken, UpdateFrequency,
};
use crate::report::{Issue, ValidationReport};
use crate::store::Store;
use crate::term::{canonical_cmp, Term};

pub const DATASETS_FILE: &str = "datasets.csv";
pub const PUBLICATIONS_FILE: &str = "publications.csv";

pub const DATASET_COLUMNS: [&str; 14] = [
    "id",
    "name",
    "providers",
    "first_available_year",
    "update_frequency",
    "still_updated_as_of",
    "cost",
    "cost_notes",
    "coverage_region",
    "covered_areas",
    "resolutions",
    "url",
    "related_publication_ids",
    "health_applications",
];

pub const PUBLICATION_COLUMNS: [&str; 11] = [
    "id",
    "title",
    "year",
    "journal",
    "journal_category",
    "study_theme",
    "study_topics",
    "study_areas",
    "link",
    "dataset_ids",
    "health_applications",
];

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("{file}: header mismatch (missing: [{}], unexpected: [{}]{})",
        .missing.join(", "), .extra.join(", "),
        if *.misordered { ", columns out of order" } else { "" })]
    Header { file: String, missing: Vec<String>, extra: Vec<String>, misordered: bool },
    #[error("{file}: {source}")]
    Csv { file: String, source: csv::Error },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProviderError {
    #[error("provider entry {0:?} must have the form Name|category|region")]
    Arity(String),
    #[error("provider entry {0:?} has an empty name")]
    EmptyName(String),
    #[error(transparent)]
    Unknown(#[from] UnknownToken),
}

/// Parses `Name|category|region`.
pub fn parse_provider(text: &str) -> Result<Provider, ProviderError> {
    let parts: Vec<&str> = text.split('|').map(str::trim).collect();
    let [name, category, region] = parts.as_slice() else {
        return Err(ProviderError::Arity(text.to_string()));
    };
    if name.is_empty() {
        return Err(ProviderError::EmptyName(text.to_string()));
    }
    Ok(Provider {
        name: name.to_string(),
        category: category.parse::<ProviderCategory>()?,
        region: region.parse::<ProviderRegion>()?,
    })
}

/// Raw CSV bytes of both tables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorkbookSource {
    pub datasets_csv: Vec<u8>,
    pub publications_csv: Vec<u8>,
}

impl WorkbookSource {
    pub fn read(datasets: &Path, publications: &Path) -> Result<Self, IngestError> {
        let read = |p: &Path| {
            fs::read(p).map_err(|source| IngestError::Io { path: p.display().to_string(), source })
        };
        Ok(WorkbookSource { datasets_csv: read(datasets)?, publications_csv: read(publications)? })
    }

    /// Reads `datasets.csv` and `publications.csv` from `dir`.
    pub fn read_dir(dir: &Path) -> Result<Self, IngestError> {
        Self::read(&dir.join(DATASETS_FILE), &dir.join(PUBLICATIONS_FILE))
    }

    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(DATASETS_FILE), &self.datasets_csv)?;
        fs::write(dir.join(PUBLICATIONS_FILE), &self.publications_csv)
    }
}

fn split_multi(cell: &str) -> Vec<String> {
    cell.split(';').map(str::trim).filter(|s| !s.is_empty()).map(str::to_string).collect()
}

fn terms(cell: &str) -> Vec<Term> {
    split_multi(cell).into_iter().map(Term::from).collect()
}

fn optional(cell: &str) -> Option<String> {
    let cell = cell.trim();
    (!cell.is_empty()).then(|| cell.to_string())
}

fn parse_year(cell: &str) -> Result<Option<i32>, String> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<i32>() {
        Ok(y) if (1000..=9999).contains(&y) => Ok(Some(y)),
        _ => Err(format!("{cell:?} is not a four-digit year")),
    }
}

/// Blank or unrecognised cells become `Unknown`; the flag reports whether the
/// cell was recognised.
fn parse_update_frequency(cell: &str) -> (UpdateFrequency, bool) {
    let cell = cell.trim();
    if cell.is_empty() {
        return (UpdateFrequency::Unknown, true);
    }
    if let Ok(f) = cell.parse() {
        return (f, true);
    }
    let words = crate::term::fold(cell);
    let f = match words.as_str() {
        "yearly" | "annually" | "every year" => UpdateFrequency::Annual,
        "every ten days" | "10 days" | "every 10 days" => UpdateFrequency::Every10Days,
        "every 5-10 years" | "every 5 to 10 years" | "every five to ten years" => UpdateFrequency::Every5To10Years,
        "not updated" | "none" | "static" => UpdateFrequency::NotUpdated,
        _ => return (UpdateFrequency::Unknown, false),
    };
    (f, true)
}

/// Accumulates the problems of one row.
struct RowCheck<'a> {
    row: usize,
    issues: &'a mut Vec<Issue>,
}

impl RowCheck<'_> {
    fn err(&mut self, column: &str, message: impl Into<String>) {
        self.issues.push(Issue::new(column, message).at_row(self.row));
    }

    fn token<T: std::str::FromStr<Err = UnknownToken>>(&mut self, column: &str, cell: &str) -> Option<T> {
        match cell.parse::<T>() {
            Ok(v) => Some(v),
            Err(e) => {
                self.err(column, e.to_string());
                None
            }
        }
    }

    fn year(&mut self, column: &str, cell: &str) -> Option<i32> {
        match parse_year(cell) {
            Ok(y) => y,
            Err(msg) => {
                self.err(column, msg);
                None
            }
        }
    }
}

fn check_header(file: &str, found: &csv::StringRecord, expected: &[&str]) -> Result<(), IngestError> {
    let found: Vec<String> = found
        .iter()
        .enumerate()
        .map(|(i, h)| if i == 0 { h.trim_start_matches('\u{feff}').trim() } else { h.trim() }.to_string())
        .collect();
    if found.iter().map(String::as_str).eq(expected.iter().copied()) {
        return Ok(());
    }
    let missing: Vec<String> =
        expected.iter().filter(|e| !found.iter().any(|f| f == *e)).map(|s| s.to_string()).collect();
    let extra: Vec<String> = found.iter().filter(|f| !expected.contains(&f.as_str())).cloned().collect();
    let misordered = missing.is_empty() && extra.is_empty();
    Err(IngestError::Header { file: file.to_string(), missing, extra, misordered })
}

/// Reads every data row as cells, reporting rows with the wrong cell count.
fn read_rows<R: Read>(
    file: &str,
    reader: R,
    expected: &[&str],
    report: &mut ValidationReport,
) -> Result<Vec<(usize, Vec<String>)>, IngestError> {
    let mut csv = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(reader);
    let header = csv.headers().map_err(|source| IngestError::Csv { file: file.to_string(), source })?.clone();
    check_header(file, &header, expected)?;
    let mut rows = Vec::new();
    for (i, result) in csv.records().enumerate() {
        let row = i + 2;
        match result {
            Ok(record) if record.iter().all(|c| c.trim().is_empty()) => {}
            Ok(record) if record.len() == expected.len() => {
                rows.push((row, record.iter().map(str::to_string).collect()));
            }
            Ok(record) => report.error(
                Issue::new("*", format!("expected {} cells, found {}", expected.len(), record.len())).at_row(row),
            ),
            Err(e) => report.error(Issue::new("*", e.to_string()).at_row(row)),
        }
    }
    Ok(rows)
}

/// Assigns ids: explicit ids are kept (later duplicates rejected), blank ids
/// are derived from `name` with `-2`, `-3`, ... suffixes on collision.
fn assign_ids<T>(
    rows: Vec<(usize, Option<String>, String, T)>,
    report: &mut ValidationReport,
) -> Vec<(usize, String, T)> {
    let mut taken: HashSet<String> = HashSet::new();
    let mut explicit_rows = Vec::new();
    let mut generated_rows = Vec::new();
    for (row, id, name, item) in rows {
        match id {
            Some(id) => {
                if taken.insert(id.clone()) {
                    explicit_rows.push((row, id, item));
                } else {
                    report.error(Issue::new("id", format!("duplicate id {id:?}")).at_row(row));
                }
            }
            None => generated_rows.push((row, name, item)),
        }
    }
    let mut out = explicit_rows;
    for (row, name, item) in generated_rows {
        let base = slugify(&name);
        let id = if taken.contains(&base) {
            (2..).map(|n| format!("{base}-{n}")).find(|c| !taken.contains(c)).expect("unbounded")
        } else {
            base
        };
        taken.insert(id.clone());
        out.push((row, id, item));
    }
    out.sort_by_key(|(row, _, _)| *row);
    out
}

/// Reports a rejected row: its cell errors plus record-level problems in
/// columns that have no cell error yet.
fn report_remaining(
    row: usize,
    cell_issues: Vec<Issue>,
    problems: Vec<crate::model::FieldProblem>,
    report: &mut ValidationReport,
) {
    let reported: HashSet<String> = cell_issues.iter().map(|i| i.field.clone()).collect();
    report.errors.extend(cell_issues);
    for p in problems.into_iter().filter(|p| !reported.contains(p.field)) {
        report.error(Issue::new(p.field, p.message).at_row(row));
    }
}

fn problems_to_issues(row: usize, problems: Vec<crate::model::FieldProblem>, report: &mut ValidationReport) -> bool {
    let ok = problems.is_empty();
    for p in problems {
        report.error(Issue::new(p.field, p.message).at_row(row));
    }
    ok
}

/// Parses `datasets.csv`. Valid rows load; every invalid row yields errors
/// naming its row and column.
pub fn parse_datasets_csv<R: Read>(reader: R) -> Result<(Vec<DatasetRecord>, ValidationReport), IngestError> {
    let mut report = ValidationReport::default();
    let rows = read_rows(DATASETS_FILE, reader, &DATASET_COLUMNS, &mut report)?;
    let mut parsed = Vec::new();
    for (row, cells) in rows {
        let mut issues = Vec::new();
        let mut check = RowCheck { row, issues: &mut issues };
        let c = |i: usize| cells[i].trim();

        let mut providers = Vec::new();
        for entry in split_multi(c(2)) {
            match parse_provider(&entry) {
                Ok(p) => providers.push(p),
                Err(e) => check.err("providers", e.to_string()),
            }
        }
        let first_available_year = check.year("first_available_year", c(3));
        let (update_frequency, known) = parse_update_frequency(c(4));
        let still_updated_as_of = check.year("still_updated_as_of", c(5));
        let access = check.token::<CostAccess>("cost", c(6));
        let region = check.token::<CoverageRegion>("coverage_region", c(8));
        let mut resolutions = Vec::new();
        for entry in split_multi(c(10)) {
            match parse_resolution(&entry) {
                Ok(r) => resolutions.push(r),
                Err(e) => check.err("resolutions", e.to_string()),
            }
        }

        if !known {
            report.warn(
                Issue::new("update_frequency", format!("unrecognised value {:?} recorded as unknown", c(4)))
                    .at_row(row),
            );
        }
        // Placeholders stand in for unparseable cells so that the record-level
        // checks below can still report problems in the other columns.
        let record = DatasetRecord {
            id: String::new(),
            name: c(1).to_string(),
            providers,
            first_available_year,
            update_frequency,
            still_updated_as_of,
            cost: CostInfo { access: access.unwrap_or(CostAccess::Free), notes: optional(c(7)) },
            coverage: CoverageInfo { region: region.unwrap_or(CoverageRegion::Europe), areas: terms(c(9)) },
            resolutions,
            url: c(11).to_string(),
            health_applications: terms(c(13)),
            publication_ids: split_multi(c(12)),
        };
        if issues.is_empty() {
            parsed.push((row, optional(c(0)), record.name.clone(), record));
        } else {
            let mut record = record;
            record.id = optional(c(0)).unwrap_or_else(|| slugify(c(1)));
            record.canonicalize();
            report_remaining(row, issues, record.problems(), &mut report);
        }
    }

    let mut records = Vec::new();
    for (row, id, mut record) in assign_ids(parsed, &mut report) {
        record.id = id;
        record.canonicalize();
        if problems_to_issues(row, record.problems(), &mut report) {
            records.push(record);
        }
    }
    Ok((records, report.in_file(DATASETS_FILE)))
}

/// Parses `publications.csv`; see [`parse_datasets_csv`].
pub fn parse_publications_csv<R: Read>(
    reader: R,
) -> Result<(Vec<PublicationRecord>, ValidationReport), IngestError> {
    let mut report = ValidationReport::default();
    let rows = read_rows(PUBLICATIONS_FILE, reader, &PUBLICATION_COLUMNS, &mut report)?;
    let mut parsed = Vec::new();
    for (row, cells) in rows {
        let mut issues = Vec::new();
        let mut check = RowCheck { row, issues: &mut issues };
        let c = |i: usize| cells[i].trim();

        let year = match check.year("year", c(2)) {
            Some(y) => Some(y),
            None => {
                if c(2).is_empty() {
                    check.err("year", "year is required");
                }
                None
            }
        };
        let journal_category = check.token::<JournalCategory>("journal_category", c(4));
        let study_theme = check.token::<StudyTheme>("study_theme", c(5));
        let record = PublicationRecord {
            id: String::new(),
            title: c(1).to_string(),
            year: year.unwrap_or_default(),
            journal: c(3).to_string(),
            journal_category: journal_category.unwrap_or(JournalCategory::Science),
            study_theme: study_theme.unwrap_or(StudyTheme::Environment),
            study_topics: terms(c(6)),
            study_areas: terms(c(7)),
            link: c(8).to_string(),
            dataset_ids: split_multi(c(9)),
            health_applications: terms(c(10)),
        };
        if issues.is_empty() {
            parsed.push((row, optional(c(0)), record.title.clone(), record));
        } else {
            let mut record = record;
            record.id = optional(c(0)).unwrap_or_else(|| slugify(c(1)));
            record.canonicalize();
            report_remaining(row, issues, record.problems(), &mut report);
        }
    }

    let mut records = Vec::new();
    for (row, id, mut record) in assign_ids(parsed, &mut report) {
        record.id = id;
        record.canonicalize();
        if problems_to_issues(row, record.problems(), &mut report) {
            records.push(record);
        }
    }
    Ok((records, report.in_file(PUBLICATIONS_FILE)))
}

/// Loads both tables into a store. Links to unknown ids are dropped with an
/// error; one-sided links are completed with a warning. The resulting store
/// always passes [`Store::validate_cross_references`].
pub fn ingest_workbook(source: &WorkbookSource) -> Result<(Store, ValidationReport), IngestError> {
    let (datasets, mut report) = parse_datasets_csv(source.datasets_csv.as_slice())?;
    let (publications, pub_report) = parse_publications_csv(source.publications_csv.as_slice())?;
    report.merge(pub_report);

    let mut store = Store::new();
    for d in datasets {
        store.insert_dataset_raw(d);
    }
    for p in publications {
        store.insert_publication_raw(p);
    }
    for issue in store.drop_dangling() {
        let file = if issue.field == "dataset_ids" { PUBLICATIONS_FILE } else { DATASETS_FILE };
        report.error(Issue { file: Some(file.to_string()), ..issue });
    }
    for issue in store.symmetrize_links() {
        let file = if issue.field == "dataset_ids" { PUBLICATIONS_FILE } else { DATASETS_FILE };
        report.warn(Issue { file: Some(file.to_string()), ..issue });
    }
    for issue in store.validate_cross_references().warnings {
        report.warn(Issue { file: Some(PUBLICATIONS_FILE.to_string()), ..issue });
    }
    debug_assert!(store.validate_cross_references().is_ok());
    Ok((store, report))
}

fn join_sorted<I, S>(items: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut v: Vec<String> = items.into_iter().map(|s| s.as_ref().to_string()).collect();
    v.sort_by(|a, b| canonical_cmp(a, b));
    v.join(";")
}

fn year_cell(y: Option<i32>) -> String {
    y.map(|y| y.to_string()).unwrap_or_default()
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(Vec::new())
}

/// Canonical export: rows by id, multi-valued cells sorted case-insensitively.
/// The output is deterministic and re-ingests to an equal store.
pub fn export_csv(store: &Store) -> WorkbookSource {
    let mut w = csv_writer();
    w.write_record(DATASET_COLUMNS).expect("in-memory write");
    for d in store.datasets() {
        w.write_record([
            d.id.clone(),
            d.name.clone(),
            join_sorted(d.providers.iter().map(|p| p.to_string())),
            year_cell(d.first_available_year),
            d.update_frequency.token().to_string(),
            year_cell(d.still_updated_as_of),
            d.cost.access.token().to_string(),
            d.cost.notes.clone().unwrap_or_default(),
            d.coverage.region.token().to_string(),
            join_sorted(&d.coverage.areas),
            join_sorted(d.resolutions.iter().map(|r| r.to_string())),
            d.url.clone(),
            join_sorted(&d.publication_ids),
            join_sorted(&d.health_applications),
        ])
        .expect("in-memory write");
    }
    let datasets_csv = w.into_inner().expect("in-memory flush");

    let mut w = csv_writer();
    w.write_record(PUBLICATION_COLUMNS).expect("in-memory write");
    for p in store.publications() {
        w.write_record([
            p.id.clone(),
            p.title.clone(),
            p.year.to_string(),
            p.journal.clone(),
            p.journal_category.token().to_string(),
            p.study_theme.token().to_string(),
            join_sorted(&p.study_topics),
            join_sorted(&p.study_areas),
            p.link.clone(),
            join_sorted(&p.dataset_ids),
            join_sorted(&p.health_applications),
        ])
        .expect("in-memory write");
    }
    let publications_csv = w.into_inner().expect("in-memory flush");
    WorkbookSource { datasets_csv, publications_csv }
}
