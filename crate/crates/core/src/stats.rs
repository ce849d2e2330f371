//! Summary tables over a catalogue snapshot.
//!
//! Single-counted tables (journal category, theme, cost, first year) have rows
//! that sum to their total. Tables where one record can land in several rows
//! (providers, coverage, study areas, resolutions) report the number of
//! distinct records as their total instead.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{
    CostAccess, CoverageRegion, JournalCategory, ProviderCategory, ProviderRegion, Resolution, StudyTheme,
};
use crate::report::Issue;
use crate::store::Store;
use crate::term::fold;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsRow {
    pub label: String,
    pub count: usize,
}

impl StatsRow {
    fn new(label: impl Into<String>, count: usize) -> Self {
        StatsRow { label: label.into(), count }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsTable {
    pub title: String,
    pub rows: Vec<StatsRow>,
    pub total: usize,
    /// Aggregates reported next to the table (e.g. "before 2018").
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub derived: Vec<StatsRow>,
}

impl StatsTable {
    pub fn count(&self, label: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.label == label).map(|r| r.count)
    }

    pub fn derived(&self, label: &str) -> Option<usize> {
        self.derived.iter().find(|r| r.label == label).map(|r| r.count)
    }

    pub fn row_sum(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }

    /// Aligned plain-text rendering.
    pub fn render_text(&self) -> String {
        let width = self
            .rows
            .iter()
            .chain(&self.derived)
            .map(|r| r.label.chars().count())
            .chain(std::iter::once("Total".len()))
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.title);
        for r in &self.rows {
            let _ = writeln!(out, "  {:<width$}  {:>5}", r.label, r.count);
        }
        let _ = writeln!(out, "  {:<width$}  {:>5}", "Total", self.total);
        for r in &self.derived {
            let _ = writeln!(out, "  {:<width$}  {:>5}", r.label, r.count);
        }
        out
    }
}

/// Every table the catalogue can report, by its CLI/API name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableName {
    JournalCategories,
    StudyAreas,
    Themes,
    Years,
    Providers,
    Coverage,
    Cost,
    FirstYear,
    Resolutions,
}

impl TableName {
    pub const ALL: [TableName; 9] = [
        TableName::JournalCategories,
        TableName::StudyAreas,
        TableName::Themes,
        TableName::Years,
        TableName::Providers,
        TableName::Coverage,
        TableName::Cost,
        TableName::FirstYear,
        TableName::Resolutions,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TableName::JournalCategories => "journal-categories",
            TableName::StudyAreas => "study-areas",
            TableName::Themes => "themes",
            TableName::Years => "years",
            TableName::Providers => "providers",
            TableName::Coverage => "coverage",
            TableName::Cost => "cost",
            TableName::FirstYear => "first-year",
            TableName::Resolutions => "resolutions",
        }
    }

    pub fn names() -> Vec<&'static str> {
        Self::ALL.iter().map(|t| t.name()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown table {name:?}; valid tables: {valid}", name = self.0, valid = TableName::names().join(", "))]
pub struct UnknownTable(pub String);

impl FromStr for TableName {
    type Err = UnknownTable;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TableName::ALL.iter().copied().find(|t| t.name() == s).ok_or_else(|| UnknownTable(s.to_string()))
    }
}

const DEFAULT_BUCKETS: &str = include_str!("../data/study_area_buckets.csv");

/// Maps study-area strings to the coarser groups used in the study-area
/// table. Areas without a mapping form their own group.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StudyAreaBuckets {
    map: HashMap<String, String>,
}

impl StudyAreaBuckets {
    /// Reads `area,bucket` CSV.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, Issue> {
        let mut csv = csv::Reader::from_reader(reader);
        let header = csv.headers().map_err(|e| Issue::new("*", e.to_string()))?;
        if header.iter().map(str::trim).ne(["area", "bucket"]) {
            return Err(Issue::new("*", "header must be area,bucket").at_row(1));
        }
        let mut map = HashMap::new();
        for (i, rec) in csv.records().enumerate() {
            let row = i + 2;
            let rec = rec.map_err(|e| Issue::new("*", e.to_string()).at_row(row))?;
            let (area, bucket) = (rec.get(0).unwrap_or("").trim(), rec.get(1).unwrap_or("").trim());
            if area.is_empty() || bucket.is_empty() {
                return Err(Issue::new("area", "area and bucket must both be set").at_row(row));
            }
            if map.insert(fold(area), bucket.to_string()).is_some() {
                return Err(Issue::new("area", format!("duplicate area {area:?}")).at_row(row));
            }
        }
        Ok(StudyAreaBuckets { map })
    }

    /// The mapping shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_csv(DEFAULT_BUCKETS.as_bytes()).expect("bundled study-area mapping is valid")
    }

    pub fn bucket<'a>(&'a self, area: &'a str) -> &'a str {
        self.map.get(&fold(area)).map(String::as_str).unwrap_or(area)
    }
}

pub fn compute(table: TableName, store: &Store, buckets: &StudyAreaBuckets) -> StatsTable {
    match table {
        TableName::JournalCategories => publications_by_journal_category(store),
        TableName::StudyAreas => publications_by_study_area(store, buckets),
        TableName::Themes => publications_by_theme(store),
        TableName::Years => publications_by_year(store),
        TableName::Providers => datasets_by_provider(store),
        TableName::Coverage => datasets_by_coverage(store),
        TableName::Cost => datasets_by_cost(store),
        TableName::FirstYear => datasets_by_first_year(store),
        TableName::Resolutions => datasets_by_resolution(store),
    }
}

pub fn publications_by_journal_category(store: &Store) -> StatsTable {
    let rows = JournalCategory::ALL
        .iter()
        .map(|c| StatsRow::new(c.label(), store.publications().filter(|p| p.journal_category == *c).count()))
        .collect();
    StatsTable {
        title: "Publications by journal category".into(),
        rows,
        total: store.publication_count(),
        derived: vec![],
    }
}

pub fn publications_by_study_area(store: &Store, buckets: &StudyAreaBuckets) -> StatsTable {
    // bucket key -> (display label, count)
    let mut groups: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for p in store.publications() {
        let mut seen = BTreeSet::new();
        let labels: Vec<&str> = if p.study_areas.is_empty() {
            vec!["Unspecified"]
        } else {
            p.study_areas.iter().map(|a| buckets.bucket(a.as_str())).collect()
        };
        for label in labels {
            if seen.insert(fold(label)) {
                groups.entry(fold(label)).or_insert_with(|| (label.to_string(), 0)).1 += 1;
            }
        }
    }
    let mut rows: Vec<StatsRow> = groups.into_values().map(|(label, count)| StatsRow::new(label, count)).collect();
    rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| fold(&a.label).cmp(&fold(&b.label))));
    StatsTable {
        title: "Publications by study area".into(),
        rows,
        total: store.publication_count(),
        derived: vec![],
    }
}

pub fn publications_by_theme(store: &Store) -> StatsTable {
    let rows = StudyTheme::ALL
        .iter()
        .map(|t| StatsRow::new(t.label(), store.publications().filter(|p| p.study_theme == *t).count()))
        .collect();
    StatsTable { title: "Publications by study theme".into(), rows, total: store.publication_count(), derived: vec![] }
}

pub const YEAR_SPLIT: i32 = 2018;

pub fn publications_by_year(store: &Store) -> StatsTable {
    let mut years: BTreeMap<i32, usize> = BTreeMap::new();
    for p in store.publications() {
        *years.entry(p.year).or_default() += 1;
    }
    let before = store.publications().filter(|p| p.year < YEAR_SPLIT).count();
    StatsTable {
        title: "Publications by year".into(),
        rows: years.into_iter().map(|(y, n)| StatsRow::new(y.to_string(), n)).collect(),
        total: store.publication_count(),
        derived: vec![StatsRow::new(format!("before {YEAR_SPLIT}"), before)],
    }
}

/// Per-provider dataset counts grouped by category then region. A dataset
/// with several providers is listed under each but counted once in the
/// total and in the per-category aggregates.
pub fn datasets_by_provider(store: &Store) -> StatsTable {
    type Key = (ProviderCategory, ProviderRegion, String);
    let mut per_provider: BTreeMap<Key, (String, BTreeSet<&str>)> = BTreeMap::new();
    let mut per_category: BTreeMap<ProviderCategory, BTreeSet<&str>> = BTreeMap::new();
    for d in store.datasets() {
        for p in &d.providers {
            let entry = per_provider
                .entry((p.category, p.region, fold(&p.name)))
                .or_insert_with(|| (p.name.clone(), BTreeSet::new()));
            if p.name < entry.0 {
                entry.0 = p.name.clone();
            }
            entry.1.insert(&d.id);
            per_category.entry(p.category).or_default().insert(&d.id);
        }
    }
    let rows = per_provider
        .into_iter()
        .map(|((cat, region, _), (name, ids))| {
            StatsRow::new(format!("{} / {} / {}", cat.label(), region.label(), name), ids.len())
        })
        .collect();
    let derived = ProviderCategory::ALL
        .iter()
        .map(|c| StatsRow::new(c.label(), per_category.get(c).map_or(0, BTreeSet::len)))
        .collect();
    StatsTable { title: "Datasets by provider".into(), rows, total: store.dataset_count(), derived }
}

/// Datasets per covered area, grouped by coverage region.
pub fn datasets_by_coverage(store: &Store) -> StatsTable {
    let mut groups: BTreeMap<(CoverageRegion, String), (String, usize)> = BTreeMap::new();
    for d in store.datasets() {
        for area in &d.coverage.areas {
            let entry =
                groups.entry((d.coverage.region, area.key())).or_insert_with(|| (area.as_str().to_string(), 0));
            entry.1 += 1;
        }
    }
    let rows = groups
        .into_iter()
        .map(|((region, _), (area, count))| StatsRow::new(format!("{} / {}", region.label(), area), count))
        .collect();
    StatsTable { title: "Datasets by coverage".into(), rows, total: store.dataset_count(), derived: vec![] }
}

pub fn datasets_by_cost(store: &Store) -> StatsTable {
    let rows = CostAccess::ALL
        .iter()
        .map(|c| StatsRow::new(c.label(), store.datasets().filter(|d| d.cost.access == *c).count()))
        .collect();
    StatsTable { title: "Datasets by cost".into(), rows, total: store.dataset_count(), derived: vec![] }
}

pub const FIRST_YEAR_BUCKETS: [&str; 4] = ["before 2000", "2000-2010", "after 2010", "unknown"];

pub fn datasets_by_first_year(store: &Store) -> StatsTable {
    let mut counts = [0usize; 4];
    for d in store.datasets() {
        let slot = match d.first_available_year {
            Some(y) if y < 2000 => 0,
            Some(y) if y <= 2010 => 1,
            Some(_) => 2,
            None => 3,
        };
        counts[slot] += 1;
    }
    let still = store.datasets().filter(|d| d.still_updated_as_of.is_some()).count();
    StatsTable {
        title: "Datasets by first available year".into(),
        rows: FIRST_YEAR_BUCKETS.iter().zip(counts).map(|(l, n)| StatsRow::new(*l, n)).collect(),
        total: store.dataset_count(),
        derived: vec![StatsRow::new("still updated", still)],
    }
}

pub const NOT_AVAILABLE: &str = "N/A";

/// Orders rows as a resolution table reads: lengths coarse to fine, then
/// unspecified, then map scales from large to small.
fn resolution_order(a: &Resolution, b: &Resolution) -> Ordering {
    fn group(r: &Resolution) -> u8 {
        match r {
            Resolution::Length { .. } => 0,
            Resolution::Unspecified => 1,
            Resolution::Scale { .. } => 2,
        }
    }
    match (a, b) {
        (
            Resolution::Length { min_meters: amin, max_meters: amax, band: aband },
            Resolution::Length { min_meters: bmin, max_meters: bmax, band: bband },
        ) => {
            let upper = |m: &Option<f64>| m.unwrap_or(f64::INFINITY);
            bmin.total_cmp(amin)
                .then_with(|| upper(bmax).total_cmp(&upper(amax)))
                .then_with(|| aband.as_deref().map(fold).cmp(&bband.as_deref().map(fold)))
        }
        (Resolution::Scale { denominator: x }, Resolution::Scale { denominator: y }) => x.cmp(y),
        _ => group(a).cmp(&group(b)),
    }
}

/// One row per distinct resolution; a dataset offering several resolutions
/// is counted in each of their rows. Datasets without a recorded resolution
/// count under "N/A".
pub fn datasets_by_resolution(store: &Store) -> StatsTable {
    let mut distinct: Vec<(Resolution, usize)> = Vec::new();
    let mut bump = |r: Resolution| {
        let key = match &r {
            Resolution::Length { min_meters, max_meters, band } => Resolution::Length {
                min_meters: *min_meters,
                max_meters: *max_meters,
                band: band.as_deref().map(|b| b.trim().to_string()),
            },
            other => other.clone(),
        };
        match distinct.iter_mut().find(|(k, _)| resolution_order(k, &key) == Ordering::Equal) {
            Some((_, n)) => *n += 1,
            None => distinct.push((key, 1)),
        }
    };
    for d in store.datasets() {
        if d.resolutions.is_empty() {
            bump(Resolution::Unspecified);
        }
        for r in &d.resolutions {
            bump(r.clone());
        }
    }
    distinct.sort_by(|a, b| resolution_order(&a.0, &b.0));
    let rows = distinct
        .into_iter()
        .map(|(r, n)| match r {
            Resolution::Unspecified => StatsRow::new(NOT_AVAILABLE, n),
            other => StatsRow::new(other.to_string(), n),
        })
        .collect();
    StatsTable { title: "Datasets by resolution".into(), rows, total: store.dataset_count(), derived: vec![] }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_store_tables() {
        let store = Store::new();
        let buckets = StudyAreaBuckets::builtin();
        for name in TableName::ALL {
            let t = compute(name, &store, &buckets);
            assert_eq!(t.total, 0, "{}", name.name());
        }
        let cats = publications_by_journal_category(&store);
        assert_eq!(cats.rows.len(), 4);
        assert!(cats.rows.iter().all(|r| r.count == 0));
        assert_eq!(publications_by_theme(&store).rows.len(), 3);
        assert!(publications_by_year(&store).rows.is_empty());
        assert_eq!(datasets_by_cost(&store).count("Free"), Some(0));
        assert_eq!(datasets_by_cost(&store).count("Paid"), Some(0));
        assert!(datasets_by_first_year(&store).rows.iter().all(|r| r.count == 0));
        assert!(datasets_by_resolution(&store).rows.is_empty());
    }

    #[test]
    fn table_names_parse() {
        for t in TableName::ALL {
            assert_eq!(t.name().parse::<TableName>().unwrap(), t);
        }
        let err = "bogus".parse::<TableName>().unwrap_err();
        assert!(err.to_string().contains("journal-categories"));
    }

    #[test]
    fn buckets_fold_area_names() {
        let b = StudyAreaBuckets::builtin();
        assert_eq!(b.bucket("usa"), "North America/USA");
        assert_eq!(b.bucket("England"), "Europe/UK");
        assert_eq!(b.bucket("Atlantis"), "Atlantis");
        assert!(StudyAreaBuckets::from_csv("area,bucket\nUK,A\nuk,B\n".as_bytes()).is_err());
        assert!(StudyAreaBuckets::from_csv("place,group\n".as_bytes()).is_err());
    }

    #[test]
    fn resolution_rows_ordered_like_the_table() {
        let mut rs = [
            Resolution::Scale { denominator: 250_000 },
            Resolution::point(30.0),
            Resolution::Unspecified,
            Resolution::at_least(10_000.0),
            Resolution::range(0.15, 0.5),
            Resolution::point(1000.0),
            Resolution::Scale { denominator: 10_000 },
        ];
        rs.sort_by(resolution_order);
        let labels: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
        assert_eq!(labels, vec![">10km", "1km", "30m", "0.15\u{2013}0.5m", "na", "1:10,000", "1:250,000"]);
    }

    #[test]
    fn text_rendering_aligns() {
        let t = StatsTable {
            title: "T".into(),
            rows: vec![StatsRow::new("Free", 33), StatsRow::new("Paid", 7)],
            total: 40,
            derived: vec![],
        };
        assert_eq!(t.render_text(), "T\n  Free      33\n  Paid       7\n  Total     40\n");
    }
}
