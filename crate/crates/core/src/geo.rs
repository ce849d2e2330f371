//! Map hotspots: covered areas placed on a world map with dataset counts.

use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::report::Issue;
use crate::search::{search_datasets, DatasetQuery};
use crate::store::Store;
use crate::term::{fold, Term};

const BUILTIN: &str = include_str!("../data/gazetteer.csv");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GazetteerEntry {
    pub area: Term,
    pub latitude: f64,
    pub longitude: f64,
    /// Two-letter country code or an icon name such as `globe` or `ocean`.
    pub flag: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Gazetteer {
    entries: Vec<GazetteerEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    pub area: Term,
    pub latitude: f64,
    pub longitude: f64,
    pub flag: Option<String>,
    pub dataset_count: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HotspotReport {
    pub hotspots: Vec<Hotspot>,
    /// Covered areas that have no gazetteer entry.
    pub warnings: Vec<Issue>,
}

impl Gazetteer {
    /// Reads `area,latitude,longitude,flag` CSV. Every problem is reported,
    /// not just the first.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self, Vec<Issue>> {
        let mut csv = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
        let header = csv.headers().map_err(|e| vec![Issue::new("*", e.to_string())])?;
        if header.iter().map(str::trim).ne(["area", "latitude", "longitude", "flag"]) {
            return Err(vec![Issue::new("*", "header must be area,latitude,longitude,flag").at_row(1)]);
        }
        let mut issues = Vec::new();
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, rec) in csv.records().enumerate() {
            let row = i + 2;
            let rec = match rec {
                Ok(r) if r.len() == 4 => r,
                Ok(r) => {
                    issues.push(Issue::new("*", format!("expected 4 cells, found {}", r.len())).at_row(row));
                    continue;
                }
                Err(e) => {
                    issues.push(Issue::new("*", e.to_string()).at_row(row));
                    continue;
                }
            };
            let area = rec[0].trim();
            let coord = |col: usize, name: &str, bound: f64, issues: &mut Vec<Issue>| -> Option<f64> {
                match rec[col].trim().parse::<f64>() {
                    Ok(v) if v.is_finite() && v.abs() <= bound => Some(v),
                    Ok(v) => {
                        issues.push(Issue::new(name, format!("{v} is outside [-{bound}, {bound}]")).at_row(row));
                        None
                    }
                    Err(_) => {
                        issues.push(Issue::new(name, format!("{:?} is not a number", &rec[col])).at_row(row));
                        None
                    }
                }
            };
            let lat = coord(1, "latitude", 90.0, &mut issues);
            let lon = coord(2, "longitude", 180.0, &mut issues);
            if area.is_empty() {
                issues.push(Issue::new("area", "area must not be empty").at_row(row));
                continue;
            }
            if !seen.insert(fold(area)) {
                issues.push(Issue::new("area", format!("duplicate area {area:?}")).at_row(row));
                continue;
            }
            if let (Some(latitude), Some(longitude)) = (lat, lon) {
                let flag = Some(rec[3].trim().to_string()).filter(|f| !f.is_empty());
                entries.push(GazetteerEntry { area: Term::from(area), latitude, longitude, flag });
            }
        }
        if issues.is_empty() {
            Ok(Gazetteer { entries })
        } else {
            Err(issues)
        }
    }

    /// The gazetteer shipped with the crate. "Global" sits at (0, 0).
    pub fn builtin() -> Self {
        Self::from_csv(BUILTIN.as_bytes()).expect("bundled gazetteer is valid")
    }

    pub fn entries(&self) -> &[GazetteerEntry] {
        &self.entries
    }

    pub fn lookup(&self, area: &str) -> Option<&GazetteerEntry> {
        self.entries.iter().find(|e| e.area.matches(area))
    }
}

/// One hotspot per gazetteer area covered by at least one dataset, in
/// gazetteer order. Each count equals an area-facet search for that area.
pub fn hotspots(store: &Store, gazetteer: &Gazetteer) -> HotspotReport {
    let mut report = HotspotReport::default();
    for entry in gazetteer.entries() {
        let query = DatasetQuery { areas: vec![entry.area.as_str().to_string()], ..Default::default() };
        let count = search_datasets(store, &query).len();
        if count > 0 {
            report.hotspots.push(Hotspot {
                area: entry.area.clone(),
                latitude: entry.latitude,
                longitude: entry.longitude,
                flag: entry.flag.clone(),
                dataset_count: count,
            });
        }
    }
    let mut unmapped = HashSet::new();
    for d in store.datasets() {
        for area in &d.coverage.areas {
            if gazetteer.lookup(area.as_str()).is_none() && unmapped.insert(area.key()) {
                report.warnings.push(
                    Issue::new("covered_areas", format!("area {:?} has no gazetteer entry", area.as_str()))
                        .for_record(&d.id),
                );
            }
        }
    }
    report
}
