//! Catalogue record types.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::term::{canonical_cmp, canonicalize_terms, Term};

/// Rejected enum token, carrying the accepted spellings for error messages.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown {what} {found:?}; accepted values: {}", accepted.join(", "))]
pub struct UnknownToken {
    pub what: &'static str,
    pub found: String,
    pub accepted: Vec<&'static str>,
}

macro_rules! token_enum {
    (
        $(#[$meta:meta])*
        $name:ident, $what:literal {
            $($variant:ident => $token:literal, $label:literal;)+
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $token)] $variant,)+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant,)+];

            /// Interchange token (CSV cells, JSON, query parameters).
            pub fn token(self) -> &'static str {
                match self {
                    $($name::$variant => $token,)+
                }
            }

            /// Row label used in summary tables.
            pub fn label(self) -> &'static str {
                match self {
                    $($name::$variant => $label,)+
                }
            }

            pub fn accepted() -> Vec<&'static str> {
                vec![$($token,)+]
            }
        }

        impl FromStr for $name {
            type Err = UnknownToken;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let wanted = s.trim().to_ascii_lowercase().replace([' ', '-'], "_");
                $(
                    if wanted == $token {
                        return Ok($name::$variant);
                    }
                )+
                Err(UnknownToken { what: $what, found: s.to_string(), accepted: $name::accepted() })
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.token())
            }
        }
    };
}

token_enum! {
    /// Who runs the data source.
    ProviderCategory, "provider category" {
        GovernmentAgency => "government", "GovernmentAgency";
        CommercialCompany => "commercial", "CommercialCompany";
        AcademicInstitute => "academic", "AcademicInstitute";
    }
}

token_enum! {
    ProviderRegion, "provider region" {
        Asia => "asia", "Asia";
        Europe => "europe", "Europe";
        America => "america", "America";
        Africa => "africa", "Africa";
        Other => "other", "Other";
    }
}

token_enum! {
    CostAccess, "cost" {
        Free => "free", "Free";
        Paid => "paid", "Paid";
    }
}

token_enum! {
    /// Dataset coverage region, in summary-table order.
    CoverageRegion, "coverage region" {
        Global => "global", "Global";
        Americas => "americas", "Americas";
        Asia => "asia", "Asia";
        Africa => "africa", "Africa";
        Europe => "europe", "Europe";
    }
}

token_enum! {
    UpdateFrequency, "update frequency" {
        Daily => "daily", "Daily";
        Every10Days => "every_10_days", "Every10Days";
        Monthly => "monthly", "Monthly";
        Quarterly => "quarterly", "Quarterly";
        Annual => "annual", "Annual";
        Every5To10Years => "every_5_to_10_years", "Every5To10Years";
        Irregular => "irregular", "Irregular";
        NotUpdated => "not_updated", "NotUpdated";
        Unknown => "unknown", "Unknown";
    }
}

token_enum! {
    JournalCategory, "journal category" {
        Geography => "geography", "Geography";
        PublicHealth => "public_health", "PublicHealth";
        Environment => "environment", "Environment";
        Science => "science", "Science";
    }
}

token_enum! {
    StudyTheme, "study theme" {
        HumanActivity => "human_activity", "HumanActivity";
        PublicHealth => "public_health", "PublicHealth";
        Environment => "environment", "Environment";
    }
}

// The enum is generated by a macro, so `#[default]` is not available.
#[allow(clippy::derivable_impls)]
impl Default for UpdateFrequency {
    fn default() -> Self {
        UpdateFrequency::Unknown
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provider {
    pub name: String,
    pub category: ProviderCategory,
    pub region: ProviderRegion,
}

impl Provider {
    pub fn new(name: impl Into<String>, category: ProviderCategory, region: ProviderRegion) -> Self {
        Provider { name: name.into(), category, region }
    }
}

impl fmt::Display for Provider {
    /// `Name|category|region`, the cell sub-format used by the CSV interchange.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}|{}", self.name, self.category, self.region)
    }
}

/// Spatial resolution of a dataset product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Resolution {
    /// Ground length per pixel in meters. `max_meters == None` means open-ended
    /// (">10km"); a point value has `max_meters == Some(min_meters)`.
    Length {
        min_meters: f64,
        max_meters: Option<f64>,
        #[serde(default)]
        band: Option<String>,
    },
    /// Map scale `1:denominator`.
    Scale { denominator: u64 },
    Unspecified,
}

impl Resolution {
    pub fn point(meters: f64) -> Self {
        Resolution::Length { min_meters: meters, max_meters: Some(meters), band: None }
    }

    pub fn range(min: f64, max: f64) -> Self {
        Resolution::Length { min_meters: min, max_meters: Some(max), band: None }
    }

    pub fn at_least(min: f64) -> Self {
        Resolution::Length { min_meters: min, max_meters: None, band: None }
    }

    pub fn with_band(self, label: impl Into<String>) -> Self {
        match self {
            Resolution::Length { min_meters, max_meters, .. } => {
                Resolution::Length { min_meters, max_meters, band: Some(label.into()) }
            }
            other => other,
        }
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        match self {
            Resolution::Length { min_meters, max_meters, band } => {
                if !(min_meters.is_finite() && *min_meters > 0.0) {
                    return Err(format!("length resolution must be positive, got {min_meters}"));
                }
                if let Some(max) = max_meters {
                    if !(max.is_finite() && max >= min_meters) {
                        return Err(format!("range upper bound {max} is below lower bound {min_meters}"));
                    }
                }
                if let Some(b) = band {
                    if b.trim().is_empty() || b.contains(';') {
                        return Err(format!("invalid band label {b:?}"));
                    }
                }
                Ok(())
            }
            Resolution::Scale { denominator } if *denominator == 0 => {
                Err("scale denominator must be positive".to_string())
            }
            _ => Ok(()),
        }
    }
}

/// Renders a length in meters, switching to km when that is exact.
pub(crate) fn format_meters(meters: f64) -> String {
    let km = meters / 1000.0;
    if meters >= 1000.0 && km * 1000.0 == meters {
        format!("{km}km")
    } else {
        format!("{meters}m")
    }
}

fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Resolution::Length { min_meters, max_meters, band } => {
                match max_meters {
                    None => write!(f, ">{}", format_meters(*min_meters))?,
                    Some(max) if max == min_meters => write!(f, "{}", format_meters(*min_meters))?,
                    Some(max) => {
                        let upper = format_meters(*max);
                        // Share the unit of the upper bound, as in "0.15–0.5m".
                        let lower = if upper.ends_with("km") {
                            format!("{}", min_meters / 1000.0)
                        } else {
                            format!("{min_meters}")
                        };
                        let lower_ok = if upper.ends_with("km") {
                            (min_meters / 1000.0) * 1000.0 == *min_meters
                        } else {
                            true
                        };
                        if lower_ok {
                            write!(f, "{lower}\u{2013}{upper}")?
                        } else {
                            write!(f, "{}\u{2013}{}", format_meters(*min_meters), upper)?
                        }
                    }
                }
                if let Some(b) = band {
                    write!(f, "/{b}")?;
                }
                Ok(())
            }
            Resolution::Scale { denominator } => write!(f, "1:{}", group_thousands(*denominator)),
            Resolution::Unspecified => f.write_str("na"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CostInfo {
    pub access: CostAccess,
    #[serde(default)]
    pub notes: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageInfo {
    pub region: CoverageRegion,
    pub areas: Vec<Term>,
}

pub const GLOBAL_AREAS: [&str; 2] = ["Global", "Global Coastal Zone (Ocean)"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRecord {
    #[serde(default)]
    pub id: String,
    pub name: String,
    pub providers: Vec<Provider>,
    #[serde(default)]
    pub first_available_year: Option<i32>,
    #[serde(default)]
    pub update_frequency: UpdateFrequency,
    #[serde(default)]
    pub still_updated_as_of: Option<i32>,
    pub cost: CostInfo,
    pub coverage: CoverageInfo,
    #[serde(default)]
    pub resolutions: Vec<Resolution>,
    #[serde(default)]
    pub url: String,
    #[serde(default)]
    pub health_applications: Vec<Term>,
    #[serde(default)]
    pub publication_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    #[serde(default)]
    pub id: String,
    pub title: String,
    pub year: i32,
    #[serde(default)]
    pub journal: String,
    pub journal_category: JournalCategory,
    pub study_theme: StudyTheme,
    #[serde(default)]
    pub study_topics: Vec<Term>,
    #[serde(default)]
    pub study_areas: Vec<Term>,
    #[serde(default)]
    pub link: String,
    #[serde(default)]
    pub dataset_ids: Vec<String>,
    #[serde(default)]
    pub health_applications: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Dataset,
    Publication,
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RecordKind::Dataset => "dataset",
            RecordKind::Publication => "publication",
        })
    }
}

/// One field-level problem found while checking a record.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldProblem {
    pub field: &'static str,
    pub message: String,
}

impl FieldProblem {
    fn new(field: &'static str, message: impl Into<String>) -> Self {
        FieldProblem { field, message: message.into() }
    }
}

/// Whether `id` is a well-formed record slug.
pub fn is_valid_id(id: &str) -> bool {
    let mut chars = id.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '-')
}

/// Lowercase slug from a display name: non-alphanumeric runs become a single
/// `-`, leading and trailing dashes are trimmed.
pub fn slugify(name: &str) -> String {
    let folded = crate::term::fold(name);
    let mut slug = String::with_capacity(folded.len());
    let mut pending_dash = false;
    for c in folded.chars() {
        if c.is_ascii_alphanumeric() {
            if pending_dash && !slug.is_empty() {
                slug.push('-');
            }
            pending_dash = false;
            slug.push(c);
        } else {
            pending_dash = true;
        }
    }
    if slug.is_empty() {
        slug.push_str("record");
    }
    slug
}

fn check_term_list(field: &'static str, terms: &[Term], out: &mut Vec<FieldProblem>) {
    for t in terms {
        if t.as_str().contains(';') {
            out.push(FieldProblem::new(field, format!("term {:?} must not contain ';'", t.as_str())));
        }
    }
}

fn check_id_list(field: &'static str, ids: &[String], out: &mut Vec<FieldProblem>) {
    for id in ids {
        if !is_valid_id(id) {
            out.push(FieldProblem::new(field, format!("malformed id {id:?}")));
        }
    }
}

impl DatasetRecord {
    /// Field invariants that do not depend on other records.
    pub fn problems(&self) -> Vec<FieldProblem> {
        let mut out = Vec::new();
        if !is_valid_id(&self.id) {
            out.push(FieldProblem::new("id", format!("malformed id {:?}", self.id)));
        }
        if self.name.trim().is_empty() {
            out.push(FieldProblem::new("name", "name must not be empty"));
        }
        if self.providers.is_empty() {
            out.push(FieldProblem::new("providers", "at least one provider is required"));
        }
        for p in &self.providers {
            if p.name.trim().is_empty() || p.name.contains(['|', ';']) {
                out.push(FieldProblem::new("providers", format!("invalid provider name {:?}", p.name)));
            }
        }
        if let (Some(first), Some(still)) = (self.first_available_year, self.still_updated_as_of) {
            if still < first {
                out.push(FieldProblem::new(
                    "still_updated_as_of",
                    format!("{still} is earlier than first available year {first}"),
                ));
            }
        }
        if self.coverage.areas.is_empty() {
            out.push(FieldProblem::new("covered_areas", "at least one covered area is required"));
        }
        if self.coverage.region == CoverageRegion::Global
            && !self.coverage.areas.iter().any(|a| GLOBAL_AREAS.iter().any(|g| a.matches(g)))
        {
            out.push(FieldProblem::new(
                "covered_areas",
                "global coverage must list \"Global\" or \"Global Coastal Zone (Ocean)\"",
            ));
        }
        check_term_list("covered_areas", &self.coverage.areas, &mut out);
        for r in &self.resolutions {
            if let Err(msg) = r.check() {
                out.push(FieldProblem::new("resolutions", msg));
            }
        }
        check_term_list("health_applications", &self.health_applications, &mut out);
        check_id_list("related_publication_ids", &self.publication_ids, &mut out);
        out
    }

    /// Puts every list field into canonical order so that structurally equal
    /// catalogues compare equal regardless of input order.
    pub fn canonicalize(&mut self) {
        self.name = self.name.trim().to_string();
        self.providers.sort_by(|a, b| canonical_cmp(&a.to_string(), &b.to_string()));
        self.providers.dedup();
        canonicalize_terms(&mut self.coverage.areas);
        canonicalize_terms(&mut self.health_applications);
        self.resolutions.sort_by(|a, b| canonical_cmp(&a.to_string(), &b.to_string()));
        self.resolutions.dedup();
        self.publication_ids.sort();
        self.publication_ids.dedup();
        self.cost.notes = self.cost.notes.take().map(|n| n.trim().to_string()).filter(|n| !n.is_empty());
    }
}

impl PublicationRecord {
    pub fn problems(&self) -> Vec<FieldProblem> {
        let mut out = Vec::new();
        if !is_valid_id(&self.id) {
            out.push(FieldProblem::new("id", format!("malformed id {:?}", self.id)));
        }
        if self.title.trim().is_empty() {
            out.push(FieldProblem::new("title", "title must not be empty"));
        }
        check_term_list("study_topics", &self.study_topics, &mut out);
        check_term_list("study_areas", &self.study_areas, &mut out);
        check_term_list("health_applications", &self.health_applications, &mut out);
        check_id_list("dataset_ids", &self.dataset_ids, &mut out);
        out
    }

    pub fn canonicalize(&mut self) {
        self.title = self.title.trim().to_string();
        canonicalize_terms(&mut self.study_topics);
        canonicalize_terms(&mut self.study_areas);
        canonicalize_terms(&mut self.health_applications);
        self.dataset_ids.sort();
        self.dataset_ids.dedup();
    }
}
