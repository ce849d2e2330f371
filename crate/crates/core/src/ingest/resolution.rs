use crate::model::Resolution;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot read resolution {token:?}: {reason}")]
pub struct ResolutionError {
    pub token: String,
    pub reason: String,
}

fn fail(token: &str, reason: impl Into<String>) -> ResolutionError {
    ResolutionError { token: token.to_string(), reason: reason.into() }
}

/// Splits "30 km" / "0.5m" / "12" into the number and an optional unit factor.
fn number_and_unit(part: &str) -> Result<(f64, Option<f64>), ResolutionError> {
    let part = part.trim();
    let split = part.find(|c: char| !(c.is_ascii_digit() || c == '.')).unwrap_or(part.len());
    let (num, unit) = part.split_at(split);
    if num.is_empty() {
        return Err(fail(part, "expected a number"));
    }
    let value: f64 = num.parse().map_err(|_| fail(num, "malformed number"))?;
    let factor = match unit.trim().to_ascii_lowercase().as_str() {
        "" => None,
        "cm" => Some(0.01),
        "m" => Some(1.0),
        "km" => Some(1000.0),
        other => return Err(fail(other, "unit must be cm, m or km")),
    };
    Ok((value, factor))
}

fn positive(value: f64, token: &str) -> Result<f64, ResolutionError> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(fail(token, "length must be positive"))
    }
}

/// Reads one resolution cell entry.
///
/// Accepted forms: `30m`, `1km`, `0.15–0.5m` (en dash or hyphen), `15cm-15m`, `>10km`,
/// `2.4m / Multispectral`, `1:250,000`, and `na`, `n/a` or blank for
/// unspecified.
pub fn parse_resolution(text: &str) -> Result<Resolution, ResolutionError> {
    let text = text.trim();
    let lowered = text.to_ascii_lowercase();
    if text.is_empty() || lowered == "na" || lowered == "n/a" {
        return Ok(Resolution::Unspecified);
    }

    if let Some(rest) = text.strip_prefix("1:") {
        let digits: String = rest.chars().filter(|c| *c != ',' && !c.is_whitespace()).collect();
        let denominator: u64 = digits.parse().map_err(|_| fail(rest, "scale denominator must be an integer"))?;
        if denominator == 0 {
            return Err(fail(rest, "scale denominator must be positive"));
        }
        return Ok(Resolution::Scale { denominator });
    }

    let (value, band) = match text.split_once('/') {
        Some((value, label)) => {
            let label = label.trim();
            if label.is_empty() {
                return Err(fail(text, "empty band label after '/'"));
            }
            (value.trim(), Some(label.to_string()))
        }
        None => (text, None),
    };

    let resolution = if let Some(bound) = value.strip_prefix('>') {
        let (num, unit) = number_and_unit(bound)?;
        let unit = unit.ok_or_else(|| fail(bound, "missing unit (cm, m or km)"))?;
        Resolution::at_least(positive(num * unit, bound)?)
    } else if let Some((lo, hi)) = value.split_once(['\u{2013}', '-']) {
        let (hi_num, hi_unit) = number_and_unit(hi)?;
        let hi_unit = hi_unit.ok_or_else(|| fail(hi, "missing unit (cm, m or km)"))?;
        let (lo_num, lo_unit) = number_and_unit(lo)?;
        let min = positive(lo_num * lo_unit.unwrap_or(hi_unit), lo)?;
        let max = positive(hi_num * hi_unit, hi)?;
        if max < min {
            return Err(fail(value, "range upper bound is below lower bound"));
        }
        Resolution::range(min, max)
    } else {
        let (num, unit) = number_and_unit(value)?;
        let unit = unit.ok_or_else(|| fail(value, "missing unit (cm, m or km)"))?;
        Resolution::point(positive(num * unit, value)?)
    };

    Ok(match band {
        Some(label) => resolution.with_band(label),
        None => resolution,
    })
}
