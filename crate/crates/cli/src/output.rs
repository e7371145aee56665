//! Output records and rendering. JSON and CSV always carry full
//! target-digit values; the stable-digit truncation rule applies to table
//! mode only.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use riccati_pade::apnum::{render_float, render_float_truncated, APComplex};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, riccati_pade::Error> {
        match s {
            "table" => Ok(Format::Table),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(riccati_pade::Error::Config(format!(
                "unknown format '{}' (expected table, json or csv)",
                other
            ))),
        }
    }
}

/// Echo of the effective configuration, embedded in structured output.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub potential: Option<String>,
    pub alpha: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_list: Option<Vec<String>>,
    pub displacement: usize,
    pub d_max: usize,
    pub target_digits: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fixed_digits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
    pub state_index: u32,
    pub jobs: usize,
}

impl ConfigEcho {
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config echo serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let hex: String = digest.iter().map(|b| format!("{:02x}", b)).collect();
        hex[..16].to_owned()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SequenceRowOut {
    pub d: usize,
    pub re: String,
    pub im: String,
    pub converged: bool,
    pub iterations: u32,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SweepRowOut {
    pub g: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub re: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub im: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    pub stable_digits_re: u32,
    pub stable_digits_im: u32,
    pub digits_used: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Top-level structured record: one solve or one sweep.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct OutputRecord {
    pub tool_version: String,
    pub config: ConfigEcho,
    pub config_hash: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub digits_used: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_digits_re: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_digits_im: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sequence: Option<Vec<SequenceRowOut>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<SweepRowOut>>,
}

impl OutputRecord {
    pub fn new(config: ConfigEcho) -> Self {
        let config_hash = config.hash();
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_owned(),
            config,
            config_hash,
            digits_used: None,
            stable_digits_re: None,
            stable_digits_im: None,
            verdict: None,
            sequence: None,
            rows: None,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("output record serializes")
    }
}

/// Renders one component at full precision for structured output.
pub fn component(v: &rug::Float, digits: u32) -> String {
    render_float(v, digits)
}

/// Decimal spelling of a coupling; exact when the rational terminates,
/// 20 significant digits otherwise.
pub fn coupling_decimal(g: &rug::Rational) -> String {
    let f = rug::Float::with_val(140, g);
    render_float(&f, 20)
}

/// Renders one component truncated at its stable-digit estimate, the table
/// convention for quoting values.
pub fn component_truncated(v: &rug::Float, stable: u32, cap: u32) -> String {
    if v.is_zero() {
        return "0".into();
    }
    render_float_truncated(v, stable.clamp(1, cap))
}

pub fn energy_columns(e: &APComplex, digits: u32) -> (String, String) {
    (component(e.re(), digits), component(e.im(), digits))
}

/// Simple aligned two-dimensional text table.
pub fn text_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let ncol = header.len();
    let mut width = vec![0usize; ncol];
    for (i, h) in header.iter().enumerate() {
        width[i] = h.len();
    }
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            width[i] = width[i].max(cell.len());
        }
    }
    let mut out = String::new();
    let push_row = |cells: Vec<String>, out: &mut String| {
        let line: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| format!("{:<w$}", c, w = width[i]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    };
    push_row(header.iter().map(|s| s.to_string()).collect(), &mut out);
    for row in rows {
        push_row(row.clone(), &mut out);
    }
    out
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_is_byte_identical() {
        let mut record = OutputRecord::new(ConfigEcho {
            command: "solve".into(),
            preset: Some("triple-well".into()),
            alpha: "0".into(),
            g: Some("7/50".into()),
            displacement: 0,
            d_max: 15,
            target_digits: 20,
            state_index: 0,
            jobs: 1,
            ..Default::default()
        });
        record.digits_used = Some(200);
        record.verdict = Some("converged".into());
        record.sequence = Some(vec![SequenceRowOut {
            d: 2,
            re: "0.96913474062929793208".into(),
            im: "0".into(),
            converged: true,
            iterations: 10,
        }]);
        let a = record.to_json();
        let parsed: OutputRecord = serde_json::from_str(&a).unwrap();
        let b = parsed.to_json();
        assert_eq!(a, b);
        assert_eq!(record, parsed);
    }

    #[test]
    fn config_hash_is_stable_and_sensitive() {
        let base = ConfigEcho {
            command: "solve".into(),
            alpha: "0".into(),
            d_max: 15,
            target_digits: 20,
            jobs: 1,
            ..Default::default()
        };
        let h1 = base.hash();
        let h2 = base.hash();
        assert_eq!(h1, h2);
        assert_eq!(h1.len(), 16);
        let mut other = base.clone();
        other.d_max = 14;
        assert_ne!(h1, other.hash());
    }
}
