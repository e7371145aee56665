//! Option layering: config file, then RPM_PRECISION, then flags.

use std::collections::BTreeMap;
use std::path::Path;

use riccati_pade::{Error, Result};

/// Plain `key = value` file, one entry per line. Blank lines and lines
/// starting with `#` are skipped.
pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {}", path.display(), e)))?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "{}:{}: expected 'key = value'",
                path.display(),
                lineno + 1
            ))
        })?;
        out.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(out)
}

/// Valid keys for solve/sweep config files, mirroring the long flags.
pub const SOLVE_KEYS: &[&str] = &[
    "preset",
    "potential",
    "alpha",
    "centrifugal",
    "g",
    "g-list",
    "d",
    "dmax",
    "target-digits",
    "seed",
    "state",
    "digits",
    "format",
    "jobs",
    "imag-kick",
];

pub fn check_keys(map: &BTreeMap<String, String>, allowed: &[&str]) -> Result<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::Config(format!("unknown config key '{}'", key)));
        }
    }
    Ok(())
}

/// Working-precision override: flag beats environment; absent means the
/// adaptive policy decides.
pub fn digits_override(flag: Option<u32>) -> Result<Option<u32>> {
    if let Some(d) = flag {
        return Ok(Some(d));
    }
    match std::env::var("RPM_PRECISION") {
        Ok(s) => {
            let d: u32 = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("RPM_PRECISION is not an integer: '{}'", s)))?;
            Ok(Some(d))
        }
        Err(_) => Ok(None),
    }
}
