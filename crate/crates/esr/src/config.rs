//! `key = value` configuration files.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::CliError;

/// Blank lines and lines starting with `#` are skipped. Keys accept `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().trim_start_matches("--").replace('-', "_");
        if key.is_empty() {
            return Err(CliError::usage(format!("config line {}: empty key", i + 1)));
        }
        out.insert(key, v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_normalised() {
        let m = parse_config("# c\n\nlambda-d-db = 20\n--k=3\nm_e=2\n").unwrap();
        assert_eq!(m["lambda_d_db"], "20");
        assert_eq!(m["k"], "3");
        assert_eq!(m["m_e"], "2");
        assert!(parse_config("nonsense").is_err());
    }
}
