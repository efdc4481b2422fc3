use std::collections::BTreeMap;
use std::path::Path;

use super::CliError;

/// Keys a config file may set; each matches a long flag.
pub const KNOWN_KEYS: &[&str] = &[
    "expr",
    "at",
    "dir",
    "t",
    "t0",
    "tol",
    "a",
    "b",
    "ring",
    "trials",
    "eps",
    "eta0",
    "xi",
    "n",
    "steps",
    "quad-nodes",
    "seed",
    "out",
];

/// Plain `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "config line {}: expected key=value",
                i + 1
            )));
        };
        let k = k.trim().trim_start_matches("--").replace('_', "-");
        if !KNOWN_KEYS.contains(&k.as_str()) {
            return Err(CliError::Usage(format!(
                "config line {}: unknown key '{k}'",
                i + 1
            )));
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

pub fn load_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}
