use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

/// Directory for manifests when `--manifest` is not given.
pub const OUTPUT_DIR_ENV: &str = "LUCE_OUTPUT_DIR";

/// Sidecar record of one invocation. `replay` is the command line with the
/// seed made explicit; running it again reproduces the output byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub replay: Vec<String>,
    pub seed: u64,
    pub threads: Option<usize>,
    pub parallel: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub started_unix_ms: u128,
    pub wall_clock_seconds: f64,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn default_path(command: &str, seed: u64) -> PathBuf {
        let dir = std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("."));
        dir.join(format!("luce-{command}-{seed}.manifest.json"))
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// `argv` with any `--seed` removed and `--seed <seed>` appended.
pub fn replay_argv(argv: &[String], seed: u64) -> Vec<String> {
    let mut out = Vec::with_capacity(argv.len() + 2);
    let mut skip = false;
    for a in argv {
        if skip {
            skip = false;
            continue;
        }
        if a == "--seed" {
            skip = true;
            continue;
        }
        if a.starts_with("--seed=") {
            continue;
        }
        out.push(a.clone());
    }
    out.push("--seed".into());
    out.push(seed.to_string());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[&str]) -> Vec<String> {
        v.iter().map(|x| x.to_string()).collect()
    }

    #[test]
    fn replay_replaces_seed() {
        assert_eq!(replay_argv(&s(&["luce", "sample", "--seed", "4"]), 9), s(&["luce", "sample", "--seed", "9"]));
        assert_eq!(replay_argv(&s(&["luce", "--seed=4", "sample"]), 4), s(&["luce", "sample", "--seed", "4"]));
    }
}
