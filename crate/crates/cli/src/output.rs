//! Output directories namespaced by config hash, written all at once.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

/// Files of one run, held in memory until the verdict is known.
pub struct Staged {
    root: PathBuf,
    name: String,
    files: Vec<(String, Vec<u8>)>,
}

pub fn config_hash(subcommand: &str, config_json: &str) -> String {
    let mut h = Sha256::new();
    h.update(subcommand.as_bytes());
    h.update(b"\n");
    h.update(config_json.as_bytes());
    hex::encode(&h.finalize()[..8])
}

impl Staged {
    pub fn new(root: &Path, subcommand: &str, config_json: &str) -> Self {
        Staged { root: root.to_path_buf(), name: format!("{subcommand}-{}", config_hash(subcommand, config_json)), files: Vec::new() }
    }

    pub fn add(&mut self, file: &str, contents: impl Into<Vec<u8>>) {
        self.files.push((file.to_string(), contents.into()));
    }

    /// Writes into a private temporary directory, then renames it to
    /// `<name>` on pass or `<name>.failed` otherwise. Earlier results for the
    /// same config are replaced.
    pub fn commit(self, pass: bool) -> Result<PathBuf> {
        fs::create_dir_all(&self.root).with_context(|| format!("creating {}", self.root.display()))?;
        let tmp = self.root.join(format!(".{}.tmp-{}", self.name, std::process::id()));
        if tmp.exists() {
            fs::remove_dir_all(&tmp)?;
        }
        fs::create_dir(&tmp).with_context(|| format!("creating {}", tmp.display()))?;
        for (file, contents) in &self.files {
            fs::write(tmp.join(file), contents).with_context(|| format!("writing {file}"))?;
        }
        let done = self.root.join(&self.name);
        let failed = self.root.join(format!("{}.failed", self.name));
        for stale in [&done, &failed] {
            if stale.exists() {
                fs::remove_dir_all(stale).with_context(|| format!("removing {}", stale.display()))?;
            }
        }
        let target = if pass { done } else { failed };
        fs::rename(&tmp, &target).with_context(|| format!("renaming to {}", target.display()))?;
        Ok(target)
    }
}
