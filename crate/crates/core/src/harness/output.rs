//! Artifact persistence: write-then-rename files and a per-run manifest.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const MANIFEST: &str = "manifest.json";

/// Writes `bytes` to a sibling temporary file, syncs it and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp-{}", std::process::id()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path).inspect_err(|_| {
        let _ = fs::remove_file(&tmp);
    })?;
    Ok(())
}

pub fn write_json_atomic<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Record of a completed run, written last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub files: Vec<String>,
}

/// Output directory of one subcommand; tracks what the current run wrote.
#[derive(Debug)]
pub struct RunDir {
    pub dir: PathBuf,
    written: BTreeSet<String>,
}

impl RunDir {
    pub fn new(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Self {
            dir,
            written: BTreeSet::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.path(name), bytes)?;
        self.written.insert(name.to_string());
        Ok(())
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        write_json_atomic(&self.path(name), value)?;
        self.written.insert(name.to_string());
        Ok(())
    }

    /// Marks a file written by a helper that already used [`write_atomic`].
    pub fn record(&mut self, name: &str) {
        self.written.insert(name.to_string());
    }

    pub fn previous_manifest(&self) -> Option<Manifest> {
        let text = fs::read_to_string(self.path(MANIFEST)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Removes files of an earlier run that this run did not produce, then
    /// writes the manifest.
    pub fn finish(self, subcommand: &str, config: serde_json::Value) -> Result<Manifest> {
        if let Some(old) = self.previous_manifest() {
            for f in old.files.iter().filter(|f| !self.written.contains(*f)) {
                let _ = fs::remove_file(self.path(f));
            }
        }
        let manifest = Manifest {
            subcommand: subcommand.into(),
            config,
            files: self.written.iter().cloned().collect(),
        };
        write_json_atomic(&self.path(MANIFEST), &manifest)?;
        Ok(manifest)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stale_files_are_removed() {
        let tmp = tempfile::tempdir().unwrap();
        let mut run = RunDir::new(tmp.path().join("x")).unwrap();
        run.write("a.csv", b"1\n").unwrap();
        run.write("b.csv", b"2\n").unwrap();
        run.finish("solve", serde_json::json!({})).unwrap();
        let mut run = RunDir::new(tmp.path().join("x")).unwrap();
        run.write("a.csv", b"3\n").unwrap();
        let m = run.finish("solve", serde_json::json!({})).unwrap();
        assert_eq!(m.files, vec!["a.csv".to_string()]);
        assert!(!tmp.path().join("x/b.csv").exists());
        assert_eq!(fs::read(tmp.path().join("x/a.csv")).unwrap(), b"3\n");
        let leftovers: Vec<_> = fs::read_dir(tmp.path().join("x"))
            .unwrap()
            .filter(|e| {
                e.as_ref()
                    .unwrap()
                    .file_name()
                    .to_string_lossy()
                    .contains(".tmp")
            })
            .collect();
        assert!(leftovers.is_empty());
    }
}
