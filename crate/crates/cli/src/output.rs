//! Atomic output files and their manifests.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use ecfit_core::{Error, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Runs `write` against a path inside a scratch directory next to `path`,
/// then renames every file it produced into place. Sidecars written next
/// to the scratch path are carried along.
pub fn atomic<F>(path: &Path, write: F) -> Result<()>
where
    F: FnOnce(&Path) -> Result<()>,
{
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&parent)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::Usage(format!("`{}` is not a file path", path.display())))?;
    let scratch = tempfile::Builder::new()
        .prefix(".ecfit-tmp")
        .tempdir_in(&parent)?;
    write(&scratch.path().join(name))?;
    for entry in fs::read_dir(scratch.path())? {
        let entry = entry?;
        fs::rename(entry.path(), parent.join(entry.file_name()))?;
    }
    Ok(())
}

pub fn atomic_text(path: &Path, text: &str) -> Result<()> {
    atomic(path, |tmp| {
        let mut f = fs::File::create(tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
        Ok(())
    })
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect())
}

/// Provenance record written as `<output>.manifest.json`.
#[derive(Debug, Clone)]
pub struct Manifest {
    command: String,
    inputs: Vec<(String, String)>,
    config: BTreeMap<String, Value>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            inputs: Vec::new(),
            config: BTreeMap::new(),
        }
    }

    pub fn input(&mut self, path: &Path) -> Result<&mut Self> {
        let digest = sha256_file(path)?;
        self.inputs.push((path.display().to_string(), digest));
        Ok(self)
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.config.insert(key.to_string(), value.into());
        self
    }

    pub fn to_json(&self, output: &Path) -> Result<String> {
        let digest = sha256_file(output)?;
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_secs());
        let inputs: Vec<Value> = self
            .inputs
            .iter()
            .map(|(p, d)| json!({ "path": p, "sha256": d }))
            .collect();
        let doc = json!({
            "command": self.command,
            "tool": "ecfit",
            "version": env!("CARGO_PKG_VERSION"),
            "timestamp_unix": timestamp,
            "inputs": inputs,
            "config": self.config,
            "output": { "path": output.display().to_string(), "sha256": digest },
        });
        serde_json::to_string_pretty(&doc).map_err(|e| Error::Numerical(e.to_string()))
    }

    /// Writes the manifest sidecar for an already written `output`.
    pub fn write_for(&self, output: &Path) -> Result<PathBuf> {
        let path = manifest_path(output);
        atomic_text(&path, &(self.to_json(output)? + "\n"))?;
        Ok(path)
    }
}

pub fn manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_os_string();
    s.push(".manifest.json");
    PathBuf::from(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_carries_sidecars() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("m.mtx");
        atomic(&target, |tmp| {
            fs::write(tmp, "1 1 0\n")?;
            fs::write(
                ecfit_core::matrix::label_path(tmp, "countries"),
                "index,label\n",
            )?;
            Ok(())
        })
        .unwrap();
        let mut names: Vec<String> = fs::read_dir(dir.path())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
            .collect();
        names.sort();
        assert_eq!(names, ["m.mtx", "m.mtx.countries.csv"]);
    }

    #[test]
    fn manifest_records_digests() {
        let dir = tempfile::tempdir().unwrap();
        let input = dir.path().join("in.txt");
        fs::write(&input, "abc").unwrap();
        let out = dir.path().join("out.txt");
        fs::write(&out, "x").unwrap();
        let mut m = Manifest::new("test");
        m.input(&input).unwrap().set("delta", 0.0);
        let v: Value = serde_json::from_str(&m.to_json(&out).unwrap()).unwrap();
        assert_eq!(
            v["inputs"][0]["sha256"],
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
        assert_eq!(v["config"]["delta"], 0.0);
        assert_eq!(v["command"], "test");
    }
}
