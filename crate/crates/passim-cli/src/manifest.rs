use passim::geometry::SceneConfig;
use passim::Result;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stage {
    pub name: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Record of a run, written as `manifest.json`. Holds no timings so that
/// identical runs give identical bytes.
#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    #[serde(skip)]
    dir: PathBuf,
    pub preset: Option<String>,
    pub scene_hash: Option<String>,
    pub status: &'static str,
    pub stages: Vec<Stage>,
    /// Every file written except `manifest.json` itself.
    pub files: Vec<FileEntry>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Manifest {
    pub fn new(dir: &Path, preset: Option<&str>, cfg: Option<&SceneConfig>) -> Self {
        Manifest {
            dir: dir.to_path_buf(),
            preset: preset.map(str::to_owned),
            scene_hash: cfg.map(SceneConfig::hash),
            status: "ok",
            stages: Vec::new(),
            files: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Writes `bytes` to `name` and records it.
    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.dir.join(name), bytes)?;
        self.push(name, bytes);
        Ok(())
    }

    /// Records a file already written under the output directory.
    pub fn record(&mut self, name: &str) -> Result<()> {
        let bytes = fs::read(self.dir.join(name))?;
        self.push(name, &bytes);
        Ok(())
    }

    fn push(&mut self, name: &str, bytes: &[u8]) {
        self.files.retain(|f| f.name != name);
        self.files.push(FileEntry { name: name.into(), sha256: sha256_hex(bytes), bytes: bytes.len() as u64 });
    }

    /// Runs one stage, recording its outcome. `None` after a failure.
    pub fn stage<T>(&mut self, name: &str, f: impl FnOnce() -> Result<T>) -> Option<T> {
        match f() {
            Ok(v) => {
                self.stages.push(Stage { name: name.into(), status: "ok", error: None });
                Some(v)
            }
            Err(e) => {
                self.stages.push(Stage { name: name.into(), status: "failed", error: Some(e.to_string()) });
                self.status = "failed";
                None
            }
        }
    }

    pub fn failed(&self) -> bool {
        self.status != "ok"
    }

    pub fn failed_stage(&self) -> Option<&Stage> {
        self.stages.iter().find(|s| s.error.is_some())
    }

    pub fn finish(&self) -> Result<()> {
        let json = serde_json::to_string_pretty(self)?;
        fs::write(self.dir.join("manifest.json"), json + "\n")?;
        Ok(())
    }
}
