//! Run manifests: every artifact-producing command drops a sidecar file
//! recording the exact invocation, seeds and content digests, so any
//! output can be replayed.

use crate::Result;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct RunManifest {
    pub command: String,
    pub argv: Vec<String>,
    pub seeds: Vec<u64>,
    pub inputs: Vec<(PathBuf, String)>,
    pub outputs: Vec<(PathBuf, String)>,
}

pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            argv: std::env::args().collect(),
            ..Default::default()
        }
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seeds.push(s);
        self
    }

    pub fn input(mut self, path: &Path) -> Result<Self> {
        let digest = file_digest(path)?;
        self.inputs.push((path.to_path_buf(), digest));
        Ok(self)
    }

    pub fn output(mut self, path: &Path) -> Result<Self> {
        let digest = file_digest(path)?;
        self.outputs.push((path.to_path_buf(), digest));
        Ok(self)
    }

    pub fn render(&self) -> String {
        let mut out = String::from("manifest v1\n");
        out.push_str(&format!("version {}\n", TOOL_VERSION));
        out.push_str(&format!("command {}\n", self.command));
        for a in &self.argv {
            out.push_str(&format!("arg {a}\n"));
        }
        for s in &self.seeds {
            out.push_str(&format!("seed {s}\n"));
        }
        for (p, d) in &self.inputs {
            out.push_str(&format!("input sha256:{d} {}\n", p.display()));
        }
        for (p, d) in &self.outputs {
            out.push_str(&format!("output sha256:{d} {}\n", p.display()));
        }
        out
    }

    /// Writes `<artifact>.manifest` next to the artifact.
    pub fn write_alongside(&self, artifact: &Path) -> Result<PathBuf> {
        let mut name = artifact.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest");
        let path = artifact.with_file_name(name);
        std::fs::write(&path, self.render())?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_and_sidecar() {
        let dir = std::env::temp_dir().join(format!("settleq-manifest-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let artifact = dir.join("a.txt");
        std::fs::write(&artifact, "hello\n").unwrap();
        let m = RunManifest::new("test")
            .seed(7)
            .output(&artifact)
            .unwrap();
        let side = m.write_alongside(&artifact).unwrap();
        let text = std::fs::read_to_string(&side).unwrap();
        assert!(text.starts_with("manifest v1\n"));
        assert!(text.contains("command test"));
        assert!(text.contains("seed 7"));
        // sha256 of "hello\n"
        assert!(text.contains("5891b5b522d5df086d0ff0b110fbd9d21bb4fc7163af34d08286a2e846f6be03"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
