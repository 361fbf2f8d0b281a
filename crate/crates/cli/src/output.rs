use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Failure;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize)]
struct ArtifactEntry {
    file: String,
    bytes: usize,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    schema_version: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    config: &'a C,
    artifacts: Vec<ArtifactEntry>,
}

/// Collects named artifacts in memory; `finish` writes them and a manifest
/// into the output directory, when there is one.
pub struct Artifacts {
    out: Option<PathBuf>,
    files: Vec<(String, Vec<u8>)>,
}

pub fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Failure::config(anyhow::anyhow!(e)))?;
    }
    w.into_inner().map_err(|e| Failure::config(anyhow::anyhow!(e.to_string())))
}

pub fn json_bytes<T: Serialize>(v: &T) -> Result<Vec<u8>, Failure> {
    let mut b = serde_json::to_vec_pretty(v).map_err(|e| Failure::config(e.into()))?;
    b.push(b'\n');
    Ok(b)
}

impl Artifacts {
    pub fn new(out: Option<&Path>) -> Self {
        Self {
            out: out.map(Path::to_path_buf),
            files: Vec::new(),
        }
    }

    pub fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    pub fn get(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|f| f.0 == name).map(|f| f.1.as_slice())
    }

    pub fn finish<C: Serialize>(self, command: &str, config: &C) -> Result<(), Failure> {
        let Some(dir) = self.out else {
            return Ok(());
        };
        let write = |name: &str, bytes: &[u8]| -> Result<(), Failure> {
            let path = dir.join(name);
            fs::write(&path, bytes)
                .with_context(|| format!("writing {}", path.display()))
                .map_err(Failure::config)
        };
        fs::create_dir_all(&dir)
            .with_context(|| format!("creating {}", dir.display()))
            .map_err(Failure::config)?;
        let mut artifacts = Vec::new();
        for (name, bytes) in &self.files {
            write(name, bytes)?;
            artifacts.push(ArtifactEntry {
                file: name.clone(),
                bytes: bytes.len(),
                sha256: format!("{:x}", Sha256::digest(bytes)),
            });
        }
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            tool: "symquot",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            artifacts,
        };
        write("manifest.json", &json_bytes(&manifest)?)
    }
}
