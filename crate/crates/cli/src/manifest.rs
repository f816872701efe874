//! Flat `key=value` run manifests written next to every output file.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lss_core::envi::envi_paths;
use sha2::{Digest, Sha256};

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    let mut hex = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(hex, "{b:02x}");
    }
    Ok(hex)
}

/// Files that make up an artifact: both halves of an ENVI pair, or the file itself.
pub fn artifact_files(path: &Path, envi: bool) -> Vec<PathBuf> {
    if envi {
        let (hdr, img) = envi_paths(path);
        vec![hdr, img]
    } else {
        vec![path.to_path_buf()]
    }
}

pub struct Manifest {
    started: Instant,
    command: String,
    config: Vec<(String, String)>,
    inputs: Vec<PathBuf>,
    outputs: Vec<PathBuf>,
    /// Paths that receive a `.manifest` sibling.
    primary: Vec<PathBuf>,
    seed: Option<u64>,
}

impl Manifest {
    pub fn new(argv: &[String]) -> Self {
        let command = argv
            .iter()
            .map(|a| {
                if a.is_empty() || a.contains(char::is_whitespace) {
                    format!("'{a}'")
                } else {
                    a.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ");
        Manifest {
            started: Instant::now(),
            command,
            config: Vec::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            primary: Vec::new(),
            seed: None,
        }
    }

    pub fn config(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.push((key.to_string(), value.to_string()));
        self
    }

    pub fn seed(&mut self, seed: u64) -> &mut Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(&mut self, path: &Path, envi: bool) -> &mut Self {
        self.inputs.extend(artifact_files(path, envi));
        self
    }

    pub fn output(&mut self, path: &Path, envi: bool) -> &mut Self {
        self.outputs.extend(artifact_files(path, envi));
        self.primary.push(path.to_path_buf());
        self
    }

    pub fn render(&self) -> std::io::Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "tool=lss");
        let _ = writeln!(s, "version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command={}", self.command);
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed={seed}");
        }
        for (k, v) in &self.config {
            let _ = writeln!(s, "config.{k}={v}");
        }
        for p in &self.inputs {
            let _ = writeln!(s, "input.{}={}", p.display(), sha256_file(p)?);
        }
        for p in &self.outputs {
            let _ = writeln!(s, "output.{}={}", p.display(), sha256_file(p)?);
        }
        let _ = writeln!(s, "duration_ms={}", self.started.elapsed().as_millis());
        Ok(s)
    }

    /// Writes `<output>.manifest` for every primary output.
    pub fn write(&self) -> std::io::Result<()> {
        if self.primary.is_empty() {
            return Ok(());
        }
        let text = self.render()?;
        for p in &self.primary {
            let mut path = p.as_os_str().to_owned();
            path.push(".manifest");
            fs::write(PathBuf::from(path), &text)?;
        }
        Ok(())
    }
}
