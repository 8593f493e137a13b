use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::{wav, CliError, Result};

/// Version of every file layout written by this crate.
pub const SCHEMA_VERSION: u32 = 1;

/// Stamp embedded in every artifact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub schema_version: u32,
    pub tool: String,
    pub command: String,
    pub seed: u64,
    pub config_sha256: String,
}

impl Provenance {
    pub fn new<C: Serialize>(command: &str, seed: u64, config: &C) -> Result<Self> {
        Ok(Provenance {
            schema_version: SCHEMA_VERSION,
            tool: format!("wristsonar {}", env!("CARGO_PKG_VERSION")),
            command: command.to_string(),
            seed,
            config_sha256: config_hash(config)?,
        })
    }

    /// One-line `key=value` form used in CSV preambles, WAV comments and SVG
    /// metadata.
    pub fn line(&self) -> String {
        format!(
            "{} schema_version={} command={} seed={} config_sha256={}",
            self.tool, self.schema_version, self.command, self.seed, self.config_sha256
        )
    }
}

/// SHA-256 of the compact JSON form of a resolved configuration.
pub fn config_hash<C: Serialize>(config: &C) -> Result<String> {
    let bytes = serde_json::to_vec(config).map_err(|e| CliError::Config(format!("serialising config: {e}")))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Reads a JSON configuration, or returns the defaults without a path.
pub fn load_config<C: DeserializeOwned + Default>(path: Option<&Path>) -> Result<C> {
    let Some(path) = path else {
        return Ok(C::default());
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::io(path, e))
}

/// Rejects configuration files written for another layout.
pub fn check_schema(version: u32) -> Result<()> {
    if version != SCHEMA_VERSION {
        return Err(CliError::Config(format!("schema_version {version} is not supported (expected {SCHEMA_VERSION})")));
    }
    Ok(())
}

#[derive(Serialize)]
struct Document<'a, C, R> {
    #[serde(flatten)]
    provenance: &'a Provenance,
    config: &'a C,
    results: &'a R,
}

/// Output directory that stamps everything it writes.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    provenance: Provenance,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(dir: &Path, provenance: Provenance) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        Ok(OutDir { dir: dir.to_path_buf(), provenance, written: Vec::new() })
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Paths written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        f.write_all(bytes).map_err(|e| CliError::io(&path, e))?;
        self.written.push(path);
        Ok(())
    }

    /// CSV with a `#` preamble line, then a header row and one row per item.
    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let mut buf = format!("# {}\n", self.provenance.line()).into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
            }
            w.flush().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        }
        self.put(name, &buf)
    }

    /// Pretty JSON holding the provenance, the resolved config and results.
    pub fn json<C: Serialize, R: Serialize>(&mut self, name: &str, config: &C, results: &R) -> Result<()> {
        let doc = Document { provenance: &self.provenance, config, results };
        let mut text = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, body: String) -> Result<()> {
        self.put(name, body.as_bytes())
    }

    /// 16-bit mono PCM; returns how many samples were clipped.
    pub fn wav(&mut self, name: &str, samples: &[f64], sample_rate: u32) -> Result<usize> {
        let (bytes, clipped) = wav::encode(samples, sample_rate, &self.provenance.line());
        self.put(name, &bytes)?;
        Ok(clipped)
    }
}
