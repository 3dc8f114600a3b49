//! Artifact directory: deterministic JSON/CSV/text plus a timestamped manifest.

use std::fs;
use std::path::PathBuf;

use serde::Serialize;

use sone_index::config::ExperimentConfig;
use sone_index::Result;

/// Bumped whenever an artifact changes shape.
pub const SCHEMA_VERSION: u32 = 1;

pub struct Artifacts {
    dir: PathBuf,
    written: Vec<String>,
}

impl Artifacts {
    pub fn create(dir: PathBuf) -> Result<Self> {
        fs::create_dir_all(&dir)?;
        Ok(Artifacts {
            dir,
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        self.written.push(name.to_string());
        self.dir.join(name)
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let path = self.path(name);
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        for r in rows {
            w.serialize(r).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        fs::write(self.path(name), body)?;
        Ok(())
    }

    /// Writes `manifest.json` listing every artifact; the only file with a clock in it.
    pub fn finish(
        mut self,
        command: &str,
        cfg: &ExperimentConfig,
        passed: bool,
    ) -> Result<PathBuf> {
        let files = std::mem::take(&mut self.written);
        let manifest = Manifest {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION"),
            command,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            passed,
            config: cfg,
            files,
        };
        self.json("manifest.json", &manifest)?;
        Ok(self.dir)
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    schema_version: u32,
    tool_version: &'static str,
    command: &'a str,
    created: String,
    passed: bool,
    config: &'a ExperimentConfig,
    files: Vec<String>,
}

fn csv_err(e: csv::Error) -> sone_index::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}
