use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// A file produced by an experiment, held in memory until the run succeeds.
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn csv<T: Serialize>(name: &str, rows: impl IntoIterator<Item = T>) -> Result<Self, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in rows {
            w.serialize(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(Artifact {
            name: name.to_string(),
            bytes,
        })
    }

    pub fn json<T: Serialize>(name: &str, value: &T) -> Result<Self, CliError> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        Ok(Artifact {
            name: name.to_string(),
            bytes,
        })
    }
}

/// Writes every artifact to `dir` through a temporary file and a rename, so a
/// reader never sees a half-written file.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(artifacts.len());
    for a in artifacts {
        let tmp = dir.join(format!(".{}.tmp", a.name));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&a.bytes)?;
        f.sync_all()?;
        staged.push((tmp, dir.join(&a.name)));
    }
    let mut written = Vec::with_capacity(staged.len());
    for (tmp, dest) in staged {
        fs::rename(&tmp, &dest)?;
        written.push(dest);
    }
    Ok(written)
}
