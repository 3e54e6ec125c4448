//! On-disk JSON cache keyed by `(kind, parameter)`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Entry<T> {
    format_version: u32,
    kind: String,
    key: String,
    value: T,
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, kind: &str, key: &str) -> PathBuf {
        let safe: String = key
            .chars()
            .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
            .collect();
        self.dir.join(format!("{kind}-{safe}.json"))
    }

    /// `None` on a miss, including entries written by another format version
    /// or for a different key.
    pub fn load<T: DeserializeOwned>(&self, kind: &str, key: &str) -> Result<Option<T>> {
        let path = self.path(kind, key);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::Cache(format!("{}: {e}", path.display()))),
        };
        let entry: Entry<T> = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(_) => return Ok(None),
        };
        Ok((entry.format_version == FORMAT_VERSION && entry.kind == kind && entry.key == key).then_some(entry.value))
    }

    pub fn store<T: Serialize>(&self, kind: &str, key: &str, value: &T) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| Error::Cache(format!("{}: {e}", self.dir.display())))?;
        let entry = Entry {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            key: key.to_string(),
            value,
        };
        let text = serde_json::to_string_pretty(&entry).map_err(|e| Error::Cache(e.to_string()))?;
        let path = self.path(kind, key);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, text).map_err(|e| Error::Cache(format!("{}: {e}", tmp.display())))?;
        fs::rename(&tmp, &path).map_err(|e| Error::Cache(format!("{}: {e}", path.display())))
    }

    /// Loads `(kind, key)`, or computes and stores it.
    pub fn get_or_compute<T, F>(&self, kind: &str, key: &str, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.load(kind, key)? {
            return Ok(v);
        }
        let v = compute()?;
        self.store(kind, key, &v)?;
        Ok(v)
    }
}
