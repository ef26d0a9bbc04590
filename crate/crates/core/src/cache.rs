//! On-disk cache of solve reports, keyed by a content hash of the inputs.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::search::{FilterOrder, SolveReport, Strategy};

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "KRONHOLM_CACHE_DIR";

/// Bumped whenever the report format or the search semantics change.
pub const CACHE_VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "+r1");

#[derive(Serialize)]
struct KeyMaterial<'a> {
    k: usize,
    p: usize,
    q: usize,
    strategy: &'a Strategy,
    filter_order: &'a FilterOrder,
    version: &'a str,
}

pub fn cache_key(k: usize, p: usize, q: usize, strategy: Strategy, order: FilterOrder) -> String {
    cache_key_with_version(k, p, q, strategy, order, CACHE_VERSION)
}

pub fn cache_key_with_version(
    k: usize,
    p: usize,
    q: usize,
    strategy: Strategy,
    order: FilterOrder,
    version: &str,
) -> String {
    let material = KeyMaterial {
        k,
        p,
        q,
        strategy: &strategy,
        filter_order: &order,
        version,
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    hex::encode(Sha256::digest(&bytes))
}

/// Default location: `$KRONHOLM_CACHE_DIR`, else `$XDG_CACHE_HOME/kronholm`,
/// else `$HOME/.cache/kronholm`.
pub fn default_cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os(CACHE_ENV) {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("kronholm"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("kronholm"))
}

pub fn report_bytes(report: &SolveReport) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(report).expect("report serializes");
    bytes.push(b'\n');
    bytes
}

#[derive(Debug)]
pub enum Lookup {
    Hit(Box<SolveReport>),
    Miss,
    /// An entry exists but could not be read back.
    Corrupt(String),
}

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

    pub fn path_for(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Lookup {
        let path = self.path_for(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
        };
        match serde_json::from_slice::<SolveReport>(&bytes) {
            Ok(r) => Lookup::Hit(Box::new(r)),
            Err(e) => Lookup::Corrupt(format!("{}: {e}", path.display())),
        }
    }

    /// Writes through a temporary file in the same directory and renames it
    /// into place.
    pub fn store(&self, key: &str, report: &SolveReport) -> io::Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(&report_bytes(report))?;
        tmp.flush()?;
        let path = self.path_for(key);
        tmp.persist(&path).map_err(|e| e.error)?;
        Ok(path)
    }
}
