//! On-disk cache of computed artifacts.
//!
//! Each entry is one JSON file holding the key, a schema version, the
//! serialized payload and its SHA-256 checksum.  Keys are built from the
//! root system and canonical reduced words, never from in-memory layouts.
//! A missing file, a version mismatch or a failed checksum all lead to
//! recomputation; the last two are counted as corrupt entries.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::rootdata::CartanType;

/// Version of the payload layouts.  Entries with another version are
/// ignored.
pub const SCHEMA_VERSION: u32 = 1;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "SUBREGKL_CACHE";

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    /// Type label such as `B3`.
    pub kind: String,
    pub rank: usize,
    /// Artifact kind such as `expansion`.
    pub artifact: String,
    /// Canonical parameter string, e.g. a reduced word.
    pub params: String,
}

impl CacheKey {
    pub fn new(kind: CartanType, artifact: &str, params: impl Into<String>) -> Self {
        Self {
            kind: kind.to_string(),
            rank: kind.rank(),
            artifact: artifact.to_string(),
            params: params.into(),
        }
    }

    fn canonical(&self) -> String {
        format!("{}|{}|{}|{}|v{}", self.kind, self.rank, self.artifact, self.params, SCHEMA_VERSION)
    }

    fn file_name(&self) -> String {
        let digest = hex::encode(Sha256::digest(self.canonical().as_bytes()));
        format!("{}-{}-{}.json", self.kind, self.artifact, &digest[..24])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct CacheEntry {
    key: CacheKey,
    version: u32,
    checksum: String,
    payload: String,
}

fn checksum(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

/// Counters of cache activity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub corrupt: usize,
    pub writes: usize,
}

/// A cache rooted at a directory, or a disabled cache.
#[derive(Debug, Default)]
pub struct Cache {
    dir: Option<PathBuf>,
    hits: AtomicUsize,
    misses: AtomicUsize,
    corrupt: AtomicUsize,
    writes: AtomicUsize,
}

impl Cache {
    pub fn disabled() -> Self {
        Self::default()
    }

    pub fn at(dir: impl Into<PathBuf>) -> Self {
        Self { dir: Some(dir.into()), ..Self::default() }
    }

    /// Uses `SUBREGKL_CACHE` if it is set and non-empty.
    pub fn from_env() -> Self {
        match std::env::var_os(CACHE_ENV) {
            Some(d) if !d.is_empty() => Self::at(d),
            _ => Self::disabled(),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            corrupt: self.corrupt.load(Ordering::Relaxed),
            writes: self.writes.load(Ordering::Relaxed),
        }
    }

    fn path(&self, key: &CacheKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(key.file_name()))
    }

    /// Reads an entry.  Anything but a valid entry for exactly this key and
    /// schema version yields `None`.
    pub fn get<T: DeserializeOwned>(&self, key: &CacheKey) -> Option<T> {
        let path = self.path(key)?;
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                return None;
            }
        };
        let bad = |why: &str| {
            log::warn!("discarding cache entry {}: {why}", path.display());
            self.corrupt.fetch_add(1, Ordering::Relaxed);
            self.misses.fetch_add(1, Ordering::Relaxed);
            None
        };
        let entry: CacheEntry = match serde_json::from_str(&text) {
            Ok(e) => e,
            Err(_) => return bad("unreadable"),
        };
        if entry.version != SCHEMA_VERSION {
            return bad("schema version mismatch");
        }
        if entry.key != *key {
            return bad("key mismatch");
        }
        if checksum(&entry.payload) != entry.checksum {
            return bad("checksum mismatch");
        }
        match serde_json::from_str(&entry.payload) {
            Ok(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            Err(_) => bad("payload does not match its type"),
        }
    }

    /// Writes an entry through a temporary file and a rename.
    pub fn put<T: Serialize>(&self, key: &CacheKey, value: &T) -> Result<()> {
        let Some(path) = self.path(key) else {
            return Ok(());
        };
        let io = |e: std::io::Error| Error::Cache(format!("{}: {e}", path.display()));
        let dir = path.parent().expect("cache path has a parent");
        fs::create_dir_all(dir).map_err(io)?;
        let payload = serde_json::to_string(value).map_err(|e| Error::Cache(e.to_string()))?;
        let entry = CacheEntry {
            key: key.clone(),
            version: SCHEMA_VERSION,
            checksum: checksum(&payload),
            payload,
        };
        let text = serde_json::to_string(&entry).map_err(|e| Error::Cache(e.to_string()))?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)?;
        self.writes.fetch_add(1, Ordering::Relaxed);
        Ok(())
    }

    /// Returns the cached value or computes, stores and returns it.
    pub fn get_or_compute<T, F>(&self, key: &CacheKey, compute: F) -> Result<T>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T>,
    {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(key, &v)?;
        Ok(v)
    }
}
