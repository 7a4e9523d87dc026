//! Versioned on-disk cache for computed tables.
//!
//! Each entry is a single JSON file named `{kind}-{model_hash}.json` holding
//! an envelope with a format version, the model hash, a SHA-256 checksum of
//! the serialized payload, and the payload itself. A version or checksum
//! mismatch is treated as a miss so stale or corrupted entries are recomputed
//! rather than silently reused.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Bumped whenever the serialized layout of any cached payload changes.
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct Envelope {
    version: u32,
    model_hash: String,
    checksum: String,
    payload: serde_json::Value,
}

fn payload_checksum(payload: &serde_json::Value) -> Result<String> {
    let bytes = serde_json::to_vec(payload).map_err(Error::Json)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// A directory of cache entries.
#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    pub fn entry_path(&self, kind: &str, model_hash: &str) -> PathBuf {
        self.dir.join(format!("{kind}-{model_hash}.json"))
    }

    /// Loads an entry, returning `Ok(None)` on a miss. A missing file, a
    /// version mismatch, a hash mismatch, or a corrupted payload all count as
    /// misses; only I/O and serialization errors on an otherwise healthy file
    /// are surfaced.
    pub fn load<T: DeserializeOwned>(&self, kind: &str, model_hash: &str) -> Result<Option<T>> {
        let path = self.entry_path(kind, model_hash);
        let text = match fs::read_to_string(&path) {
            Ok(text) => text,
            Err(err) if err.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(err) => return Err(Error::Io(err)),
        };
        let envelope: Envelope = match serde_json::from_str(&text) {
            Ok(envelope) => envelope,
            Err(_) => return Ok(None),
        };
        if envelope.version != CACHE_VERSION
            || envelope.model_hash != model_hash
            || payload_checksum(&envelope.payload)? != envelope.checksum
        {
            return Ok(None);
        }
        match serde_json::from_value(envelope.payload) {
            Ok(value) => Ok(Some(value)),
            Err(_) => Ok(None),
        }
    }

    /// Serializes and stores an entry, returning the file path.
    pub fn store<T: Serialize>(&self, kind: &str, model_hash: &str, value: &T) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir).map_err(Error::Io)?;
        let payload = serde_json::to_value(value).map_err(Error::Json)?;
        let envelope = Envelope {
            version: CACHE_VERSION,
            model_hash: model_hash.to_string(),
            checksum: payload_checksum(&payload)?,
            payload,
        };
        let path = self.entry_path(kind, model_hash);
        let text = serde_json::to_string_pretty(&envelope).map_err(Error::Json)?;
        write_atomically(&path, text.as_bytes())?;
        Ok(path)
    }
}

/// Writes via a sibling temp file and rename so a crash never leaves a
/// half-written cache entry in place.
fn write_atomically(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, bytes).map_err(Error::Io)?;
    fs::rename(&tmp, path).map_err(Error::Io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelSpec, StepKernel, DEFAULT_STATE_BUDGET};
    use crate::oracle::{two_point_transfer, TwoPointTable};

    fn sample_table() -> (ModelSpec, TwoPointTable) {
        let spec =
            ModelSpec::new(StepKernel::nearest_neighbor(1, 4).unwrap(), 3, 0.5, 1.0).unwrap();
        let table = two_point_transfer(&spec, DEFAULT_STATE_BUDGET).unwrap();
        (spec, table)
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (spec, table) = sample_table();
        let hash = spec.hash();
        cache.store("twopoint", &hash, &table).unwrap();
        let loaded: TwoPointTable = cache.load("twopoint", &hash).unwrap().unwrap();
        assert_eq!(loaded.values, table.values);
        assert_eq!(loaded.model_hash, table.model_hash);
    }

    #[test]
    fn miss_on_absent_entry() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let loaded: Option<TwoPointTable> = cache.load("twopoint", "deadbeef").unwrap();
        assert!(loaded.is_none());
    }

    #[test]
    fn corrupted_payload_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (spec, table) = sample_table();
        let hash = spec.hash();
        let path = cache.store("twopoint", &hash, &table).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        // Flip a digit inside the payload without touching the checksum.
        let pos = text.find("\"values\"").unwrap();
        let tail = text[pos..].to_string();
        let flipped = tail.replacen("0.25", "0.26", 1);
        assert_ne!(tail, flipped, "expected a 0.25 value to corrupt");
        text.replace_range(pos.., &flipped);
        std::fs::write(&path, text).unwrap();
        let loaded: Option<TwoPointTable> = cache.load("twopoint", &hash).unwrap();
        assert!(loaded.is_none(), "checksum mismatch must force a miss");
    }

    #[test]
    fn version_mismatch_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (spec, table) = sample_table();
        let hash = spec.hash();
        let path = cache.store("twopoint", &hash, &table).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let bumped = text.replacen(
            &format!("\"version\": {CACHE_VERSION}"),
            &format!("\"version\": {}", CACHE_VERSION + 1),
            1,
        );
        assert_ne!(text, bumped);
        std::fs::write(&path, bumped).unwrap();
        let loaded: Option<TwoPointTable> = cache.load("twopoint", &hash).unwrap();
        assert!(loaded.is_none());
    }

    #[test]
    fn stored_bytes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let (spec, table) = sample_table();
        let hash = spec.hash();
        let path = cache.store("twopoint", &hash, &table).unwrap();
        let first = std::fs::read(&path).unwrap();
        cache.store("twopoint", &hash, &table).unwrap();
        let second = std::fs::read(&path).unwrap();
        assert_eq!(first, second);
    }
}
