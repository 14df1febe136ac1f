//! Content-addressed, append-only on-disk store for computed values.
//!
//! One file per entry, named by the SHA-256 of the key. A file holds a short
//! header (format, tool version, key, value hash) followed by the canonical
//! serialized value. Entries never change once written: re-putting the same
//! value is a no-op and a different value is a [`CacheError::ConflictingEntry`].

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::CacheError;

pub const TOOL_VERSION: &str = concat!("hhh-", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CacheKey(String);

impl CacheKey {
    pub fn new(key: impl Into<String>) -> Self {
        CacheKey(key.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    fn file_name(&self) -> String {
        hex::encode(Sha256::digest(self.0.as_bytes()))
    }
}

pub fn sha256_hex(s: &str) -> String {
    hex::encode(Sha256::digest(s.as_bytes()))
}

#[derive(Clone, Debug)]
pub struct Store {
    dir: PathBuf,
    version: String,
}

impl Store {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CacheError> {
        Self::open_with_version(dir, TOOL_VERSION)
    }

    pub fn open_with_version(dir: impl AsRef<Path>, version: &str) -> Result<Self, CacheError> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Store {
            dir: dir.as_ref().to_path_buf(),
            version: version.to_string(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(key.file_name())
    }

    fn encode(&self, key: &CacheKey, value: &str) -> String {
        format!(
            "hhh-cache v1\nversion {}\nkey {}\nhash {}\n{}",
            self.version,
            key.as_str(),
            sha256_hex(value),
            value
        )
    }

    pub fn put(&self, key: &CacheKey, value: &str) -> Result<(), CacheError> {
        match self.get(key) {
            Ok(Some(existing)) if existing == value => return Ok(()),
            Ok(Some(_)) => {
                return Err(CacheError::ConflictingEntry {
                    key: key.as_str().to_string(),
                })
            }
            Ok(None) | Err(CacheError::CorruptEntry { .. }) => {}
            Err(e) => return Err(e),
        }
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        tmp.write_all(self.encode(key, value).as_bytes())?;
        tmp.flush()?;
        let path = self.path(key);
        match tmp.persist_noclobber(&path) {
            Ok(_) => Ok(()),
            Err(e) if e.error.kind() == std::io::ErrorKind::AlreadyExists => {
                // Lost a race with another writer or replaced a stale entry;
                // whatever is on disk now must agree.
                match self.get(key)? {
                    Some(v) if v == value => Ok(()),
                    Some(_) => Err(CacheError::ConflictingEntry {
                        key: key.as_str().to_string(),
                    }),
                    None => {
                        // stale version or unreadable: replace it
                        e.file.persist(&path).map_err(|e| CacheError::Io(e.error))?;
                        Ok(())
                    }
                }
            }
            Err(e) => Err(CacheError::Io(e.error)),
        }
    }

    pub fn get(&self, key: &CacheKey) -> Result<Option<String>, CacheError> {
        let path = self.path(key);
        let raw = match fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(e.into()),
        };
        let corrupt = |reason: &str| CacheError::CorruptEntry {
            key: key.as_str().to_string(),
            reason: reason.to_string(),
        };
        let mut parts = raw.splitn(5, '\n');
        if parts.next() != Some("hhh-cache v1") {
            return Err(corrupt("bad header"));
        }
        let version = parts
            .next()
            .and_then(|l| l.strip_prefix("version "))
            .ok_or_else(|| corrupt("missing version"))?;
        if version != self.version {
            return Ok(None);
        }
        let stored_key = parts
            .next()
            .and_then(|l| l.strip_prefix("key "))
            .ok_or_else(|| corrupt("missing key"))?;
        if stored_key != key.as_str() {
            return Err(corrupt("key mismatch"));
        }
        let hash = parts
            .next()
            .and_then(|l| l.strip_prefix("hash "))
            .ok_or_else(|| corrupt("missing hash"))?;
        let value = parts.next().unwrap_or("");
        if sha256_hex(value) != hash {
            return Err(corrupt("hash mismatch"));
        }
        Ok(Some(value.to_string()))
    }

    /// Number of entry files currently in the store.
    pub fn len(&self) -> Result<usize, CacheError> {
        Ok(fs::read_dir(&self.dir)?
            .filter_map(|e| e.ok())
            .filter(|e| e.file_name().to_string_lossy().len() == 64)
            .count())
    }

    pub fn is_empty(&self) -> Result<bool, CacheError> {
        Ok(self.len()? == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_get_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let key = CacheKey::new("engine/Ctw3(1,0)/fullA");
        let value = "series v1 denom 1\n1 0 0 0\nend\n";
        assert_eq!(store.get(&key).unwrap(), None);
        store.put(&key, value).unwrap();
        assert_eq!(store.get(&key).unwrap().as_deref(), Some(value));
        // identical re-put is a no-op
        store.put(&key, value).unwrap();
        assert_eq!(store.len().unwrap(), 1);
    }

    #[test]
    fn conflicting_put_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let key = CacheKey::new("k");
        store.put(&key, "a\n").unwrap();
        assert!(matches!(store.put(&key, "b\n"), Err(CacheError::ConflictingEntry { .. })));
    }

    #[test]
    fn version_bump_invalidates() {
        let dir = tempfile::tempdir().unwrap();
        let key = CacheKey::new("k");
        Store::open_with_version(dir.path(), "old").unwrap().put(&key, "v\n").unwrap();
        let store = Store::open_with_version(dir.path(), "new").unwrap();
        assert_eq!(store.get(&key).unwrap(), None);
        // a stale entry may be overwritten by the new version
        store.put(&key, "w\n").unwrap();
        assert_eq!(store.get(&key).unwrap().as_deref(), Some("w\n"));
    }

    #[test]
    fn tampered_bytes_are_detected() {
        let dir = tempfile::tempdir().unwrap();
        let store = Store::open(dir.path()).unwrap();
        let key = CacheKey::new("k");
        store.put(&key, "12\n").unwrap();
        let path = store.path(&key);
        let raw = fs::read_to_string(&path).unwrap().replace("12\n", "13\n");
        fs::write(&path, raw).unwrap();
        assert!(matches!(store.get(&key), Err(CacheError::CorruptEntry { .. })));
    }
}
