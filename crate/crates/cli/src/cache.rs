//! Content-addressed result cache: one JSON file per entry, named by the
//! SHA-256 of the request key.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub version: String,
    pub created_at: u64,
    pub checksum: String,
    pub exit_code: i32,
    pub reason: Option<String>,
    pub payload: String,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Key of a request: the description must include every option that
/// affects the output.
pub fn request_key(description: &str) -> String {
    digest(format!("{CODE_VERSION}\n{description}").as_bytes())
}

impl Cache {
    /// Creates the directory; on failure the cache is disabled with a warning.
    pub fn open(dir: &Path) -> Option<Self> {
        match fs::create_dir_all(dir) {
            Ok(()) => Some(Self { dir: dir.to_path_buf() }),
            Err(e) => {
                log::warn!("cache disabled: cannot create {}: {e}", dir.display());
                None
            }
        }
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A valid entry for `key`; unreadable, corrupt or mismatched files are removed.
    pub fn lookup(&self, key: &str) -> Option<CacheEntry> {
        let path = self.path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return None,
            Err(e) => {
                log::warn!("cache read failed for {}: {e}", path.display());
                return None;
            }
        };
        let valid = serde_json::from_slice::<CacheEntry>(&bytes).ok().filter(|e| {
            e.key == key && e.version == CODE_VERSION && e.checksum == digest(e.payload.as_bytes())
        });
        if valid.is_none() {
            log::warn!("evicting corrupt cache entry {}", path.display());
            if let Err(e) = fs::remove_file(&path) {
                log::warn!("cannot remove {}: {e}", path.display());
            }
        }
        valid
    }

    /// Writes through a temporary file and a rename.
    pub fn store(&self, key: &str, exit_code: i32, reason: Option<&str>, payload: &str) {
        let entry = CacheEntry {
            key: key.to_string(),
            version: CODE_VERSION.to_string(),
            created_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            checksum: digest(payload.as_bytes()),
            exit_code,
            reason: reason.map(str::to_string),
            payload: payload.to_string(),
        };
        let path = self.path(key);
        let tmp = self.dir.join(format!("{key}.{}.tmp", std::process::id()));
        let result = (|| -> std::io::Result<()> {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&serde_json::to_vec(&entry).map_err(std::io::Error::other)?)?;
            f.sync_all()?;
            fs::rename(&tmp, &path)
        })();
        if let Err(e) = result {
            log::warn!("cache write failed for {}: {e}", path.display());
            let _ = fs::remove_file(&tmp);
        }
    }
}
