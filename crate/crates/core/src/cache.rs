//! Content-addressed store of provider responses.
//!
//! Entries live at `<dir>/<k0k1>/<k2k3>/<key>.json` and are written to a
//! temporary file then renamed, so readers never see a partial entry.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::{LlmResponse, ProviderConfig};

/// Request parameters that change the response and so belong in the key.
#[derive(Debug, Clone, PartialEq)]
pub struct ProviderIdentity {
    pub model: String,
    pub temperature: f64,
    pub max_tokens: Option<u32>,
    pub thinking_tokens: Option<u32>,
}

impl From<&ProviderConfig> for ProviderIdentity {
    fn from(c: &ProviderConfig) -> Self {
        ProviderIdentity {
            model: c.model_identity(),
            temperature: c.temperature,
            max_tokens: c.max_tokens,
            thinking_tokens: c.thinking_tokens,
        }
    }
}

fn opt(n: Option<u32>) -> String {
    n.map_or_else(|| "-".to_string(), |n| n.to_string())
}

/// Lowercase hex SHA-256 over length-prefixed fields, so no two distinct
/// inputs share an encoding.
pub fn cache_key(file_bytes: &[u8], prompt_version: &str, identity: &ProviderIdentity) -> String {
    let temperature = format!("{:?}", identity.temperature);
    let max_tokens = opt(identity.max_tokens);
    let thinking_tokens = opt(identity.thinking_tokens);
    let fields: [&[u8]; 6] = [
        file_bytes,
        prompt_version.as_bytes(),
        identity.model.as_bytes(),
        temperature.as_bytes(),
        max_tokens.as_bytes(),
        thinking_tokens.as_bytes(),
    ];
    let mut h = Sha256::new();
    for field in fields {
        h.update((field.len() as u64).to_le_bytes());
        h.update(field);
    }
    hex::encode(h.finalize())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub raw_text: String,
    pub input_tokens: u64,
    pub output_tokens: u64,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub model_identity: String,
    pub prompt_version: String,
}

impl CacheEntry {
    pub fn from_response(key: &str, response: &LlmResponse, model_identity: &str, prompt_version: &str) -> Self {
        CacheEntry {
            key: key.to_string(),
            raw_text: response.raw_text.clone(),
            input_tokens: response.input_tokens,
            output_tokens: response.output_tokens,
            created_at: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            model_identity: model_identity.to_string(),
            prompt_version: prompt_version.to_string(),
        }
    }

    fn checksum(&self) -> String {
        let body = serde_json::to_vec(self).expect("entry serializes");
        hex::encode(Sha256::digest(body))
    }
}

#[derive(Serialize, Deserialize)]
struct StoredEntry {
    entry: CacheEntry,
    checksum: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Lookup {
    Hit(CacheEntry),
    Miss,
    /// An unreadable or tampered entry was found and deleted.
    Evicted,
}

impl Lookup {
    pub fn entry(self) -> Option<CacheEntry> {
        match self {
            Lookup::Hit(e) => Some(e),
            _ => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

fn is_key(key: &str) -> bool {
    key.len() == 64 && key.bytes().all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b))
}

impl ResponseCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ResponseCache { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(&key[0..2]).join(&key[2..4]).join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Lookup {
        if !is_key(key) {
            return Lookup::Miss;
        }
        let path = self.entry_path(key);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => {
                log::warn!("cache entry {} unreadable: {e}", path.display());
                return Lookup::Miss;
            }
        };
        let valid = serde_json::from_slice::<StoredEntry>(&bytes)
            .ok()
            .filter(|s| s.entry.key == key && s.entry.checksum() == s.checksum);
        match valid {
            Some(stored) => Lookup::Hit(stored.entry),
            None => {
                log::warn!("evicting corrupt cache entry {}", path.display());
                let _ = fs::remove_file(&path);
                Lookup::Evicted
            }
        }
    }

    pub fn put(&self, entry: &CacheEntry) -> io::Result<()> {
        if !is_key(&entry.key) {
            return Err(io::Error::new(
                io::ErrorKind::InvalidInput,
                "cache key is not a hex digest",
            ));
        }
        let path = self.entry_path(&entry.key);
        let parent = path.parent().expect("entry path has parent");
        fs::create_dir_all(parent)?;
        let stored = StoredEntry {
            checksum: entry.checksum(),
            entry: entry.clone(),
        };
        let tmp = parent.join(format!(
            ".{}.{}.{}.tmp",
            entry.key,
            std::process::id(),
            TMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, serde_json::to_vec_pretty(&stored).map_err(io::Error::other)?)?;
        fs::rename(&tmp, &path).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }

    /// Removes every entry; returns how many were deleted.
    pub fn clear(&self) -> io::Result<usize> {
        if !self.dir.exists() {
            return Ok(0);
        }
        let mut removed = 0;
        for level1 in fs::read_dir(&self.dir)? {
            let level1 = level1?.path();
            if !level1.is_dir() || level1.file_name().is_none_or(|n| n.len() != 2) {
                continue;
            }
            for level2 in fs::read_dir(&level1)? {
                let level2 = level2?.path();
                if !level2.is_dir() {
                    continue;
                }
                for file in fs::read_dir(&level2)? {
                    let file = file?.path();
                    if file.extension().is_some_and(|e| e == "json" || e == "tmp") {
                        fs::remove_file(&file)?;
                        removed += 1;
                    }
                }
                let _ = fs::remove_dir(&level2);
            }
            let _ = fs::remove_dir(&level1);
        }
        Ok(removed)
    }
}
