//! On-disk result cache keyed by case id. Entries are written to a temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use crate::report::CachedCore;

pub const CACHE_ENV: &str = "HILBERTFORGE_CACHE";
pub const DEFAULT_CACHE_DIR: &str = ".hilbertforge-cache";

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

/// Outcome of a lookup.
#[derive(Debug)]
pub enum Lookup {
    Hit(Box<CachedCore>),
    Miss,
    /// The entry could not be trusted and was removed; carries the reason.
    Evicted(String),
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Cache { dir: dir.into() }
    }

    /// `flag`, else `$HILBERTFORGE_CACHE`, else `.hilbertforge-cache/`.
    pub fn resolve(flag: Option<&Path>) -> Self {
        match flag {
            Some(p) => Cache::new(p),
            None => Cache::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from)),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn entry_path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    /// Returns the stored record iff it parses and matches `id`, tool version, primes and seed.
    pub fn lookup(&self, id: &str, version: &str, primes: &[u64], seed: u64) -> Lookup {
        let path = self.entry_path(id);
        let bytes = match fs::read(&path) {
            Ok(b) => b,
            Err(_) => return Lookup::Miss,
        };
        let core: CachedCore = match serde_json::from_slice(&bytes) {
            Ok(c) => c,
            Err(e) => return self.evict(&path, format!("unreadable entry: {e}")),
        };
        if core.id != id {
            return self.evict(&path, format!("entry names id {}", core.id));
        }
        if core.tool_version != version || core.primes != primes || core.seed != seed {
            return Lookup::Miss;
        }
        Lookup::Hit(Box::new(core))
    }

    fn evict(&self, path: &Path, reason: String) -> Lookup {
        let _ = fs::remove_file(path);
        Lookup::Evicted(format!("{}: {reason}", path.display()))
    }

    /// Writes `core` atomically. Concurrent writers of the same id leave exactly one complete entry.
    pub fn store(&self, core: &CachedCore) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let bytes = serde_json::to_vec(core).map_err(std::io::Error::other)?;
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            core.id,
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        let mut f = fs::File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
        drop(f);
        fs::rename(&tmp, self.entry_path(&core.id)).inspect_err(|_| {
            let _ = fs::remove_file(&tmp);
        })
    }
}
