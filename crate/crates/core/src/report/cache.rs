//! Line-delimited JSON cache of exact counts.
//!
//! Entries are keyed by the ascending row sums and the engine version, so a
//! change of counting algorithm invalidates old entries without deleting them.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::enumeration::{MatrixCount, RowSums};
use crate::error::{Error, Result};

pub const ENGINE_VERSION: &str = concat!("series-elim/", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountCacheEntry {
    pub n: usize,
    pub t_sorted: Vec<u64>,
    pub count: String,
    pub engine_version: String,
    /// Fields written by other tools, kept verbatim.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl CountCacheEntry {
    pub fn new(rs: &RowSums, count: &MatrixCount) -> Self {
        CountCacheEntry {
            n: rs.n(),
            t_sorted: rs.sorted(),
            count: count.to_decimal(),
            engine_version: ENGINE_VERSION.to_string(),
            extra: Default::default(),
        }
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.t_sorted.len() != self.n {
            return Err(format!("n = {} but {} row sums", self.n, self.t_sorted.len()));
        }
        if !self.t_sorted.windows(2).all(|w| w[0] <= w[1]) {
            return Err("t_sorted is not ascending".into());
        }
        if MatrixCount::parse_decimal(&self.count).is_none() {
            return Err(format!("count {:?} is not a decimal integer", self.count));
        }
        Ok(())
    }
}

type Key = (Vec<u64>, String);

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CountCache {
    entries: BTreeMap<Key, CountCacheEntry>,
}

impl CountCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reads a cache file. A missing file is an empty cache; malformed lines
    /// are skipped and described in the returned warnings.
    pub fn load(path: &Path) -> Result<(Self, Vec<String>)> {
        let mut cache = CountCache::new();
        let mut warnings = Vec::new();
        let file = match File::open(path) {
            Ok(f) => f,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok((cache, warnings)),
            Err(e) => return Err(e.into()),
        };
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parsed = serde_json::from_str::<CountCacheEntry>(&line)
                .map_err(|e| e.to_string())
                .and_then(|e| e.check().map(|_| e));
            match parsed {
                Ok(entry) => {
                    cache.entries.insert(
                        (entry.t_sorted.clone(), entry.engine_version.clone()),
                        entry,
                    );
                }
                Err(msg) => warnings.push(format!("{}:{}: skipped: {msg}", path.display(), i + 1)),
            }
        }
        Ok((cache, warnings))
    }

    /// Writes every entry, one JSON object per line, through a temporary file.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = sibling(path, ".tmp");
        {
            let mut out = std::io::BufWriter::new(File::create(&tmp)?);
            for entry in self.entries.values() {
                serde_json::to_writer(&mut out, entry)?;
                out.write_all(b"\n")?;
            }
            out.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CountCacheEntry> {
        self.entries.values()
    }

    /// Count for `rs` computed by the current engine, if cached.
    pub fn get(&self, rs: &RowSums) -> Option<MatrixCount> {
        self.entries
            .get(&(rs.sorted(), ENGINE_VERSION.to_string()))
            .and_then(|e| MatrixCount::parse_decimal(&e.count))
    }

    pub fn insert(&mut self, rs: &RowSums, count: &MatrixCount) {
        self.insert_entry(CountCacheEntry::new(rs, count));
    }

    pub fn insert_entry(&mut self, entry: CountCacheEntry) {
        self.entries
            .insert((entry.t_sorted.clone(), entry.engine_version.clone()), entry);
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    path.with_file_name(name)
}

/// Exclusive hold on a cache file, released on drop.
///
/// Contention fails immediately rather than waiting.
#[derive(Debug)]
pub struct CacheLock {
    path: PathBuf,
}

impl CacheLock {
    pub fn acquire(cache_path: &Path) -> Result<Self> {
        let path = sibling(cache_path, ".lock");
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(CacheLock { path })
            }
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => {
                Err(Error::CacheLocked(path.display().to_string()))
            }
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for CacheLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
