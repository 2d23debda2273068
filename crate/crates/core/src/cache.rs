//! On-disk reuse of fort censuses. Entries are keyed by the canonical graph
//! hash, the operation name and its parameters. Unreadable entries are
//! reported and recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::forts::{FortCensus, FortCensusJson};
use crate::graph::Graph;

pub const CACHE_ENV: &str = "FORTLIB_CACHE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CacheStatus {
    Hit,
    Miss,
    /// An entry existed but could not be used.
    Rejected,
    Disabled,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    key: String,
    graph_id: String,
    op: String,
    params: String,
    census: FortCensusJson,
}

#[derive(Debug, Clone)]
pub struct CensusCache {
    dir: PathBuf,
}

impl CensusCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        CensusCache { dir: dir.into() }
    }

    /// `FORTLIB_CACHE` wins over the given directory.
    pub fn resolve(dir: Option<&Path>) -> Option<Self> {
        match std::env::var_os(CACHE_ENV) {
            Some(v) if !v.is_empty() => Some(Self::new(v)),
            _ => dir.map(Self::new),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(g: &Graph, op: &str, params: &str) -> String {
        let mut h = Sha256::new();
        for part in [g.canonical_hash().as_str(), op, params] {
            h.update(part.as_bytes());
            h.update([0u8]);
        }
        hex::encode(h.finalize())
    }

    pub fn path_for(&self, g: &Graph, op: &str, params: &str) -> PathBuf {
        let key = Self::key(g, op, params);
        self.dir.join(format!("{op}-{}.json", &key[..32]))
    }

    /// Loads an entry, checking that it belongs to `g` and that its members
    /// are minimal forts of `g`. Problems are logged and yield `None`.
    pub fn load(&self, g: &Graph, op: &str, params: &str) -> (Option<FortCensus>, CacheStatus) {
        let path = self.path_for(g, op, params);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(_) => return (None, CacheStatus::Miss),
        };
        let parsed = serde_json::from_str::<Entry>(&text)
            .map_err(|e| e.to_string())
            .and_then(|e| {
                if e.key != Self::key(g, op, params) || e.graph_id != g.canonical_hash() {
                    return Err("key does not match".to_string());
                }
                let census = FortCensus::from_json(&e.census).map_err(|e| e.to_string())?;
                census.verify(g).map_err(|e| e.to_string())?;
                Ok(census)
            });
        match parsed {
            Ok(c) => (Some(c), CacheStatus::Hit),
            Err(why) => {
                log::warn!("ignoring cache entry {}: {why}", path.display());
                (None, CacheStatus::Rejected)
            }
        }
    }

    pub fn store(&self, g: &Graph, op: &str, params: &str, census: &FortCensus) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)?;
        let entry = Entry {
            key: Self::key(g, op, params),
            graph_id: g.canonical_hash(),
            op: op.to_string(),
            params: params.to_string(),
            census: census.to_json(),
        };
        let path = self.path_for(g, op, params);
        let tmp = path.with_extension("json.tmp");
        fs::write(&tmp, serde_json::to_vec(&entry)?)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn get_or_compute(
        &self,
        g: &Graph,
        op: &str,
        params: &str,
        compute: impl FnOnce() -> Result<FortCensus>,
    ) -> Result<(FortCensus, CacheStatus)> {
        let (hit, status) = self.load(g, op, params);
        if let Some(c) = hit {
            return Ok((c, status));
        }
        let census = compute()?;
        if let Err(e) = self.store(g, op, params, &census) {
            log::warn!("could not write cache entry: {e}");
        }
        Ok((census, status))
    }
}

/// Uses `cache` when present, otherwise computes directly.
pub fn cached_census(
    cache: Option<&CensusCache>,
    g: &Graph,
    op: &str,
    params: &str,
    compute: impl FnOnce() -> Result<FortCensus>,
) -> Result<(FortCensus, CacheStatus)> {
    match cache {
        Some(c) => c.get_or_compute(g, op, params, compute),
        None => Ok((compute()?, CacheStatus::Disabled)),
    }
}
