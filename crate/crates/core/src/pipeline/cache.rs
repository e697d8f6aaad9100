use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Bumped whenever a stage's output format or semantics change.
pub const CACHE_VERSION: u32 = 1;

/// Hex SHA-256 of a file's bytes.
pub fn file_digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Content key of a stage: hash of its name, the cache version, and a
/// serializable description of its inputs and configuration.
pub fn stage_key<T: Serialize>(stage: &str, inputs: &T) -> String {
    let json = serde_json::to_string(inputs).expect("stage inputs serialize");
    let mut h = Sha256::new();
    h.update(stage.as_bytes());
    h.update(CACHE_VERSION.to_le_bytes());
    h.update(json.as_bytes());
    hex::encode(h.finalize())
}

/// Directory of content-addressed stage outputs.
#[derive(Clone, Debug)]
pub struct StageCache {
    root: PathBuf,
}

impl StageCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        StageCache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    /// Path for `key` under `stage/`, creating the directory.
    pub fn path(&self, stage: &str, key: &str, ext: &str) -> Result<PathBuf> {
        let dir = self.root.join(stage);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(dir.join(format!("{key}.{ext}")))
    }

    /// Return the cached value, or compute it, store it through `write`
    /// into a temporary path, and move it into place.
    pub fn get_or_compute<T>(
        &self,
        stage: &str,
        key: &str,
        ext: &str,
        read: impl Fn(&Path) -> Result<T>,
        write: impl Fn(&Path, &T) -> Result<()>,
        compute: impl FnOnce() -> Result<T>,
    ) -> Result<T> {
        let path = self.path(stage, key, ext)?;
        if path.is_file() {
            if let Ok(v) = read(&path) {
                log::info!("cache hit: {stage} {}", &key[..12]);
                return Ok(v);
            }
            log::warn!("discarding unreadable cache entry {}", path.display());
        }
        let value = compute()?;
        let tmp = path.with_extension(format!("{ext}.tmp{}", std::process::id()));
        write(&tmp, &value)?;
        for sidecar in sidecars(&tmp) {
            let target = PathBuf::from(sidecar.to_string_lossy().replacen(
                &tmp.file_name().unwrap().to_string_lossy().to_string(),
                &path.file_name().unwrap().to_string_lossy(),
                1,
            ));
            fs::rename(&sidecar, &target).map_err(|e| Error::io(&target, e))?;
        }
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(value)
    }
}

/// Files written next to `path` whose names extend it (`<name>.idx.csv`, `<name>.ids`).
fn sidecars(path: &Path) -> Vec<PathBuf> {
    let Some(dir) = path.parent() else {
        return Vec::new();
    };
    let name = path.file_name().unwrap().to_string_lossy().to_string();
    let mut out: Vec<PathBuf> = fs::read_dir(dir)
        .map(|rd| {
            rd.filter_map(|e| e.ok())
                .map(|e| e.path())
                .filter(|p| {
                    let n = p.file_name().unwrap().to_string_lossy();
                    n.len() > name.len() && n.starts_with(&name) && n.as_bytes()[name.len()] == b'.'
                })
                .collect()
        })
        .unwrap_or_default();
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::Cell;

    #[test]
    fn keys_depend_on_every_input() {
        let a = stage_key("segment", &("x", 1));
        assert_eq!(a, stage_key("segment", &("x", 1)));
        assert_ne!(a, stage_key("segment", &("x", 2)));
        assert_ne!(a, stage_key("symbolize", &("x", 1)));
        assert_eq!(a.len(), 64);
    }

    #[test]
    fn second_call_hits() {
        let dir = tempfile::tempdir().unwrap();
        let cache = StageCache::new(dir.path());
        let calls = Cell::new(0);
        let read = |p: &Path| fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let write = |p: &Path, v: &String| {
            fs::write(p, v).map_err(|e| Error::io(p, e))?;
            let side = PathBuf::from(format!("{}.ids", p.display()));
            fs::write(&side, "side").map_err(|e| Error::io(&side, e))
        };
        for _ in 0..2 {
            let v = cache
                .get_or_compute("s", "k0123456789abcdef", "txt", read, write, || {
                    calls.set(calls.get() + 1);
                    Ok("value".to_string())
                })
                .unwrap();
            assert_eq!(v, "value");
        }
        assert_eq!(calls.get(), 1);
        assert!(dir.path().join("s/k0123456789abcdef.txt.ids").is_file());
        let leftovers: Vec<_> = fs::read_dir(dir.path().join("s")).unwrap().collect();
        assert_eq!(leftovers.len(), 2);
    }
}
