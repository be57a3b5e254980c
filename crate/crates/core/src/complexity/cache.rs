//! Content-addressed memo of compressed sizes.
//!
//! On disk the cache is a single UTF-8 text file:
//!
//! ```text
//! # ncdlab size cache v1
//! <compressor name>\t<sha256 of content, lowercase hex>\t<compressed size in bytes>
//! ```
//!
//! Lines are sorted. Deleting the file only costs recomputation.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use sha2::{Digest, Sha256};

use super::Compressor;
use crate::error::{Error, Result};

const HEADER: &str = "# ncdlab size cache v1";

type Digest32 = [u8; 32];

#[derive(Debug, Default)]
pub struct SizeCache {
    sizes: RwLock<HashMap<String, HashMap<Digest32, u64>>>,
    path: Option<PathBuf>,
    hits: AtomicU64,
    misses: AtomicU64,
}

fn digest(parts: &[&[u8]]) -> Digest32 {
    let mut h = Sha256::new();
    for part in parts {
        h.update(part);
    }
    let mut out = [0u8; 32];
    out.copy_from_slice(&h.finalize());
    out
}

impl SizeCache {
    pub fn in_memory() -> Self {
        SizeCache::default()
    }

    /// Opens the cache file at `path`, starting empty if it does not exist.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let mut sizes: HashMap<String, HashMap<Digest32, u64>> = HashMap::new();
        if path.exists() {
            let body = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            for (idx, line) in body.lines().enumerate() {
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let parse_err = || Error::Parse {
                    source_name: path.display().to_string(),
                    line: idx + 1,
                    message: "expected `compressor<TAB>sha256<TAB>size`".into(),
                };
                let mut fields = line.split('\t');
                let (Some(name), Some(hex_digest), Some(size), None) =
                    (fields.next(), fields.next(), fields.next(), fields.next())
                else {
                    return Err(parse_err());
                };
                let mut key = [0u8; 32];
                hex::decode_to_slice(hex_digest, &mut key).map_err(|_| parse_err())?;
                let size = size.parse().map_err(|_| parse_err())?;
                sizes.entry(name.to_string()).or_default().insert(key, size);
            }
        }
        Ok(SizeCache {
            sizes: RwLock::new(sizes),
            path: Some(path),
            ..Default::default()
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    /// Compressed size of the concatenation of `parts`.
    pub fn size(&self, c: &dyn Compressor, parts: &[&[u8]]) -> Result<u64> {
        let name = c.name();
        let key = digest(parts);
        if let Some(size) = self
            .sizes
            .read()
            .expect("size cache lock poisoned")
            .get(&name)
            .and_then(|m| m.get(&key))
        {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(*size);
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let size = match parts {
            [single] => c.compressed_size(single)?,
            _ => c.compressed_size(&parts.concat())?,
        };
        self.sizes
            .write()
            .expect("size cache lock poisoned")
            .entry(name)
            .or_default()
            .insert(key, size);
        Ok(size)
    }

    pub fn len(&self) -> usize {
        self.sizes
            .read()
            .expect("size cache lock poisoned")
            .values()
            .map(HashMap::len)
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn hits(&self) -> u64 {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> u64 {
        self.misses.load(Ordering::Relaxed)
    }

    /// Writes the cache back to its file, if it has one. The write goes to a
    /// sibling temp file first and is renamed into place.
    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut lines: Vec<String> = {
            let sizes = self.sizes.read().expect("size cache lock poisoned");
            sizes
                .iter()
                .flat_map(|(name, m)| {
                    m.iter()
                        .map(move |(k, v)| format!("{name}\t{}\t{v}", hex::encode(k)))
                })
                .collect()
        };
        lines.sort();
        let mut body = String::with_capacity(lines.len() * 96 + HEADER.len() + 1);
        body.push_str(HEADER);
        body.push('\n');
        for line in lines {
            body.push_str(&line);
            body.push('\n');
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexity::{Gzip, Lzma};

    #[test]
    fn hits_match_fresh_compression() {
        let cache = SizeCache::in_memory();
        let c = Lzma::default();
        let x = b"hello hello hello world".repeat(20);
        let fresh = c.compressed_size(&x).unwrap();
        assert_eq!(cache.size(&c, &[&x]).unwrap(), fresh);
        assert_eq!(cache.size(&c, &[&x]).unwrap(), fresh);
        assert_eq!((cache.hits(), cache.misses()), (1, 1));
        // split parts hash to the same content key
        let (a, b) = x.split_at(7);
        assert_eq!(cache.size(&c, &[a, b]).unwrap(), fresh);
        assert_eq!(cache.hits(), 2);
    }

    #[test]
    fn keyed_by_compressor() {
        let cache = SizeCache::in_memory();
        let x = b"abcabcabcabcabc".repeat(30);
        let l = cache.size(&Lzma::default(), &[&x]).unwrap();
        let g = cache.size(&Gzip { level: 9 }, &[&x]).unwrap();
        assert_eq!(cache.misses(), 2);
        assert_eq!(l, Lzma::default().compressed_size(&x).unwrap());
        assert_eq!(g, Gzip { level: 9 }.compressed_size(&x).unwrap());
    }

    #[test]
    fn persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sizes.tsv");
        let c = Gzip { level: 6 };
        let cache = SizeCache::open(&path).unwrap();
        let s1 = cache.size(&c, &[b"one two three"]).unwrap();
        let s2 = cache.size(&c, &[b"four five"]).unwrap();
        cache.save().unwrap();

        let reopened = SizeCache::open(&path).unwrap();
        assert_eq!(reopened.len(), 2);
        assert_eq!(reopened.size(&c, &[b"one two three"]).unwrap(), s1);
        assert_eq!(reopened.size(&c, &[b"four five"]).unwrap(), s2);
        assert_eq!(reopened.misses(), 0);

        fs::write(&path, "gzip:level=6\tnothex\t12\n").unwrap();
        assert!(matches!(
            SizeCache::open(&path),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
