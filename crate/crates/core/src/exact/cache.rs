//! Content-addressed memo table for simple-graph counts, with a text snapshot format.
//!
//! Snapshot lines are `key_csv;decimal_count`, where `key_csv` is the canonical
//! residual multiset written as comma-separated degrees in nonincreasing order.

use std::borrow::Borrow;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use dashmap::DashMap;
use num_bigint::BigUint;
use rustc_hash::FxBuildHasher;

use crate::error::{Error, Result};

/// Canonical key of a residual degree multiset.
///
/// Stored run-length encoded as `(degree, multiplicity)` pairs in decreasing degree
/// order, which is a bijective encoding of the nonincreasing sorted list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MemoKey(Box<[u32]>);

impl Borrow<[u32]> for MemoKey {
    fn borrow(&self) -> &[u32] {
        &self.0
    }
}

impl MemoKey {
    /// Builds the key from a nonincreasing, zero-free degree list.
    pub(crate) fn from_sorted(degrees: &[u32]) -> MemoKey {
        let mut runs = Vec::new();
        let mut i = 0;
        while i < degrees.len() {
            let v = degrees[i];
            let mut j = i;
            while j < degrees.len() && degrees[j] == v {
                j += 1;
            }
            runs.push(v);
            runs.push((j - i) as u32);
            i = j;
        }
        MemoKey(runs.into_boxed_slice())
    }

    pub(crate) fn from_flat(flat: Vec<u32>) -> MemoKey {
        MemoKey(flat.into_boxed_slice())
    }

    /// Expanded nonincreasing degree list.
    pub fn degrees(&self) -> Vec<u32> {
        let mut out = Vec::new();
        for pair in self.0.chunks_exact(2) {
            out.extend(std::iter::repeat_n(pair[0], pair[1] as usize));
        }
        out
    }

    fn to_csv(&self) -> String {
        let degrees = self.degrees();
        let mut s = String::with_capacity(degrees.len() * 3);
        for (i, d) in degrees.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            s.push_str(&d.to_string());
        }
        s
    }

    fn parse_csv(s: &str) -> Result<MemoKey> {
        let mut degrees = Vec::new();
        if !s.is_empty() {
            for t in s.split(',') {
                let d = t
                    .parse::<u32>()
                    .map_err(|e| Error::Snapshot(format!("bad key entry {t:?}: {e}")))?;
                degrees.push(d);
            }
        }
        if degrees.windows(2).any(|w| w[0] < w[1]) || degrees.contains(&0) {
            return Err(Error::Snapshot(format!(
                "key {s:?} is not a canonical multiset"
            )));
        }
        Ok(MemoKey::from_sorted(&degrees))
    }
}

/// Concurrent map from canonical multiset to its simple-graph count.
///
/// Values are deterministic, so racing inserts of the same key are harmless.
#[derive(Debug, Default)]
pub struct CountCache {
    map: DashMap<MemoKey, BigUint, FxBuildHasher>,
}

impl CountCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn get(&self, key: &MemoKey) -> Option<BigUint> {
        self.map.get(key).map(|v| v.value().clone())
    }

    /// Applies `f` to the cached value, if any, without cloning it.
    pub(crate) fn with_flat<R>(&self, flat: &[u32], f: impl FnOnce(&BigUint) -> R) -> Option<R> {
        self.map.get(flat).map(|v| f(v.value()))
    }

    pub fn insert(&self, key: MemoKey, value: BigUint) {
        self.map.insert(key, value);
    }

    pub fn clear(&self) {
        self.map.clear();
    }

    /// Loads a snapshot, merging into the current contents.
    pub fn load(&self, path: &Path) -> Result<usize> {
        let file =
            File::open(path).map_err(|e| Error::Snapshot(format!("{}: {e}", path.display())))?;
        let mut loaded = 0;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::Snapshot(e.to_string()))?;
            if line.is_empty() {
                continue;
            }
            let (key, count) = line
                .split_once(';')
                .ok_or_else(|| Error::Snapshot(format!("line {}: missing ';'", lineno + 1)))?;
            let key = MemoKey::parse_csv(key)?;
            let count = count
                .parse::<BigUint>()
                .map_err(|e| Error::Snapshot(format!("line {}: {e}", lineno + 1)))?;
            self.map.insert(key, count);
            loaded += 1;
        }
        Ok(loaded)
    }

    /// Writes every entry, sorted by key so identical tables give identical files.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<(MemoKey, BigUint)> = self
            .map
            .iter()
            .map(|e| (e.key().clone(), e.value().clone()))
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        let file =
            File::create(path).map_err(|e| Error::Snapshot(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        for (k, v) in entries {
            writeln!(w, "{};{}", k.to_csv(), v).map_err(|e| Error::Snapshot(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Snapshot(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_encoding_is_run_length() {
        let k = MemoKey::from_sorted(&[5, 5, 3, 1, 1, 1]);
        assert_eq!(&*k.0, &[5, 2, 3, 1, 1, 3]);
        assert_eq!(k.degrees(), vec![5, 5, 3, 1, 1, 1]);
        assert_eq!(k.to_csv(), "5,5,3,1,1,1");
        assert_eq!(MemoKey::parse_csv("5,5,3,1,1,1").unwrap(), k);
    }

    #[test]
    fn parse_rejects_unsorted_keys() {
        assert!(MemoKey::parse_csv("1,2").is_err());
        assert!(MemoKey::parse_csv("2,0").is_err());
        assert!(MemoKey::parse_csv("2,x").is_err());
    }

    #[test]
    fn snapshot_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("snap.cache");
        let cache = CountCache::new();
        cache.insert(MemoKey::from_sorted(&[2, 2, 2, 2]), BigUint::from(3u32));
        cache.insert(
            MemoKey::from_sorted(&[]),
            "7789744323722189254716829156528211234980743220762340514888"
                .parse()
                .unwrap(),
        );
        cache.save(&path).unwrap();
        let back = CountCache::new();
        assert_eq!(back.load(&path).unwrap(), 2);
        assert_eq!(
            back.get(&MemoKey::from_sorted(&[2, 2, 2, 2])),
            Some(BigUint::from(3u32))
        );
        assert_eq!(
            back.get(&MemoKey::from_sorted(&[])).unwrap().to_string(),
            "7789744323722189254716829156528211234980743220762340514888"
        );
    }
}
