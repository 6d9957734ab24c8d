//! Content-hash stamps that let pipeline units skip work whose inputs have
//! not changed.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub fn hash_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Hash of a sequence of labelled parts.
#[derive(Debug, Clone, Default)]
pub struct KeyBuilder {
    hasher: Sha256,
}

impl KeyBuilder {
    pub fn new(unit: &str) -> Self {
        let mut k = Self::default();
        k.add("unit", unit);
        k
    }

    pub fn add(&mut self, label: &str, value: impl std::fmt::Display) -> &mut Self {
        self.hasher.update(format!("{label}={value}\n").as_bytes());
        self
    }

    pub fn finish(&self) -> String {
        hex::encode(self.hasher.clone().finalize())
    }
}

/// An output file and its content hash.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Output {
    pub path: PathBuf,
    pub hash: String,
}

#[derive(Debug, Clone)]
pub struct Memo {
    root: PathBuf,
}

impl Memo {
    pub fn new(root: &Path) -> Self {
        Self {
            root: root.to_path_buf(),
        }
    }

    fn stamp_path(&self, unit: &str) -> PathBuf {
        self.root.join(".stamps").join(format!("{unit}.stamp"))
    }

    fn read_stamp(&self, unit: &str) -> Result<Option<(String, Vec<Output>)>> {
        let path = self.stamp_path(unit);
        let Ok(file) = File::open(&path) else {
            return Ok(None);
        };
        let mut key = None;
        let mut outputs = Vec::new();
        for line in BufReader::new(file).lines() {
            let line = line.map_err(|e| Error::io(&path, e))?;
            match line.split_once(' ') {
                Some(("key", k)) => key = Some(k.to_string()),
                Some(("output", rest)) => {
                    // hash first: paths may contain spaces
                    let (hash, rel) = rest.split_once(' ').unwrap_or((rest, ""));
                    outputs.push(Output {
                        path: self.root.join(rel),
                        hash: hash.to_string(),
                    });
                }
                _ => return Ok(None),
            }
        }
        Ok(key.map(|k| (k, outputs)))
    }

    /// Outputs of `unit` when it last ran with `key` and they are all still
    /// present. A present output whose content changed is reported as an
    /// error naming it rather than silently regenerated.
    pub fn fresh(&self, unit: &str, key: &str) -> Result<Option<Vec<Output>>> {
        let Some((stored, outputs)) = self.read_stamp(unit)? else {
            return Ok(None);
        };
        if stored != key || outputs.iter().any(|o| !o.path.exists()) {
            return Ok(None);
        }
        for o in &outputs {
            if hash_file(&o.path)? != o.hash {
                return Err(Error::Modified(o.path.clone()));
            }
        }
        Ok(Some(outputs))
    }

    pub fn record(&self, unit: &str, key: &str, paths: &[PathBuf]) -> Result<Vec<Output>> {
        let mut outputs = Vec::with_capacity(paths.len());
        let mut text = format!("key {key}\n");
        for p in paths {
            let hash = hash_file(p)?;
            let rel = p.strip_prefix(&self.root).unwrap_or(p);
            text.push_str(&format!("output {hash} {}\n", rel.display()));
            outputs.push(Output { path: p.clone(), hash });
        }
        let path = self.stamp_path(unit);
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(outputs)
    }
}
