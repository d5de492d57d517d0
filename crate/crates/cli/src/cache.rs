//! On-disk cache of Euler tables and classes.
//!
//! Tables are keyed by `(max_n, order)`. Classes are keyed by a SHA-256 of
//! the chamber signature; a hit is served only after the stored
//! representative is checked to lie in the query's chamber. Files are plain
//! JSON carrying a `format_version`; unreadable or stale files are
//! recomputed and overwritten with a warning. All access goes through an
//! advisory lock on `<dir>/.lock`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, ErrorKind};
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use rubber_core::chambers::{same_chamber, signature, validate, SIGNATURE_BOUND};
use rubber_core::recursion::EulerTable;
use rubber_core::{GClass, RamificationDatum};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::output::{class_from_json, class_json};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("cache directory {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CacheError + '_ {
    move |source| CacheError::Io { path: path.to_path_buf(), source }
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    format_version: u64,
    kind: String,
    max_n: usize,
    order: usize,
    rows: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ClassFile {
    format_version: u64,
    kind: String,
    n: usize,
    signature: String,
    representative: Vec<i64>,
    coefficients: Value,
}

#[derive(Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self, CacheError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        Ok(Self { dir: dir.to_path_buf() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn table_path(&self, max_n: usize, order: usize) -> PathBuf {
        self.dir.join(format!("table-n{max_n}-order{order}.json"))
    }

    /// `None` when `x` is too long to have a signature.
    pub fn class_path(&self, x: &RamificationDatum) -> Option<PathBuf> {
        Some(self.dir.join(format!("class-{}.json", signature_key(x)?)))
    }

    fn lock(&self, exclusive: bool) -> Result<File, CacheError> {
        let path = self.dir.join(".lock");
        let f = OpenOptions::new().create(true).truncate(false).write(true).open(&path).map_err(io_err(&path))?;
        if exclusive { f.lock() } else { f.lock_shared() }.map_err(io_err(&path))?;
        Ok(f)
    }

    /// Reads a JSON file under a shared lock. Missing files are `None`;
    /// anything unparsable or with another format version is reported in
    /// `warnings` and also `None`.
    fn read(&self, path: &Path, warnings: &mut Vec<String>) -> Result<Option<Value>, CacheError> {
        let _guard = self.lock(false)?;
        let text = match fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(io_err(path)(e)),
        };
        let value: Value = match serde_json::from_str(&text) {
            Ok(v) => v,
            Err(e) => {
                warnings.push(format!("corrupt cache file {} ({e}); recomputing", path.display()));
                return Ok(None);
            }
        };
        match value.get("format_version").and_then(Value::as_u64) {
            Some(FORMAT_VERSION) => Ok(Some(value)),
            other => {
                warnings.push(format!(
                    "cache file {} has format version {other:?}, expected {FORMAT_VERSION}; recomputing",
                    path.display()
                ));
                Ok(None)
            }
        }
    }

    /// Writes through a temporary file and a rename, under an exclusive lock.
    fn write(&self, path: &Path, value: &impl Serialize) -> Result<(), CacheError> {
        let _guard = self.lock(true)?;
        let tmp = path.with_extension("json.tmp");
        let text = serde_json::to_string_pretty(value).expect("cache records serialize");
        fs::write(&tmp, text).map_err(io_err(&tmp))?;
        fs::rename(&tmp, path).map_err(io_err(path))
    }

    pub fn load_table(
        &self,
        max_n: usize,
        order: usize,
        warnings: &mut Vec<String>,
    ) -> Result<Option<EulerTable>, CacheError> {
        let path = self.table_path(max_n, order);
        let Some(value) = self.read(&path, warnings)? else { return Ok(None) };
        let parsed = serde_json::from_value::<TableFile>(value).ok().and_then(|f| {
            if f.kind != "chi_table" || f.max_n != max_n || f.order != order {
                return None;
            }
            let rows = f
                .rows
                .iter()
                .map(|r| r.iter().map(|s| s.parse::<BigInt>().ok()).collect::<Option<Vec<_>>>())
                .collect::<Option<Vec<_>>>()?;
            EulerTable::from_rows(rows).ok().filter(|t| t.max_n() == max_n)
        });
        if parsed.is_none() {
            warnings.push(format!("corrupt cache file {}; recomputing", path.display()));
        }
        Ok(parsed)
    }

    pub fn store_table(&self, table: &EulerTable, order: usize) -> Result<(), CacheError> {
        let record = TableFile {
            format_version: FORMAT_VERSION,
            kind: "chi_table".into(),
            max_n: table.max_n(),
            order,
            rows: table.rows().iter().map(|r| r.iter().map(BigInt::to_string).collect()).collect(),
        };
        self.write(&self.table_path(table.max_n(), order), &record)
    }

    /// A cached class for the chamber of `x`, served only if the stored
    /// representative validates and [`same_chamber`] confirms it.
    pub fn load_class(&self, x: &RamificationDatum, warnings: &mut Vec<String>) -> Result<Option<GClass>, CacheError> {
        let Some(path) = self.class_path(x) else { return Ok(None) };
        let Some(value) = self.read(&path, warnings)? else { return Ok(None) };
        let Ok(f) = serde_json::from_value::<ClassFile>(value) else {
            warnings.push(format!("corrupt cache file {}; recomputing", path.display()));
            return Ok(None);
        };
        let Some(class) = class_from_json(&f.coefficients) else {
            warnings.push(format!("corrupt cache file {}; recomputing", path.display()));
            return Ok(None);
        };
        let sig = signature(x).expect("class_path checked the length").to_sign_string();
        let verified = f.kind == "class"
            && f.n == x.n()
            && f.signature == sig
            && validate(&f.representative).is_ok_and(|rep| same_chamber(&rep, x).unwrap_or(false));
        if !verified {
            warnings.push(format!(
                "cache file {} does not match the chamber of the query; recomputing",
                path.display()
            ));
            return Ok(None);
        }
        Ok(Some(class))
    }

    pub fn store_class(&self, x: &RamificationDatum, class: &GClass, warnings: &mut Vec<String>) -> Result<(), CacheError> {
        let Some(path) = self.class_path(x) else {
            warnings.push(format!("n = {} exceeds {SIGNATURE_BOUND}; class not cached", x.n()));
            return Ok(());
        };
        let record = ClassFile {
            format_version: FORMAT_VERSION,
            kind: "class".into(),
            n: x.n(),
            signature: signature(x).expect("class_path checked the length").to_sign_string(),
            representative: x.entries().to_vec(),
            coefficients: class_json(class),
        };
        self.write(&path, &record)
    }
}

/// Hex SHA-256 of `n:<signs>`, or `None` past the signature bound.
pub fn signature_key(x: &RamificationDatum) -> Option<String> {
    let sig = signature(x).ok()?;
    let digest = Sha256::digest(format!("{}:{}", x.n(), sig.to_sign_string()).as_bytes());
    Some(digest.iter().map(|b| format!("{b:02x}")).collect())
}
