//! Presentations of `Γ(m)`, memoised in memory and optionally on disk.
//!
//! Each `m` has one JSON file `gamma-<m>.json` holding the generator words,
//! their matrices and the relators. A file whose `format_version` differs
//! from [`FORMAT_VERSION`], or which fails validation, is rebuilt.

use std::collections::BTreeMap;
use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use gammacoh::presentation::{gamma_presentation, GroupPresentation};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CacheFile {
    format_version: u32,
    m: u64,
    presentation: GroupPresentation,
}

#[derive(Debug, Default)]
pub struct PresentationStore {
    dir: Option<PathBuf>,
    memo: Mutex<BTreeMap<u64, Arc<GroupPresentation>>>,
}

impl PresentationStore {
    pub fn new(dir: Option<PathBuf>) -> PresentationStore {
        PresentationStore {
            dir,
            memo: Mutex::default(),
        }
    }

    pub fn path_for(&self, m: u64) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("gamma-{m}.json")))
    }

    pub fn get(&self, m: u64) -> Result<Arc<GroupPresentation>, CliError> {
        let mut memo = self.memo.lock().expect("presentation memo poisoned");
        if let Some(p) = memo.get(&m) {
            return Ok(p.clone());
        }
        let pres = match self.path_for(m) {
            Some(path) => match read(&path, m)? {
                Some(p) => p,
                None => {
                    let p = gamma_presentation(m)?;
                    write_atomic(
                        &path,
                        &CacheFile {
                            format_version: FORMAT_VERSION,
                            m,
                            presentation: p.clone(),
                        },
                    )?;
                    p
                }
            },
            None => gamma_presentation(m)?,
        };
        let pres = Arc::new(pres);
        memo.insert(m, pres.clone());
        Ok(pres)
    }
}

fn read(path: &Path, m: u64) -> Result<Option<GroupPresentation>, CliError> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(CliError::cache(path, e)),
    };
    Ok(serde_json::from_str::<CacheFile>(&text)
        .ok()
        .filter(|f| f.format_version == FORMAT_VERSION && f.m == m)
        .map(|f| f.presentation))
}

fn write_atomic(path: &Path, file: &CacheFile) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::cache(dir, e))?;
    let json = serde_json::to_string(file).map_err(|e| CliError::cache(path, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::cache(dir, e))?;
    tmp.write_all(json.as_bytes())
        .map_err(|e| CliError::cache(tmp.path(), e))?;
    tmp.persist(path)
        .map_err(|e| CliError::cache(path, e.error))?;
    Ok(())
}
