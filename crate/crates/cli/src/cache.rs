//! On-disk moment tables keyed by `(poly hash, R, M)`.

use std::fs;
use std::path::{Path, PathBuf};

use pickdecomp_core::moments::MOMENT_CONVENTION;
use pickdecomp_core::{compute_moments, Complex64, MomentTable, MultiIndex, StablePolynomial};
use serde::{Deserialize, Serialize};

use crate::error::CliResult;
use crate::output::write_atomic;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CacheHeader {
    pub poly_hash: String,
    pub d: usize,
    #[serde(rename = "R")]
    pub range: Vec<i64>,
    #[serde(rename = "M")]
    pub grid: usize,
    pub convention: String,
    pub aliasing_error_estimate: f64,
}

/// Header plus `[re, im]` pairs in graded lexicographic order of `γ + R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheFile {
    pub header: CacheHeader,
    pub values: Vec<[f64; 2]>,
}

impl CacheFile {
    pub fn from_table(t: &MomentTable) -> Self {
        CacheFile {
            header: CacheHeader {
                poly_hash: t.poly_hash().to_string(),
                d: t.dim(),
                range: t.range().entries().to_vec(),
                grid: t.grid(),
                convention: MOMENT_CONVENTION.to_string(),
                aliasing_error_estimate: t.aliasing_error_estimate(),
            },
            values: t.graded_values().iter().map(|c| [c.re, c.im]).collect(),
        }
    }

    pub fn into_table(self) -> Result<MomentTable, String> {
        let h = self.header;
        if h.convention != MOMENT_CONVENTION {
            return Err(format!("moment convention {:?} differs from {MOMENT_CONVENTION:?}", h.convention));
        }
        if h.range.len() != h.d {
            return Err("header R does not match d".into());
        }
        MomentTable::from_graded(
            h.poly_hash,
            MultiIndex::new(h.range),
            h.grid,
            self.values.iter().map(|&[re, im]| Complex64::new(re, im)).collect(),
            h.aliasing_error_estimate,
        )
        .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Hit,
    Miss,
    Disabled,
}

#[derive(Clone, Debug)]
pub struct MomentCache {
    dir: Option<PathBuf>,
}

impl MomentCache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        MomentCache { dir }
    }

    pub fn disabled() -> Self {
        MomentCache { dir: None }
    }

    pub fn default_dir() -> PathBuf {
        std::env::temp_dir().join("pickdecomp-cache")
    }

    pub fn path_for(dir: &Path, hash: &str, range: &MultiIndex, grid: usize) -> PathBuf {
        let r: Vec<String> = range.entries().iter().map(|v| v.to_string()).collect();
        dir.join(format!("{hash}_R{}_M{grid}.json", r.join("x")))
    }

    /// Loads the table for `(p, range, grid)` or computes and stores it. A
    /// missing, unreadable or mismatched file is recomputed and replaced.
    pub fn get(
        &self,
        p: &StablePolynomial,
        range: &MultiIndex,
        grid: usize,
    ) -> CliResult<(MomentTable, CacheStatus)> {
        let Some(dir) = &self.dir else {
            return Ok((compute_moments(p, range, grid)?, CacheStatus::Disabled));
        };
        let hash = p.identity_hash();
        let path = Self::path_for(dir, &hash, range, grid);
        if let Ok(text) = fs::read_to_string(&path) {
            match serde_json::from_str::<CacheFile>(&text)
                .map_err(|e| e.to_string())
                .and_then(CacheFile::into_table)
            {
                Ok(t) if t.poly_hash() == hash && t.range() == range && t.grid() == grid => {
                    return Ok((t, CacheStatus::Hit));
                }
                Ok(_) => eprintln!("warning: {} does not match its key; recomputing", path.display()),
                Err(e) => eprintln!("warning: ignoring corrupt cache file {}: {e}", path.display()),
            }
        }
        let table = compute_moments(p, range, grid)?;
        let text = serde_json::to_string(&CacheFile::from_table(&table)).expect("cache serializes");
        if let Err(e) = write_atomic(&path, text.as_bytes()) {
            eprintln!("warning: moment cache not written: {e}");
        }
        Ok((table, CacheStatus::Miss))
    }
}
