use std::io::Write;
use std::path::Path;

use pickdecomp_core::certify::CheckRecord;
use pickdecomp_core::nalgebra::DMatrix;
use pickdecomp_core::Complex64;
use serde::Serialize;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// One entry of the `checks` array.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub id: String,
    pub paper_anchor: String,
    pub kernel: String,
    pub n_points: usize,
    pub min_eig: Option<f64>,
    pub max_residual: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

impl From<&CheckRecord> for Check {
    fn from(r: &CheckRecord) -> Self {
        Check {
            id: r.id.clone(),
            paper_anchor: r.anchor.clone(),
            kernel: r.kernel.clone(),
            n_points: r.n_points,
            min_eig: r.min_eig,
            max_residual: r.max_residual,
            tol: r.tol,
            pass: r.pass,
        }
    }
}

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn emit_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    match path {
        Some(p) => write_atomic(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn format_point(z: &[Complex64]) -> String {
    z.iter()
        .map(|w| format!("{:.16e}{:+.16e}i", w.re, w.im))
        .collect::<Vec<_>>()
        .join(";")
}

/// Dumps `m[(i, j)] = K(z_i, z_j)` as `i,j,z_i,z_j,re,im`.
pub fn write_kernel_csv(path: &Path, points: &[Vec<Complex64>], m: &DMatrix<Complex64>) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::io(path, e.into());
    w.write_record(["i", "j", "z_i", "z_j", "re", "im"]).map_err(io)?;
    let labels: Vec<String> = points.iter().map(|z| format_point(z)).collect();
    for i in 0..points.len() {
        for j in 0..points.len() {
            let v = m[(i, j)];
            w.write_record([
                i.to_string(),
                j.to_string(),
                labels[i].clone(),
                labels[j].clone(),
                format!("{:.16e}", v.re),
                format!("{:.16e}", v.im),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}
