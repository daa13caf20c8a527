//! The polynomial interchange format:
//! `{"d": 2, "degree": [1, 1], "coefficients": [{"index": [0, 0], "re": 4.0, "im": 0.0}, ...]}`.

use std::fs;
use std::path::Path;

use pickdecomp_core::{Complex64, MultiIndex, StablePolynomial};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialJson {
    pub d: usize,
    pub degree: Vec<i64>,
    pub coefficients: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub index: Vec<i64>,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl PolynomialJson {
    pub fn from_polynomial(p: &StablePolynomial) -> Self {
        PolynomialJson {
            d: p.dim(),
            degree: p.degree().entries().to_vec(),
            coefficients: p
                .terms()
                .map(|(a, c)| TermJson {
                    index: a.entries().to_vec(),
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }

    /// Checks shape and bounds term by term so that diagnostics can name the
    /// offending entry.
    pub fn to_polynomial(&self) -> Result<StablePolynomial, String> {
        if self.d == 0 {
            return Err("\"d\" must be positive".into());
        }
        if self.degree.len() != self.d {
            return Err(format!("\"degree\" has {} entries, expected d = {}", self.degree.len(), self.d));
        }
        if let Some(v) = self.degree.iter().find(|&&v| v < 0) {
            return Err(format!("\"degree\" entry {v} is negative"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for (k, t) in self.coefficients.iter().enumerate() {
            if t.index.len() != self.d {
                return Err(format!("coefficient {k}: index has {} entries, expected {}", t.index.len(), self.d));
            }
            if t.index.iter().zip(&self.degree).any(|(&a, &n)| a < 0 || a > n) {
                return Err(format!("coefficient {k}: index {:?} lies outside the degree box {:?}", t.index, self.degree));
            }
            if !t.re.is_finite() || !t.im.is_finite() {
                return Err(format!("coefficient {k}: value is not finite"));
            }
            if !seen.insert(t.index.clone()) {
                return Err(format!("coefficient {k}: duplicate index {:?}", t.index));
            }
        }
        StablePolynomial::new(
            MultiIndex::new(self.degree.clone()),
            self.coefficients
                .iter()
                .map(|t| (MultiIndex::new(t.index.clone()), Complex64::new(t.re, t.im))),
        )
        .map_err(|e| e.to_string())
    }
}

pub fn parse_polynomial(text: &str, path: &Path) -> CliResult<StablePolynomial> {
    let raw: PolynomialJson = serde_json::from_str(text).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    raw.to_polynomial().map_err(|message| CliError::Input {
        path: path.to_path_buf(),
        message,
    })
}

pub fn read_polynomial(path: &Path) -> CliResult<StablePolynomial> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_polynomial(&text, path)
}
