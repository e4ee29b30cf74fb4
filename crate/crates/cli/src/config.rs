use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use nhkitaev::ModelParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::literal::{format_complex, parse_complex};

pub const DEFAULT_N_ALPHA: usize = 1000;
pub const DEFAULT_N_K: usize = 1000;

/// Tolerance names accepted in the `tolerances` map.
pub const TOLERANCE_KEYS: [&str; 6] = [
    "modulus",
    "reconstruction",
    "pairing",
    "fit_quality",
    "min_rate",
    "boundary_fraction",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Flat run description; every field can also come from a flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: Option<String>,
    pub t1: Option<String>,
    pub t2: Option<String>,
    pub d1: Option<String>,
    pub d2: Option<String>,
    #[serde(rename = "L")]
    pub sites: Option<usize>,
    pub n_alpha: Option<usize>,
    pub n_k: Option<usize>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    pub output_path: Option<PathBuf>,
    pub output_format: Option<OutputFormat>,
    pub state: Option<usize>,
}

impl RunConfig {
    /// Reads a config file. Besides plain JSON this accepts any file this
    /// tool wrote: a CSV whose first line is `# {config}` or a JSON object
    /// with a `config` member.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let invalid = |e: serde_json::Error| CliError::Config(format!("{}: {e}", path.display()));
        if let Some(rest) = text.strip_prefix("# ") {
            let line = rest.lines().next().unwrap_or("");
            return serde_json::from_str(line).map_err(invalid);
        }
        let value: serde_json::Value = serde_json::from_str(&text).map_err(invalid)?;
        match value.get("config") {
            Some(inner) => serde_json::from_value(inner.clone()).map_err(invalid),
            None => serde_json::from_value(value).map_err(invalid),
        }
    }

    /// Fields set in `other` win.
    pub fn overlay(mut self, other: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f; } )* };
        }
        take!(m, t1, t2, d1, d2, sites, n_alpha, n_k, output_path, output_format, state);
        self.tolerances.extend(other.tolerances);
        self
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let field = |name: &str, v: &Option<String>| -> Result<num_complex::Complex64, CliError> {
            let s = v.as_deref().ok_or_else(|| CliError::Config(format!("missing parameter --{name}")))?;
            parse_complex(s).map_err(|e| CliError::Config(format!("--{name}: {e}")))
        };
        let p = ModelParams {
            m: field("m", &self.m)?,
            t1: field("t1", &self.t1)?,
            t2: field("t2", &self.t2)?,
            d1: field("d1", &self.d1)?,
            d2: field("d2", &self.d2)?,
        };
        p.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(p)
    }

    /// Validates ranges and canonicalises literals so that the echoed
    /// config reproduces the run exactly.
    pub fn normalise(mut self) -> Result<Self, CliError> {
        if let Some(0) = self.sites {
            return Err(CliError::Config("L must be at least 1".into()));
        }
        if let Some(n) = self.n_alpha {
            if n < 8 {
                return Err(CliError::Config(format!("n_alpha must be at least 8, got {n}")));
            }
        }
        if let Some(0) = self.n_k {
            return Err(CliError::Config("n_k must be at least 1".into()));
        }
        if let Some(0) = self.state {
            return Err(CliError::Config("--state L must be at least 1".into()));
        }
        for (k, v) in &self.tolerances {
            if !TOLERANCE_KEYS.contains(&k.as_str()) {
                return Err(CliError::Config(format!(
                    "unknown tolerance {k:?}; known: {}",
                    TOLERANCE_KEYS.join(", ")
                )));
            }
            if !(v.is_finite() && *v > 0.0) {
                return Err(CliError::Config(format!("tolerance {k} must be positive and finite")));
            }
        }
        for slot in [&mut self.m, &mut self.t1, &mut self.t2, &mut self.d1, &mut self.d2] {
            if let Some(s) = slot.as_ref() {
                let z = parse_complex(s).map_err(CliError::Config)?;
                *slot = Some(format_complex(z));
            }
        }
        Ok(self)
    }

    pub fn tolerance(&self, key: &str) -> Option<f64> {
        self.tolerances.get(key).copied()
    }

    pub fn format(&self) -> OutputFormat {
        self.output_format.unwrap_or_default()
    }

    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }
}
