use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Seventeen significant digits: lossless for `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Buffered writer to a file or stdout that reports the path on failure.
pub struct Sink {
    path: Option<PathBuf>,
    out: Box<dyn Write>,
}

impl Sink {
    pub fn open(path: Option<&Path>) -> Result<Self, CliError> {
        let out: Box<dyn Write> = match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
                }
                Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?))
            }
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok(Self { path: path.map(Path::to_path_buf), out })
    }

    fn err(&self, e: io::Error) -> CliError {
        CliError::io(self.path.as_deref().unwrap_or(Path::new("<stdout>")), e)
    }

    pub fn line(&mut self, s: &str) -> Result<(), CliError> {
        writeln!(self.out, "{s}").map_err(|e| self.err(e))
    }

    pub fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let joined: Vec<S> = fields.into_iter().collect();
        let joined: Vec<&str> = joined.iter().map(AsRef::as_ref).collect();
        self.line(&joined.join(","))
    }

    pub fn json<T: Serialize>(&mut self, value: &T) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(value).expect("output serialises");
        self.line(&text)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush().map_err(|e| self.err(e))
    }
}

/// `base` with `suffix` appended to the file name.
pub fn sidecar(base: &Path, suffix: &str) -> PathBuf {
    let mut name = base.file_name().unwrap_or_default().to_os_string();
    name.push(suffix);
    base.with_file_name(name)
}
